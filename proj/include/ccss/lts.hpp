#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ccss/environment.hpp"
#include "ccss/sos.hpp"

namespace ccss {

struct LtsTransition {
  std::size_t from = 0;
  Action label;
  std::size_t to = 0;
  std::vector<ComponentPath> participants;
  std::optional<ComponentPath> signalPartner;
};

/// Reachable part of the transition system. One transition per derivation,
/// so alternative derivations of the same (from, label, to) appear separately.
struct Lts {
  std::vector<Term> states;
  std::vector<SignalSet> stateSignals;
  std::vector<LtsTransition> transitions;
  std::vector<std::vector<std::size_t>> outgoing;  // transition indices per state
  std::size_t initial = 0;
  bool truncated = false;

  std::size_t stateCount() const { return states.size(); }
  std::optional<std::size_t> find(Term t) const;

  /// Appends a state (no duplicate check) and returns its index.
  std::size_t addState(Term t, SignalSet signals);
  void addTransition(LtsTransition t);

 private:
  std::unordered_map<Term, std::size_t> index_;
};

struct ExploreOptions {
  std::size_t maxStates = 0;  // 0: CCSS_MAX_STATES or 1,000,000
  std::size_t maxDepth = std::numeric_limits<std::size_t>::max();
};

/// CCSS_MAX_STATES if set to a positive integer, else 1,000,000.
std::size_t defaultMaxStates();

/// Unfolds identifiers whose bodies have static parallel structure (so the
/// component tree is visible at the root) and resolves identifier aliases
/// (`X = Y`). Applied to every explored state.
class Canonicalizer {
 public:
  explicit Canonicalizer(Environment env) : env_(std::move(env)) {}
  Term operator()(Term t);

 private:
  Environment env_;
  std::unordered_map<Term, Term> memo_;
};

/// Breadth-first exploration from canonical(root). Sets `truncated` when a
/// limit is hit. Throws UnguardedRecursion.
Lts explore(const Environment& env, Term root, ExploreOptions options = {});

std::string exportDot(const Lts& lts);
std::string exportJson(const Lts& lts);
/// Rebuilds an Lts from exportJson output, parsing state terms against `env`.
/// Throws Error on malformed input.
Lts importJson(std::string_view text, const Environment& env);

}  // namespace ccss
