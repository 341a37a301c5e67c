#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccss/environment.hpp"
#include "ccss/lts.hpp"

namespace ccss {

/// Why two states differ: follow `trace` from both, then `reason` applies.
struct BisimEvidence {
  std::vector<Action> trace;
  std::string reason;
};

struct BisimResult {
  bool bisimilar = false;
  std::optional<BisimEvidence> evidence;
  std::size_t rounds = 0;
};

/// Strong bisimilarity classes (signals must agree, every action must be
/// matched). Returns a block id per state; ids are dense from 0.
std::vector<std::size_t> bisimulationClasses(const Lts& lts);

/// Compares the initial states of two transition systems.
BisimResult strongBisimilar(const Lts& a, const Lts& b);
/// Explores both terms under `env` first. Throws TruncatedInput if either
/// exploration hits the state limit.
BisimResult strongBisimilar(const Environment& env, Term p, Term q, ExploreOptions options = {});

struct Context {
  std::string description;  // e.g. "a.[]", "[] | b.0"
  std::function<Term(Term)> apply;
};

/// One-operator contexts over the given names, signals and partner terms:
/// every prefix (tau, names, co-names, signal reads), choice and parallel on
/// both sides with each partner, restriction of each name and signal, one
/// renaming per name and signal, and each signal operator.
std::vector<Context> singleOperatorContexts(const std::vector<Name>& names,
                                            const std::vector<Name>& signals,
                                            const std::vector<Term>& partners);

struct CongruenceReport {
  bool premise = false;  // p ~ q
  std::size_t checked = 0;
  std::vector<std::string> failures;  // contexts where C[p] and C[q] differ
  bool holds() const { return !premise || failures.empty(); }
};

CongruenceReport checkCongruence(const Environment& env, Term p, Term q,
                                 const std::vector<Context>& contexts);

struct EncodingReport {
  bool original = false;  // p ~ q
  bool encoded = false;   // enc(p) ~ enc(q)
  bool faithful() const { return original == encoded; }
};

/// Compares bisimilarity before and after translating signals into handshakes.
EncodingReport checkEncoding(const Environment& env, Term p, Term q);

}  // namespace ccss
