#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ccss/environment.hpp"
#include "ccss/name.hpp"
#include "ccss/term.hpp"

namespace ccss {

struct PathStep {
  enum class Kind { ParLeft, ParRight, UnderRestrict, UnderRelabel, UnderSignal, UnderSum, UnderIdent };
  Kind kind = Kind::ParLeft;
  std::size_t index = 0;  // UnderSum: branch
  Name agent;             // UnderIdent: the unfolded agent

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

/// Route from a term to one of its action prefixes (or to the emitter of a
/// signal), recording every operator passed on the way.
using ComponentPath = std::vector<PathStep>;

/// "L/R/res/rel/sig/+2/@Agent"; the empty path prints as ".".
std::string toString(const ComponentPath& path);
/// Inverse of toString; throws Error on malformed input.
ComponentPath parsePath(const std::string& text);

struct TransitionDerivation {
  Term source;
  Action label;
  Term target;
  /// One path for a single prefix, two for a handshake synchronisation.
  std::vector<ComponentPath> participants;
  /// For a tau from a signal read: path to the component emitting the signal.
  std::optional<ComponentPath> signalPartner;
};

/// Structural operational semantics of CCS with signals.
///
/// Results are memoized per term. Not thread-safe: use one engine per thread.
class SosEngine {
 public:
  struct Options {
    std::size_t maxUnfold = 10000;  // nested identifier unfoldings before giving up
  };

  explicit SosEngine(Environment env);
  SosEngine(Environment env, Options options);

  /// All derivations from `t`. Throws UnguardedRecursion.
  const std::vector<TransitionDerivation>& transitions(Term t);
  /// Signals emitted by `t`.
  const SignalSet& signals(Term t);
  ActionSet enabled(Term t);

  const Environment& environment() const { return env_; }

 private:
  struct Guard;

  Environment env_;
  Options options_;
  std::unordered_map<Term, std::vector<TransitionDerivation>> trans_;
  std::unordered_map<Term, SignalSet> signals_;
  std::unordered_set<Term> transBusy_;
  std::unordered_set<Term> signalsBusy_;
  std::size_t depth_ = 0;

  std::vector<TransitionDerivation> compute(Term t);
  SignalSet computeSignals(Term t);
};

struct EncodedSystem {
  Environment env;  // no signals; one fresh agent per encoded sequential state
  Term term;
};

/// Translation into plain CCS: a signal read `s` becomes the handshake `s`,
/// and every state emitting `s` gets an `'s` self-loop. Parallel composition,
/// restriction and relabelling are translated homomorphically. Throws
/// TruncatedInput when more than `maxAgents` agents would be created.
EncodedSystem encodeSignalsAsTransitions(const Environment& env, Term t,
                                         std::size_t maxAgents = 100000);

}  // namespace ccss
