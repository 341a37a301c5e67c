#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccss/justness.hpp"
#include "ccss/lts.hpp"
#include "ccss/protocols.hpp"

namespace ccss {

enum class Region { NonCritical, Trying, Critical, Overflow };
std::string toString(Region r);

/// Per-process view of a protocol LTS: which leaf of the component tree is
/// the process, and the region of each local term.
class ProtocolView {
 public:
  ProtocolView(const ProtocolModel& model, const Lts& lts);

  const ComponentTree& tree() const { return tree_; }
  std::size_t processCount() const { return leaf_.size(); }
  int leafOf(std::size_t process) const { return leaf_.at(process); }
  /// Sub-terms of a state (cached).
  const std::vector<Term>& subterms(std::size_t state);
  Region region(std::size_t state, std::size_t process);
  /// Trying, or about to perform crit.
  bool pending(std::size_t state, std::size_t process);
  bool overflow(std::size_t state);

 private:
  Region classify(std::size_t process, Term local);

  const ProtocolModel& model_;
  const Lts& lts_;
  ComponentTree tree_;
  SosEngine sos_;
  std::vector<int> leaf_;
  std::vector<std::unordered_set<Term>> critTargets_;  // per process
  std::vector<std::unordered_map<Term, Region>> regions_;
  std::unordered_map<std::size_t, std::vector<Term>> subterms_;
};

struct SafetyVerdict {
  bool holds = true;
  bool exhaustive = true;  // false if the LTS was truncated
  std::vector<std::size_t> witness;  // transitions from the initial state
  std::size_t statesChecked = 0;
  std::size_t overflowStates = 0;
};

/// Mutual exclusion: no reachable non-Overflow state with two processes in
/// their critical region.
SafetyVerdict checkSafety(const ProtocolModel& model, const Lts& lts);

enum class LivenessStatus { Holds, Violated, Unknown };
std::string toString(LivenessStatus s);

struct LivenessBudget {
  std::size_t maxCandidates = 1'000'000;  // SCCs plus terminal states examined
};

struct LivenessVerdict {
  LivenessStatus status = LivenessStatus::Unknown;
  bool exhaustive = false;
  std::optional<Lasso> counterexample;
  std::optional<JustnessVerdict> justness;  // of the counterexample
  std::size_t starvingProcess = 0;
  std::size_t candidatesExamined = 0;
  std::string note;
};

/// Looks for a just, complete path on which some process performs noncrit
/// and never crit afterwards, avoiding Overflow states.
LivenessVerdict checkLiveness(const ProtocolModel& model, const Lts& lts, LivenessBudget budget = {});

struct PathReport {
  bool complete = false;
  JustnessVerdict justness;
  bool livenessOk = true;  // every noncrit on the path is eventually followed by crit
};

PathReport classifyPath(const ProtocolModel& model, const Lts& lts, const Lasso& lasso);

struct ReplayResult {
  bool ok = false;
  std::string message;
};

/// Re-derives every step with a fresh semantics engine: each transition must
/// be an SOS derivation of its source with the recorded label, participants
/// and (canonical) target.
ReplayResult replay(const Environment& env, Term root, const Lts& lts,
                    const std::vector<std::size_t>& path);
ReplayResult replay(const Environment& env, Term root, const Lts& lts, const Lasso& lasso);

/// Shortest transition path from the initial state to `target`, using only
/// states accepted by `allow`.
std::optional<std::vector<std::size_t>> shortestPath(const Lts& lts, std::size_t target,
                                                     const std::function<bool(std::size_t)>& allow = {});

std::string toJson(const SafetyVerdict& v, const Lts& lts);
std::string toJson(const LivenessVerdict& v, const Lts& lts);

}  // namespace ccss
