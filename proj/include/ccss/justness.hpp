#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccss/environment.hpp"
#include "ccss/lts.hpp"
#include "ccss/sos.hpp"

namespace ccss {

/// Static parallel structure of a state: Par, Restrict and Relabel nodes
/// above sequential leaves. Signal operators over parallel structure are
/// transparent.
class ComponentTree {
 public:
  struct Node {
    enum class Kind { Leaf, Par, Restrict, Relabel };
    Kind kind = Kind::Leaf;
    int left = -1;   // Par left, or the operand of Restrict / Relabel
    int right = -1;  // Par right
    std::vector<Name> restriction;
    Relabelling relabelling;
    std::string label;  // route from the root, as in toString(ComponentPath)
  };

  static ComponentTree of(Term state);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  int root() const { return 0; }
  const std::vector<int>& leaves() const { return leaves_; }
  /// Leaf reached by a participant path. Throws DynamicParallelism.
  int leafOf(const ComponentPath& path) const;
  /// Sub-term of `state` at each node (indexed by node id). Throws
  /// DynamicParallelism if `state` does not have this shape.
  std::vector<Term> subterms(Term state) const;

 private:
  int build(Term t, std::string label);
  std::vector<Node> nodes_;
  std::vector<int> leaves_;
};

/// Finite stem from the initial state followed by a cycle of transition
/// indices; an empty cycle means the path ends after the stem.
struct Lasso {
  std::vector<std::size_t> stem;
  std::vector<std::size_t> cycle;
  bool terminal() const { return cycle.empty(); }
};

/// State at the end of the stem. Throws InvalidLasso if the transitions do
/// not chain or the cycle does not return to its start.
std::size_t lassoLoopState(const Lts& lts, const Lasso& lasso);

struct LeafProjection {
  int leaf = -1;
  bool infinite = false;
  Term resting;  // leaf term where a finite projection ends
  std::vector<std::size_t> steps;  // positions in stem ++ cycle where the leaf moves
};

/// Per-leaf projection following the recorded derivation of each transition.
/// Signal emitters do not move.
std::vector<LeafProjection> decompose(const Lts& lts, const Lasso& lasso, const ComponentTree& tree);

/// Signals admitted at the end of a finite projection; nothing for infinite ones.
SignalSet minimalSignallingSet(const LeafProjection& p, SosEngine& sos);

/// Ccs: clauses without signals. Signals: the full clauses with signalling sets.
enum class JustnessRules { Ccs, Signals };

enum class JustnessClause { FiniteEnd, Handshake, ReadEmitted, EmitRead, NonBlocking };
std::string toString(JustnessClause c);

struct JustnessWitness {
  std::string node;  // tree node label
  JustnessClause clause;
  ActionSet offending;
};

struct JustnessVerdict {
  bool just = false;
  ActionSet minimalY;  // least Y (all blocking) when just
  std::optional<JustnessWitness> witness;
};

std::string toJson(const JustnessVerdict& v);

/// Bottom-up check for given leaf terms where `moving[leaf]` marks leaves
/// with infinite projections. Resting leaves contribute their enabled
/// actions and signals.
JustnessVerdict evaluateJustness(const ComponentTree& tree, const std::vector<Term>& subterms,
                                 const std::vector<bool>& moving, const Environment& env,
                                 SosEngine& sos, JustnessRules rules = JustnessRules::Signals);

/// A leaf counts as moving if it participates in some derivation of some
/// cycle transition (alternative derivations of the same step included).
JustnessVerdict isJust(const Lts& lts, const Lasso& lasso, const Environment& env,
                       JustnessRules rules = JustnessRules::Signals);

/// Terminal: every enabled action at the end is blocking. Infinite: just.
bool isComplete(const Lts& lts, const Lasso& lasso, const Environment& env);

/// Leaves taking part in transition `t` or in any other derivation of the
/// same (from, label, to).
std::vector<int> movingLeaves(const Lts& lts, std::size_t t, const ComponentTree& tree);

}  // namespace ccss
