#include "ccss/justness.hpp"

#include <algorithm>

#include <json.hpp>

#include "ccss/error.hpp"

namespace ccss {

namespace {

using Kind = ComponentTree::Node::Kind;

std::string join(const std::string& label, const char* step) {
  return label == "." ? std::string(step) : label + "/" + step;
}

// Strips signal operators sitting above static parallel structure.
Term skipSignals(Term t) {
  while (t.kind() == TermKind::Signal && hasStaticPar(t.body())) t = t.body();
  return t;
}

}  // namespace

ComponentTree ComponentTree::of(Term state) {
  ComponentTree tree;
  tree.build(state, ".");
  return tree;
}

int ComponentTree::build(Term t, std::string label) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_.back().label = label;
  if (!hasStaticPar(t)) {
    leaves_.push_back(id);
    return id;
  }
  std::string prefix = label;
  while (t.kind() == TermKind::Signal) {
    t = t.body();
    prefix = join(prefix, "sig");
  }
  switch (t.kind()) {
    case TermKind::Par: {
      nodes_[id].kind = Kind::Par;
      int l = build(t.left(), join(prefix, "L"));
      int r = build(t.right(), join(prefix, "R"));
      nodes_[id].left = l;
      nodes_[id].right = r;
      break;
    }
    case TermKind::Restrict: {
      nodes_[id].kind = Kind::Restrict;
      nodes_[id].restriction.assign(t.restriction().begin(), t.restriction().end());
      int c = build(t.body(), join(prefix, "res"));
      nodes_[id].left = c;
      break;
    }
    case TermKind::Relabel: {
      nodes_[id].kind = Kind::Relabel;
      nodes_[id].relabelling = t.relabelling();
      int c = build(t.body(), join(prefix, "rel"));
      nodes_[id].left = c;
      break;
    }
    default: throw DynamicParallelism("unexpected operator above parallel structure");
  }
  return id;
}

int ComponentTree::leafOf(const ComponentPath& path) const {
  int n = root();
  std::size_t i = 0;
  while (node(n).kind != Kind::Leaf) {
    while (i < path.size() && path[i].kind == PathStep::Kind::UnderSignal) ++i;
    if (i == path.size()) throw DynamicParallelism("participant path ends above a leaf");
    const Node& nd = node(n);
    const auto k = path[i].kind;
    if (nd.kind == Kind::Par && k == PathStep::Kind::ParLeft) {
      n = nd.left;
    } else if (nd.kind == Kind::Par && k == PathStep::Kind::ParRight) {
      n = nd.right;
    } else if ((nd.kind == Kind::Restrict && k == PathStep::Kind::UnderRestrict) ||
               (nd.kind == Kind::Relabel && k == PathStep::Kind::UnderRelabel)) {
      n = nd.left;
    } else {
      throw DynamicParallelism("participant path " + toString(path) + " leaves the component tree");
    }
    ++i;
  }
  return n;
}

std::vector<Term> ComponentTree::subterms(Term state) const {
  std::vector<Term> out(nodes_.size());
  std::vector<std::pair<int, Term>> work{{root(), state}};
  while (!work.empty()) {
    auto [n, t] = work.back();
    work.pop_back();
    const Node& nd = node(n);
    if (nd.kind == Kind::Leaf) {
      if (hasStaticPar(t)) throw DynamicParallelism("leaf " + nd.label + " became parallel");
      out[n] = t;
      continue;
    }
    t = skipSignals(t);
    out[n] = t;
    bool ok = false;
    switch (nd.kind) {
      case Kind::Par:
        ok = t.kind() == TermKind::Par;
        if (ok) {
          work.emplace_back(nd.left, t.left());
          work.emplace_back(nd.right, t.right());
        }
        break;
      case Kind::Restrict:
        ok = t.kind() == TermKind::Restrict &&
             std::equal(t.restriction().begin(), t.restriction().end(), nd.restriction.begin(),
                        nd.restriction.end());
        if (ok) work.emplace_back(nd.left, t.body());
        break;
      case Kind::Relabel:
        ok = t.kind() == TermKind::Relabel && t.relabelling() == nd.relabelling;
        if (ok) work.emplace_back(nd.left, t.body());
        break;
      case Kind::Leaf: break;
    }
    if (!ok) throw DynamicParallelism("state does not match the component tree at " + nd.label);
  }
  return out;
}

std::size_t lassoLoopState(const Lts& lts, const Lasso& lasso) {
  auto check = [&](std::size_t t) -> const LtsTransition& {
    if (t >= lts.transitions.size()) throw InvalidLasso("transition index out of range");
    return lts.transitions[t];
  };
  std::size_t cur = lts.initial;
  for (std::size_t t : lasso.stem) {
    const auto& tr = check(t);
    if (tr.from != cur) throw InvalidLasso("stem transitions do not chain");
    cur = tr.to;
  }
  const std::size_t loop = cur;
  for (std::size_t t : lasso.cycle) {
    const auto& tr = check(t);
    if (tr.from != cur) throw InvalidLasso("cycle transitions do not chain");
    cur = tr.to;
  }
  if (cur != loop) throw InvalidLasso("cycle does not return to its start");
  return loop;
}

std::vector<LeafProjection> decompose(const Lts& lts, const Lasso& lasso, const ComponentTree& tree) {
  const std::size_t loop = lassoLoopState(lts, lasso);
  const auto sub = tree.subterms(lts.states[loop]);
  std::vector<LeafProjection> out;
  std::vector<int> slot(tree.nodes().size(), -1);
  for (int leaf : tree.leaves()) {
    slot[leaf] = static_cast<int>(out.size());
    out.push_back({leaf, false, sub[leaf], {}});
  }
  std::size_t pos = 0;
  for (const auto* seq : {&lasso.stem, &lasso.cycle}) {
    for (std::size_t t : *seq) {
      for (const auto& p : lts.transitions[t].participants) {
        auto& proj = out[slot[tree.leafOf(p)]];
        if (proj.steps.empty() || proj.steps.back() != pos) proj.steps.push_back(pos);
        if (seq == &lasso.cycle) proj.infinite = true;
      }
      ++pos;
    }
  }
  for (auto& p : out) {
    if (p.infinite) p.resting = Term();
  }
  return out;
}

SignalSet minimalSignallingSet(const LeafProjection& p, SosEngine& sos) {
  if (p.infinite) return {};
  return sos.signals(p.resting);
}

std::string toString(JustnessClause c) {
  switch (c) {
    case JustnessClause::FiniteEnd: return "finite end enables tau";
    case JustnessClause::Handshake: return "X ∩ Z̄_H ≠ ∅";
    case JustnessClause::ReadEmitted: return "X ∩ Z' ≠ ∅";
    case JustnessClause::EmitRead: return "X' ∩ Z ≠ ∅";
    case JustnessClause::NonBlocking: return "Y ⊄ blocking";
  }
  return "?";
}

std::string toJson(const JustnessVerdict& v) {
  using json = nlohmann::ordered_json;
  json y = json::array();
  for (const auto& a : v.minimalY) y.push_back(a.str());
  json doc = {{"just", v.just}, {"minimalY", y}};
  if (v.witness) {
    json off = json::array();
    for (const auto& a : v.witness->offending) off.push_back(a.str());
    doc["witness"] = {{"node", v.witness->node},
                      {"clause", toString(v.witness->clause)},
                      {"offendingActions", off}};
  } else {
    doc["witness"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

namespace {

struct Sets {
  ActionSet x;    // blocking actions and signal reads
  SignalSet sig;  // signalling set
};

class Evaluator {
 public:
  Evaluator(const ComponentTree& tree, const std::vector<Term>& sub, const std::vector<bool>& moving,
            const Environment& env, SosEngine& sos, JustnessRules rules)
      : tree_(tree), sub_(sub), moving_(moving), env_(env), sos_(sos), rules_(rules) {}

  JustnessVerdict run() {
    JustnessVerdict v;
    std::optional<Sets> s = eval(tree_.root());
    if (!s) {
      v.witness = witness_;
      return v;
    }
    ActionSet bad;
    for (const auto& a : s->x) {
      if (!env_.isBlocking(a)) bad.insert(a);
    }
    if (!bad.empty()) {
      v.witness = JustnessWitness{tree_.node(tree_.root()).label, JustnessClause::NonBlocking, bad};
      return v;
    }
    v.just = true;
    v.minimalY = std::move(s->x);
    return v;
  }

 private:
  std::optional<Sets> fail(int n, JustnessClause c, ActionSet off) {
    witness_ = JustnessWitness{tree_.node(n).label, c, std::move(off)};
    return std::nullopt;
  }

  std::optional<Sets> eval(int n) {
    const auto& nd = tree_.node(n);
    switch (nd.kind) {
      case Kind::Leaf: {
        if (moving_.at(n)) return Sets{};
        Sets s;
        s.x = sos_.enabled(sub_.at(n));
        if (s.x.count(Action::tau())) return fail(n, JustnessClause::FiniteEnd, {Action::tau()});
        if (rules_ == JustnessRules::Signals) s.sig = sos_.signals(sub_.at(n));
        return s;
      }
      case Kind::Par: {
        auto l = eval(nd.left);
        if (!l) return l;
        auto r = eval(nd.right);
        if (!r) return r;
        ActionSet off;
        for (const auto& a : l->x) {
          if (a.isHandshake() && r->x.count(a.complement())) off.insert(a);
        }
        if (!off.empty()) return fail(n, JustnessClause::Handshake, off);
        if (rules_ == JustnessRules::Signals) {
          for (const auto& a : l->x) {
            if (a.isSignal() && r->sig.count(a.name)) off.insert(a);
          }
          if (!off.empty()) return fail(n, JustnessClause::ReadEmitted, off);
          for (const auto& a : r->x) {
            if (a.isSignal() && l->sig.count(a.name)) off.insert(a);
          }
          if (!off.empty()) return fail(n, JustnessClause::EmitRead, off);
        }
        l->x.insert(r->x.begin(), r->x.end());
        l->sig.insert(r->sig.begin(), r->sig.end());
        return l;
      }
      case Kind::Restrict: {
        auto c = eval(nd.left);
        if (!c) return c;
        auto inL = [&](Name x) {
          return std::binary_search(nd.restriction.begin(), nd.restriction.end(), x);
        };
        std::erase_if(c->x, [&](const Action& a) { return inL(a.name); });
        std::erase_if(c->sig, inL);
        return c;
      }
      case Kind::Relabel: {
        auto c = eval(nd.left);
        if (!c) return c;
        Sets s;
        for (const auto& a : c->x) s.x.insert(nd.relabelling.apply(a));
        for (Name x : c->sig) s.sig.insert(nd.relabelling.applySignal(x));
        return s;
      }
    }
    return std::nullopt;
  }

  const ComponentTree& tree_;
  const std::vector<Term>& sub_;
  const std::vector<bool>& moving_;
  const Environment& env_;
  SosEngine& sos_;
  JustnessRules rules_;
  JustnessWitness witness_;
};

}  // namespace

JustnessVerdict evaluateJustness(const ComponentTree& tree, const std::vector<Term>& subterms,
                                 const std::vector<bool>& moving, const Environment& env,
                                 SosEngine& sos, JustnessRules rules) {
  return Evaluator(tree, subterms, moving, env, sos, rules).run();
}

std::vector<int> movingLeaves(const Lts& lts, std::size_t t, const ComponentTree& tree) {
  const auto& tr = lts.transitions.at(t);
  std::vector<int> out;
  for (std::size_t u : lts.outgoing.at(tr.from)) {
    const auto& alt = lts.transitions[u];
    if (alt.to != tr.to || !(alt.label == tr.label)) continue;
    for (const auto& p : alt.participants) out.push_back(tree.leafOf(p));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

JustnessVerdict isJust(const Lts& lts, const Lasso& lasso, const Environment& env, JustnessRules rules) {
  const std::size_t loop = lassoLoopState(lts, lasso);
  const ComponentTree tree = ComponentTree::of(lts.states[loop]);
  std::vector<bool> moving(tree.nodes().size(), false);
  for (std::size_t t : lasso.cycle) {
    tree.subterms(lts.states[lts.transitions[t].from]);
    for (int leaf : movingLeaves(lts, t, tree)) moving[leaf] = true;
  }
  SosEngine sos(env);
  return evaluateJustness(tree, tree.subterms(lts.states[loop]), moving, env, sos, rules);
}

bool isComplete(const Lts& lts, const Lasso& lasso, const Environment& env) {
  const std::size_t loop = lassoLoopState(lts, lasso);
  if (!lasso.terminal()) return isJust(lts, lasso, env).just;
  return std::all_of(lts.outgoing[loop].begin(), lts.outgoing[loop].end(),
                     [&](std::size_t t) { return env.isBlocking(lts.transitions[t].label); });
}

}  // namespace ccss
