#include "ccss/verifier.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include <json.hpp>

#include "ccss/error.hpp"

namespace ccss {

std::string toString(Region r) {
  switch (r) {
    case Region::NonCritical: return "noncritical";
    case Region::Trying: return "trying";
    case Region::Critical: return "critical";
    case Region::Overflow: return "overflow";
  }
  return "?";
}

std::string toString(LivenessStatus s) {
  switch (s) {
    case LivenessStatus::Holds: return "holds";
    case LivenessStatus::Violated: return "violated";
    case LivenessStatus::Unknown: return "unknown";
  }
  return "?";
}

namespace {

// Local terms reachable from `start` by the leaf's own transitions.
std::vector<Term> localReach(Term start, SosEngine& sos, Canonicalizer& canon, std::size_t limit = 100000) {
  std::vector<Term> order{start};
  std::unordered_set<Term> seen{start};
  for (std::size_t i = 0; i < order.size() && order.size() < limit; ++i) {
    for (const auto& d : sos.transitions(order[i])) {
      Term t = canon(d.target);
      if (seen.insert(t).second) order.push_back(t);
    }
  }
  return order;
}

}  // namespace

ProtocolView::ProtocolView(const ProtocolModel& model, const Lts& lts)
    : model_(model), lts_(lts), tree_(ComponentTree::of(lts.states.at(lts.initial))), sos_(model.env) {
  Canonicalizer canon(model.env);
  const auto& init = subterms(lts.initial);
  std::vector<std::vector<Term>> reach;
  for (int leaf : tree_.leaves()) reach.push_back(localReach(init[leaf], sos_, canon));
  const std::size_t n = model.noncrit.size();
  leaf_.assign(n, -1);
  critTargets_.resize(n);
  regions_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < reach.size() && leaf_[i] < 0; ++k) {
      for (Term t : reach[k]) {
        if (sos_.enabled(t).count(model.noncrit[i])) {
          leaf_[i] = tree_.leaves()[k];
          break;
        }
      }
    }
    if (leaf_[i] < 0) throw Error("no component performs " + model.noncrit[i].str());
    const auto k = std::find(tree_.leaves().begin(), tree_.leaves().end(), leaf_[i]) - tree_.leaves().begin();
    for (Term t : reach[k]) {
      for (const auto& d : sos_.transitions(t)) {
        if (d.label == model.crit[i]) critTargets_[i].insert(canon(d.target));
      }
    }
  }
}

const std::vector<Term>& ProtocolView::subterms(std::size_t state) {
  auto it = subterms_.find(state);
  if (it == subterms_.end()) it = subterms_.emplace(state, tree_.subterms(lts_.states.at(state))).first;
  return it->second;
}

Region ProtocolView::classify(std::size_t i, Term local) {
  auto& cache = regions_[i];
  if (auto it = cache.find(local); it != cache.end()) return it->second;
  Region r = Region::Trying;
  const ActionSet en = sos_.enabled(local);
  if (local.kind() == TermKind::Ident && local.name().base() == "Overflow") {
    r = Region::Overflow;
  } else if (en.count(model_.crit[i])) {
    r = Region::Critical;
  } else if (en.count(model_.noncrit[i])) {
    r = Region::NonCritical;
  } else if (critTargets_[i].count(local)) {
    r = Region::Critical;  // exit protocol after crit
  }
  cache.emplace(local, r);
  return r;
}

Region ProtocolView::region(std::size_t state, std::size_t process) {
  return classify(process, subterms(state)[leaf_.at(process)]);
}

bool ProtocolView::pending(std::size_t state, std::size_t process) {
  const Region r = region(state, process);
  if (r == Region::Trying) return true;
  return r == Region::Critical && sos_.enabled(subterms(state)[leaf_[process]]).count(model_.crit[process]);
}

bool ProtocolView::overflow(std::size_t state) {
  for (std::size_t i = 0; i < processCount(); ++i) {
    if (region(state, i) == Region::Overflow) return true;
  }
  return false;
}

std::optional<std::vector<std::size_t>> shortestPath(const Lts& lts, std::size_t target,
                                                     const std::function<bool(std::size_t)>& allow) {
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> via(lts.stateCount(), none);
  std::vector<bool> seen(lts.stateCount(), false);
  std::deque<std::size_t> q{lts.initial};
  seen[lts.initial] = true;
  while (!q.empty()) {
    const std::size_t s = q.front();
    q.pop_front();
    if (s == target) break;
    for (std::size_t t : lts.outgoing[s]) {
      const std::size_t to = lts.transitions[t].to;
      if (seen[to] || (allow && !allow(to))) continue;
      seen[to] = true;
      via[to] = t;
      q.push_back(to);
    }
  }
  if (!seen[target]) return std::nullopt;
  std::vector<std::size_t> path;
  for (std::size_t s = target; s != lts.initial; s = lts.transitions[via[s]].from) path.push_back(via[s]);
  std::reverse(path.begin(), path.end());
  return path;
}

SafetyVerdict checkSafety(const ProtocolModel& model, const Lts& lts) {
  ProtocolView view(model, lts);
  SafetyVerdict v;
  v.exhaustive = !lts.truncated;
  for (std::size_t s = 0; s < lts.stateCount(); ++s) {
    ++v.statesChecked;
    if (view.overflow(s)) {
      ++v.overflowStates;
      continue;
    }
    std::size_t inCrit = 0;
    for (std::size_t i = 0; i < view.processCount(); ++i) inCrit += view.region(s, i) == Region::Critical;
    if (inCrit >= 2 && v.holds) {
      v.holds = false;
      v.witness = *shortestPath(lts, s);
    }
  }
  return v;
}

namespace {

// Strongly connected components over the transitions accepted by `edge`.
std::vector<std::vector<std::size_t>> sccs(const Lts& lts, const std::function<bool(std::size_t)>& edge) {
  const std::size_t n = lts.stateCount(), none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, none), low(n, 0);
  std::vector<bool> onStack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;
  struct Frame {
    std::size_t state, next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != none) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    onStack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& outs = lts.outgoing[f.state];
      if (f.next < outs.size()) {
        const std::size_t t = outs[f.next++];
        if (!edge(t)) continue;
        const std::size_t w = lts.transitions[t].to;
        if (index[w] == none) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          onStack[w] = true;
          call.push_back({w, 0});
        } else if (onStack[w]) {
          low[f.state] = std::min(low[f.state], index[w]);
        }
        continue;
      }
      const std::size_t v = f.state;
      call.pop_back();
      if (!call.empty()) low[call.back().state] = std::min(low[call.back().state], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          onStack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

struct Candidate {
  bool infinite = false;
  bool starverResting = false;
  std::size_t critLabels = 0;
  std::size_t process = 0;
  std::size_t state = 0;

  // Smaller is preferred.
  auto key() const {
    return std::make_tuple(!infinite, !starverResting, ~critLabels, process, state);
  }
};

// Walk inside `members` via `edges` from `from` to `to`; empty if from == to.
std::optional<std::vector<std::size_t>> walkWithin(const Lts& lts, std::size_t from, std::size_t to,
                                                   const std::function<bool(std::size_t)>& internal) {
  if (from == to) return std::vector<std::size_t>{};
  std::unordered_map<std::size_t, std::size_t> via;
  std::deque<std::size_t> q{from};
  via[from] = static_cast<std::size_t>(-1);
  while (!q.empty()) {
    const std::size_t s = q.front();
    q.pop_front();
    for (std::size_t t : lts.outgoing[s]) {
      if (!internal(t)) continue;
      const std::size_t w = lts.transitions[t].to;
      if (via.count(w)) continue;
      via[w] = t;
      if (w == to) {
        std::vector<std::size_t> path;
        for (std::size_t x = to; x != from; x = lts.transitions[via[x]].from) path.push_back(via[x]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      q.push_back(w);
    }
  }
  return std::nullopt;
}

// Closed walk from `start` that takes every edge in `targets` (in order).
std::vector<std::size_t> coveringCycle(const Lts& lts, std::size_t start, const std::vector<std::size_t>& targets,
                                       const std::function<bool(std::size_t)>& internal) {
  std::vector<std::size_t> cycle;
  std::size_t cur = start;
  for (std::size_t t : targets) {
    auto leg = walkWithin(lts, cur, lts.transitions[t].from, internal);
    cycle.insert(cycle.end(), leg->begin(), leg->end());
    cycle.push_back(t);
    cur = lts.transitions[t].to;
  }
  auto back = walkWithin(lts, cur, start, internal);
  cycle.insert(cycle.end(), back->begin(), back->end());
  return cycle;
}

// Closed walk from `start` that repeatedly heads for the nearest edge with
// `gains(t)`, recording each taken edge with `take`.
std::vector<std::size_t> greedyCycle(const Lts& lts, std::size_t start,
                                     const std::function<bool(std::size_t)>& internal,
                                     const std::function<bool(std::size_t)>& gains,
                                     const std::function<void(std::size_t)>& take) {
  std::vector<std::size_t> cycle;
  std::size_t cur = start;
  for (;;) {
    std::unordered_map<std::size_t, std::size_t> via{{cur, static_cast<std::size_t>(-1)}};
    std::deque<std::size_t> q{cur};
    std::optional<std::size_t> hit;
    while (!q.empty() && !hit) {
      const std::size_t s = q.front();
      q.pop_front();
      for (std::size_t t : lts.outgoing[s]) {
        if (!internal(t)) continue;
        if (gains(t)) {
          hit = t;
          break;
        }
        const std::size_t w = lts.transitions[t].to;
        if (via.emplace(w, t).second) q.push_back(w);
      }
    }
    if (!hit) break;
    std::vector<std::size_t> leg{*hit};
    for (std::size_t x = lts.transitions[*hit].from; x != cur; x = lts.transitions[via[x]].from) leg.push_back(via[x]);
    std::reverse(leg.begin(), leg.end());
    for (std::size_t t : leg) take(t);
    cycle.insert(cycle.end(), leg.begin(), leg.end());
    cur = lts.transitions[*hit].to;
  }
  auto back = walkWithin(lts, cur, start, internal);
  cycle.insert(cycle.end(), back->begin(), back->end());
  return cycle;
}

}  // namespace

LivenessVerdict checkLiveness(const ProtocolModel& model, const Lts& lts, LivenessBudget budget) {
  ProtocolView view(model, lts);
  SosEngine sos(model.env);
  const auto& tree = view.tree();
  const std::size_t nodes = tree.nodes().size();
  LivenessVerdict v;
  std::vector<bool> allowed(lts.stateCount());
  for (std::size_t s = 0; s < lts.stateCount(); ++s) allowed[s] = !view.overflow(s);
  auto allow = [&](std::size_t s) { return bool(allowed[s]); };

  std::optional<Candidate> best;
  std::vector<std::size_t> bestComp;
  auto consider = [&](Candidate c, std::vector<std::size_t> comp) {
    if (!best || c.key() < best->key()) {
      best = c;
      bestComp = std::move(comp);
    }
  };
  auto overBudget = [&] { return v.candidatesExamined > budget.maxCandidates; };

  for (std::size_t i = 0; i < view.processCount() && !overBudget(); ++i) {
    const int myLeaf = view.leafOf(i);
    auto edge = [&](std::size_t t) {
      const auto& tr = lts.transitions[t];
      return allowed[tr.from] && allowed[tr.to] && !(tr.label == model.crit[i]);
    };
    for (auto& comp : sccs(lts, edge)) {
      if (!allowed[comp.front()]) continue;
      std::unordered_set<std::size_t> members(comp.begin(), comp.end());
      std::vector<bool> moving(nodes, false);
      std::set<Action> crits;
      bool hasEdge = false;
      for (std::size_t s : comp) {
        for (std::size_t t : lts.outgoing[s]) {
          if (!edge(t) || !members.count(lts.transitions[t].to)) continue;
          hasEdge = true;
          for (int leaf : movingLeaves(lts, t, tree)) moving[leaf] = true;
          if (std::count(model.crit.begin(), model.crit.end(), lts.transitions[t].label)) {
            crits.insert(lts.transitions[t].label);
          }
        }
      }
      if (!hasEdge) continue;
      ++v.candidatesExamined;
      if (overBudget()) break;
      auto start = std::find_if(comp.begin(), comp.end(), [&](std::size_t s) { return view.pending(s, i); });
      if (start == comp.end()) continue;
      const JustnessVerdict j = evaluateJustness(tree, view.subterms(*start), moving, model.env, sos);
      if (!j.just) continue;
      consider({true, !moving[myLeaf], crits.size(), i, *start}, comp);
    }
    for (std::size_t s = 0; s < lts.stateCount() && !overBudget(); ++s) {
      if (!allowed[s] || !view.pending(s, i)) continue;
      const ActionSet en = sos.enabled(lts.states[s]);
      if (!std::all_of(en.begin(), en.end(), [&](const Action& a) { return model.env.isBlocking(a); })) continue;
      ++v.candidatesExamined;
      const std::vector<bool> still(nodes, false);
      if (!evaluateJustness(tree, view.subterms(s), still, model.env, sos).just) continue;
      consider({false, true, 0, i, s}, {s});
    }
  }

  if (overBudget()) {
    v.status = LivenessStatus::Unknown;
    v.exhaustive = false;
    v.note = "candidate budget exhausted after " + std::to_string(v.candidatesExamined) + " candidates";
    return v;
  }
  v.exhaustive = !lts.truncated;
  if (!best) {
    v.status = lts.truncated ? LivenessStatus::Unknown : LivenessStatus::Holds;
    v.note = lts.truncated ? "no counterexample within the explored bound" : "no just counterexample";
    return v;
  }

  const Candidate c = *best;
  Lasso lasso;
  lasso.stem = *shortestPath(lts, c.state, allow);
  if (c.infinite) {
    const auto& comp = bestComp;
    std::unordered_set<std::size_t> members(comp.begin(), comp.end());
    auto internal = [&](std::size_t t) {
      const auto& tr = lts.transitions[t];
      return members.count(tr.from) && members.count(tr.to) && !(tr.label == model.crit[c.process]);
    };
    std::vector<std::size_t> all;
    std::set<int> needLeaves;
    std::set<Action> needCrit;
    for (std::size_t s : comp) {
      for (std::size_t t : lts.outgoing[s]) {
        if (!internal(t)) continue;
        all.push_back(t);
        for (int leaf : movingLeaves(lts, t, tree)) needLeaves.insert(leaf);
        const Action& a = lts.transitions[t].label;
        if (std::count(model.crit.begin(), model.crit.end(), a)) needCrit.insert(a);
      }
    }
    auto gains = [&](std::size_t t) {
      if (needCrit.count(lts.transitions[t].label)) return true;
      for (int leaf : movingLeaves(lts, t, tree)) {
        if (needLeaves.count(leaf)) return true;
      }
      return false;
    };
    auto take = [&](std::size_t t) {
      needCrit.erase(lts.transitions[t].label);
      for (int leaf : movingLeaves(lts, t, tree)) needLeaves.erase(leaf);
    };
    lasso.cycle = greedyCycle(lts, c.state, internal, gains, take);
    if (!isJust(lts, lasso, model.env).just) lasso.cycle = coveringCycle(lts, c.state, all, internal);
  }
  v.status = LivenessStatus::Violated;
  v.starvingProcess = c.process;
  v.justness = isJust(lts, lasso, model.env);
  v.counterexample = std::move(lasso);
  v.note = std::string(c.infinite ? "just infinite path" : "just complete finite path") + " starving process " +
           std::to_string(c.process) + " (" + model.noncrit[c.process].str() + ")";
  return v;
}

PathReport classifyPath(const ProtocolModel& model, const Lts& lts, const Lasso& lasso) {
  PathReport r;
  r.justness = isJust(lts, lasso, model.env);
  r.complete = isComplete(lts, lasso, model.env);
  ProtocolView view(model, lts);
  const std::size_t loop = lassoLoopState(lts, lasso);
  for (std::size_t i = 0; i < view.processCount(); ++i) {
    bool crit = false, noncrit = false;
    for (std::size_t t : lasso.cycle) {
      crit |= lts.transitions[t].label == model.crit[i];
      noncrit |= lts.transitions[t].label == model.noncrit[i];
    }
    if (!crit && (noncrit || view.pending(loop, i))) r.livenessOk = false;
  }
  return r;
}

ReplayResult replay(const Environment& env, Term root, const Lts& lts, const std::vector<std::size_t>& path) {
  SosEngine sos(env);
  Canonicalizer canon(env);
  if (canon(root) != lts.states.at(lts.initial)) return {false, "initial state differs from the root"};
  std::size_t cur = lts.initial;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k] >= lts.transitions.size()) return {false, "step " + std::to_string(k) + ": no such transition"};
    const auto& tr = lts.transitions[path[k]];
    if (tr.from != cur) return {false, "step " + std::to_string(k) + " does not start at the current state"};
    const auto& ds = sos.transitions(lts.states[cur]);
    const bool found = std::any_of(ds.begin(), ds.end(), [&](const TransitionDerivation& d) {
      return d.label == tr.label && d.participants == tr.participants && d.signalPartner == tr.signalPartner &&
             canon(d.target) == lts.states[tr.to];
    });
    if (!found) return {false, "step " + std::to_string(k) + " (" + tr.label.str() + ") is not derivable"};
    cur = tr.to;
  }
  return {true, "replayed " + std::to_string(path.size()) + " steps"};
}

ReplayResult replay(const Environment& env, Term root, const Lts& lts, const Lasso& lasso) {
  std::vector<std::size_t> path = lasso.stem;
  path.insert(path.end(), lasso.cycle.begin(), lasso.cycle.end());
  ReplayResult r = replay(env, root, lts, path);
  if (r.ok && !lasso.cycle.empty() &&
      lts.transitions[lasso.cycle.back()].to != lts.transitions[lasso.cycle.front()].from) {
    return {false, "cycle does not close"};
  }
  return r;
}

namespace {

nlohmann::ordered_json steps(const Lts& lts, const std::vector<std::size_t>& path) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (std::size_t t : path) {
    const auto& tr = lts.transitions[t];
    out.push_back({{"transition", t}, {"from", tr.from}, {"label", tr.label.str()}, {"to", tr.to}});
  }
  return out;
}

}  // namespace

std::string toJson(const SafetyVerdict& v, const Lts& lts) {
  nlohmann::ordered_json doc = {{"property", "safety"},
                                {"holds", v.holds},
                                {"exhaustive", v.exhaustive},
                                {"statesChecked", v.statesChecked},
                                {"overflowStates", v.overflowStates}};
  doc["witness"] = v.holds ? nlohmann::ordered_json(nullptr) : steps(lts, v.witness);
  return doc.dump(2) + "\n";
}

std::string toJson(const LivenessVerdict& v, const Lts& lts) {
  nlohmann::ordered_json doc = {{"property", "liveness"},
                                {"status", toString(v.status)},
                                {"exhaustive", v.exhaustive},
                                {"candidatesExamined", v.candidatesExamined},
                                {"note", v.note}};
  if (v.counterexample) {
    doc["starvingProcess"] = v.starvingProcess;
    doc["counterexample"] = {{"stem", steps(lts, v.counterexample->stem)},
                             {"cycle", steps(lts, v.counterexample->cycle)}};
  } else {
    doc["counterexample"] = nullptr;
  }
  doc["justness"] = v.justness ? nlohmann::ordered_json::parse(toJson(*v.justness)) : nlohmann::ordered_json(nullptr);
  return doc.dump(2) + "\n";
}

}  // namespace ccss
