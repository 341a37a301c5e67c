// Acceptance criteria 1-9: one PASS/FAIL line each, exit status 1 on any FAIL.

#include <algorithm>
#include <bitset>
#include <chrono>
#include <deque>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ccss/bisimulation.hpp"
#include "ccss/justness.hpp"
#include "ccss/parser.hpp"
#include "ccss/protocols.hpp"
#include "ccss/verifier.hpp"

using namespace ccss;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int n, Outcome& o, double seconds, double limit) {
  o.require(seconds < limit, "time limit " + std::to_string(limit) + "s");
  std::cout << "criterion " << n << ": " << (o.ok ? "PASS" : "FAIL") << " (" << o.detail.str() << ") ["
            << seconds << "s]" << std::endl;
  if (!o.ok) ++failures;
}

// Witnesses collected by criteria 3-6 for criterion 9.
struct Witness {
  std::string what;
  const ProtocolModel* model;
  const Lts* lts;
  std::vector<std::size_t> path;
  std::optional<Lasso> lasso;
};
std::vector<Witness> witnesses;
std::deque<ProtocolModel> keptModels;
std::deque<Lts> keptLts;

// ---------------------------------------------------------------------------
// Oracles shared by the protocol criteria.

// States offering two different crit actions at once.
std::size_t doubleOccupancy(const ProtocolModel& m, const Lts& lts, bool skipOverflow) {
  std::size_t bad = 0;
  for (std::size_t s = 0; s < lts.stateCount(); ++s) {
    if (skipOverflow && print(lts.states[s]).find("Overflow") != std::string::npos) continue;
    std::set<Action> crits;
    for (std::size_t t : lts.outgoing[s]) {
      const Action& a = lts.transitions[t].label;
      if (std::find(m.crit.begin(), m.crit.end(), a) != m.crit.end()) crits.insert(a);
    }
    bad += crits.size() >= 2;
  }
  return bad;
}

std::vector<std::size_t> bfsPath(const Lts& lts, std::size_t target) {
  std::vector<long> via(lts.stateCount(), -1);
  std::vector<bool> seen(lts.stateCount());
  std::deque<std::size_t> q{lts.initial};
  seen[lts.initial] = true;
  while (!q.empty()) {
    std::size_t s = q.front();
    q.pop_front();
    for (std::size_t t : lts.outgoing[s]) {
      std::size_t w = lts.transitions[t].to;
      if (!seen[w]) {
        seen[w] = true;
        via[w] = static_cast<long>(t);
        q.push_back(w);
      }
    }
  }
  std::vector<std::size_t> path;
  for (std::size_t s = target; s != lts.initial; s = lts.transitions[via[s]].from) path.push_back(via[s]);
  return {path.rbegin(), path.rend()};
}

// Per state and process: may the process have performed noncrit without a
// later crit on some path to this state?
std::vector<std::vector<bool>> waiting(const ProtocolModel& m, const Lts& lts) {
  const std::size_t n = m.noncrit.size();
  std::vector<std::vector<bool>> w(lts.stateCount(), std::vector<bool>(n));
  std::vector<std::vector<bool>> idle(lts.stateCount(), std::vector<bool>(n));
  std::deque<std::pair<std::size_t, std::pair<std::size_t, bool>>> q;
  for (std::size_t i = 0; i < n; ++i) {
    idle[lts.initial][i] = true;
    q.push_back({lts.initial, {i, false}});
  }
  while (!q.empty()) {
    auto [s, iv] = q.front();
    auto [i, wait] = iv;
    q.pop_front();
    for (std::size_t t : lts.outgoing[s]) {
      const auto& tr = lts.transitions[t];
      bool next = wait;
      if (tr.label == m.noncrit[i]) next = true;
      if (tr.label == m.crit[i]) next = false;
      auto slot = next ? w[tr.to][i] : idle[tr.to][i];
      if (!slot) {
        slot = true;
        q.push_back({tr.to, {i, next}});
      }
    }
  }
  return w;
}

struct CycleSearch {
  bool violation = false;
  bool complete = true;  // false if a bound was hit
  bool aborted = false;  // step budget exhausted
  std::size_t cycles = 0;
};

// Reference search: every simple cycle up to maxLen without crit[i] through a
// state where i may be waiting, and every deadlocked waiting state, checked
// with isJust / isComplete.
CycleSearch simpleCycleSearch(const ProtocolModel& m, const Lts& lts, std::size_t maxLen, std::size_t maxSteps) {
  CycleSearch out;
  const auto wait = waiting(m, lts);
  std::size_t steps = 0;
  for (std::size_t i = 0; i < m.noncrit.size() && !out.violation; ++i) {
    for (std::size_t s = 0; s < lts.stateCount(); ++s) {
      if (!wait[s][i] || !lts.outgoing[s].empty()) continue;
      if (print(lts.states[s]).find("Overflow") != std::string::npos) continue;
      Lasso l{bfsPath(lts, s), {}};
      if (isComplete(lts, l, m.env) && isJust(lts, l, m.env).just) out.violation = true;
    }
    // Strongly connected components without crit[i]: a cycle never leaves one.
    std::vector<long> comp(lts.stateCount(), -1), low(lts.stateCount()), idx(lts.stateCount(), -1);
    std::vector<std::size_t> tstack;
    std::vector<bool> onT(lts.stateCount());
    long counter = 0, comps = 0;
    std::function<void(std::size_t)> tarjan = [&](std::size_t v) {
      idx[v] = low[v] = counter++;
      tstack.push_back(v);
      onT[v] = true;
      for (std::size_t t : lts.outgoing[v]) {
        const auto& tr = lts.transitions[t];
        if (tr.label == m.crit[i]) continue;
        if (idx[tr.to] < 0) {
          tarjan(tr.to);
          low[v] = std::min(low[v], low[tr.to]);
        } else if (onT[tr.to]) {
          low[v] = std::min(low[v], idx[tr.to]);
        }
      }
      if (low[v] == idx[v]) {
        std::size_t w;
        do {
          w = tstack.back();
          tstack.pop_back();
          onT[w] = false;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
    };
    for (std::size_t v = 0; v < lts.stateCount(); ++v)
      if (idx[v] < 0) tarjan(v);
    std::vector<std::size_t> stack;
    std::vector<bool> onPath(lts.stateCount());
    std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t start, std::size_t cur) {
      if (out.violation || out.aborted) return;
      if (++steps > maxSteps) {
        out.complete = false;
        out.aborted = true;
        return;
      }
      for (std::size_t t : lts.outgoing[cur]) {
        const auto& tr = lts.transitions[t];
        if (tr.label == m.crit[i] || tr.to < start || comp[tr.to] != comp[start]) continue;
        if (tr.to == start) {
          stack.push_back(t);
          ++out.cycles;
          bool anyWait = false;
          for (std::size_t u : stack) anyWait |= wait[lts.transitions[u].from][i];
          if (anyWait && isJust(lts, Lasso{bfsPath(lts, start), stack}, m.env).just) out.violation = true;
          stack.pop_back();
          continue;
        }
        if (onPath[tr.to]) continue;
        if (stack.size() + 1 >= maxLen) {
          out.complete = false;
          continue;
        }
        onPath[tr.to] = true;
        stack.push_back(t);
        dfs(start, tr.to);
        stack.pop_back();
        onPath[tr.to] = false;
      }
    };
    for (std::size_t s = 0; s < lts.stateCount() && !out.violation && !out.aborted; ++s) {
      if (print(lts.states[s]).find("Overflow") != std::string::npos) continue;
      onPath[s] = true;
      dfs(s, s);
      onPath[s] = false;
    }
  }
  return out;
}

// Leaf path of a participant: segments before the first agent unfolding.
std::string leafPrefix(const ComponentPath& p) {
  std::string s = toString(p);
  auto at = s.find("@");
  return at == std::string::npos ? s : s.substr(0, at);
}

const ProtocolModel& keep(ProtocolModel m) {
  keptModels.push_back(std::move(m));
  return keptModels.back();
}
const Lts& keep(Lts l) {
  keptLts.push_back(std::move(l));
  return keptLts.back();
}

// ---------------------------------------------------------------------------

void criterion1() {
  auto t0 = Clock::now();
  Outcome o;
  ProtocolModel m = example1();
  Lts lts = explore(m.env, m.root);
  std::size_t loops = 0, toTerminal = 0;
  for (const auto& t : lts.transitions) {
    if (!t.label.isTau()) continue;
    if (t.from == t.to) ++loops;
    else if (lts.outgoing[t.to].empty()) ++toTerminal;
  }
  o.detail << lts.stateCount() << " states, " << lts.transitions.size() << " transitions, " << loops
           << " tau self-loop, " << toTerminal << " tau to terminal";
  o.require(lts.stateCount() == 2 && lts.transitions.size() == 2 && loops == 1 && toTerminal == 1, "shape");
  report(1, o, since(t0), 1.0);
}

void criterion2() {
  auto t0 = Clock::now();
  Outcome o;
  ProtocolModel m1 = example1(), m2 = example2();
  Lts a = explore(m1.env, m1.root), b = explore(m2.env, m2.root);
  // Both are in breadth-first order from the initial state, so equal
  // structure means equal (from, label, to) multisets.
  auto shape = [](const Lts& l) {
    std::multiset<std::tuple<std::size_t, std::string, std::size_t>> s;
    for (const auto& t : l.transitions) s.insert({t.from, t.label.str(), t.to});
    return s;
  };
  o.require(a.stateCount() == b.stateCount() && shape(a) == shape(b), "same transition structure");
  auto readerLoop = [](const Lts& l) {
    for (std::size_t t = 0; t < l.transitions.size(); ++t)
      if (l.transitions[t].from == l.transitions[t].to) return t;
    return l.transitions.size();
  };
  JustnessVerdict v1 = isJust(a, Lasso{{}, {readerLoop(a)}}, m1.env);
  JustnessVerdict v2 = isJust(b, Lasso{{}, {readerLoop(b)}}, m2.env);
  o.require(v1.just, "reader-only path just with plain reads");
  o.require(!v2.just && v2.witness && v2.witness->clause == JustnessClause::Handshake,
            "reader-only path unjust with signals via X ∩ Z̄_H ≠ ∅");
  o.detail << "structure equal; example1 " << (v1.just ? "just" : "unjust") << "; example2 "
           << (v2.just ? "just" : "unjust");
  if (v2.witness) o.detail << " at " << v2.witness->node << " clause " << toString(v2.witness->clause);
  report(2, o, since(t0), 1.0);
}

void criterion3() {
  auto t0 = Clock::now();
  Outcome o;
  for (Flavor f : {Flavor::Ccs, Flavor::Ccss}) {
    const ProtocolModel& m = keep(peterson2(f));
    const Lts& lts = keep(explore(m.env, m.root));
    SafetyVerdict v = checkSafety(m, lts);
    const std::size_t dbl = doubleOccupancy(m, lts, false);
    o.require(!lts.truncated && v.holds && v.exhaustive && dbl == 0, toString(f) + " safety");
    o.detail << toString(f) << ": " << lts.stateCount() << " states, " << dbl << " double-occupancy; ";
    if (!v.holds) witnesses.push_back({"peterson safety " + toString(f), &m, &lts, v.witness, std::nullopt});
  }
  report(3, o, since(t0), 10.0);
}

void criterion4() {
  auto t0 = Clock::now();
  Outcome o;
  {
    const ProtocolModel& m = keep(peterson2(Flavor::Ccs));
    const Lts& lts = keep(explore(m.env, m.root));
    LivenessVerdict v = checkLiveness(m, lts);
    o.require(v.status == LivenessStatus::Violated && v.counterexample, "ccs violated");
    if (v.counterexample) {
      const Lasso& l = *v.counterexample;
      JustnessVerdict j = isJust(lts, l, m.env);
      o.require(j.just && j.minimalY.empty(), "counterexample is ∅-just");
      o.require(isComplete(lts, l, m.env), "counterexample complete");
      bool crit = false;
      for (std::size_t t : l.cycle) crit |= lts.transitions[t].label == m.crit[v.starvingProcess];
      o.require(!crit, "cycle lacks crit of the starving process");
      witnesses.push_back({"peterson ccs liveness", &m, &lts, {}, l});
      o.detail << "ccs: violated, lasso stem " << l.stem.size() << " cycle " << l.cycle.size() << ", minimal Y "
               << toString(j.minimalY) << "; ";
    }
    CycleSearch ref = simpleCycleSearch(m, lts, lts.stateCount() + 1, 50'000'000);
    o.require(ref.violation, "reference cycle search also finds a violation");
  }
  {
    const ProtocolModel& m = keep(peterson2(Flavor::Ccss));
    const Lts& lts = keep(explore(m.env, m.root));
    LivenessVerdict v = checkLiveness(m, lts);
    o.require(v.status == LivenessStatus::Holds && v.exhaustive, "ccss holds exhaustively");
    CycleSearch ref = simpleCycleSearch(m, lts, lts.stateCount() + 1, 50'000'000);
    o.require(!ref.violation && ref.complete, "reference cycle search finds nothing");
    o.detail << "ccss: " << toString(v.status) << (v.exhaustive ? " (exhaustive)" : " (bounded)") << ", "
             << ref.cycles << " simple cycles cross-checked";
  }
  report(4, o, since(t0), 60.0);
}

void criterion5() {
  auto t0 = Clock::now();
  Outcome o;
  const ProtocolModel& m = keep(filterLock(3, Flavor::Ccss));
  const Lts& lts = keep(explore(m.env, m.root));
  SafetyVerdict s = checkSafety(m, lts);
  const std::size_t dbl = doubleOccupancy(m, lts, false);
  o.require(s.holds && dbl == 0, "safety");
  LivenessVerdict v = checkLiveness(m, lts);
  o.require(v.status == LivenessStatus::Violated && v.counterexample, "liveness violated");
  o.detail << lts.stateCount() << " states, safety " << (s.holds ? "holds" : "violated") << " ("
           << (s.exhaustive ? "exhaustive" : "bounded") << "), liveness " << toString(v.status) << " ("
           << (v.exhaustive ? "exhaustive" : "bounded") << ")";
  if (v.counterexample) {
    const Lasso& l = *v.counterexample;
    const std::size_t i = v.starvingProcess;
    o.require(isJust(lts, l, m.env).just && isComplete(lts, l, m.env), "lasso just and complete");
    std::string starver;
    for (const auto& t : lts.transitions) {
      if (t.label == m.noncrit[i]) {
        starver = leafPrefix(t.participants.at(0));
        break;
      }
    }
    bool starverMoves = false;
    std::set<Action> crits;
    for (std::size_t t : l.cycle) {
      for (const auto& p : lts.transitions[t].participants) starverMoves |= leafPrefix(p) == starver;
      const Action& a = lts.transitions[t].label;
      if (std::find(m.crit.begin(), m.crit.end(), a) != m.crit.end()) crits.insert(a);
    }
    o.require(!starver.empty() && !starverMoves, "starving process makes no transition in the cycle");
    bool othersPass = true;
    for (std::size_t j = 0; j < m.crit.size(); ++j) {
      if (j != i) othersPass &= crits.count(m.crit[j]) > 0;
    }
    o.require(othersPass && !crits.count(m.crit[i]), "the other two each pass crit");
    o.detail << "; process " << i << " (" << starver << ") idle while " << toString(ActionSet(crits.begin(), crits.end()))
             << " alternate, cycle length " << l.cycle.size();
    witnesses.push_back({"filter3 liveness", &m, &lts, {}, l});
  }
  report(5, o, since(t0), 600.0);
}

void criterion6() {
  auto t0 = Clock::now();
  Outcome o;
  const ProtocolModel& m = keep(bakery(2, 4));
  const Lts& lts = keep(explore(m.env, m.root));
  SafetyVerdict s = checkSafety(m, lts);
  const std::size_t dbl = doubleOccupancy(m, lts, true);
  o.require(s.holds && s.exhaustive && dbl == 0, "safety on non-Overflow states");
  LivenessVerdict v = checkLiveness(m, lts);
  o.require(v.status == LivenessStatus::Holds && v.exhaustive, "no just counterexample avoiding Overflow");
  CycleSearch ref = simpleCycleSearch(m, lts, lts.stateCount() + 1, 20'000'000);
  o.require(!ref.violation, "reference cycle search finds nothing");
  o.detail << lts.stateCount() << " states (" << s.overflowStates << " Overflow), safety "
           << (s.holds ? "holds" : "violated") << ", liveness " << toString(v.status)
           << (v.exhaustive ? " (exhaustive)" : " (bounded)") << ", reference search " << ref.cycles << " cycles"
           << (ref.complete ? " (complete)" : " (bounded)");
  if (!s.holds) witnesses.push_back({"bakery safety", &m, &lts, s.witness, std::nullopt});
  report(6, o, since(t0), 600.0);
}

// ---------------------------------------------------------------------------
// Criterion 7: algebraic laws on random closed terms.

Term randomTerm(std::mt19937& rng, int depth) {
  static const std::vector<Name> names{Name("a"), Name("b"), Name("c"), Name("d")};
  static const std::vector<Name> sigs{Name("s"), Name("t")};
  auto nm = [&] { return names[rng() % names.size()]; };
  auto sg = [&] { return sigs[rng() % sigs.size()]; };
  if (depth <= 1 || rng() % 5 == 0) {
    switch (rng() % 3) {
      case 0: return nil();
      case 1: return prefix(Action::handshake(nm()), nil());
      default: return signalling(nil(), sg());
    }
  }
  switch (rng() % 10) {
    case 0: return prefix(Action::tau(), randomTerm(rng, depth - 1));
    case 1: return prefix(Action::handshake(nm()), randomTerm(rng, depth - 1));
    case 2: return prefix(Action::coname(nm()), randomTerm(rng, depth - 1));
    case 3: return prefix(Action::signal(sg()), randomTerm(rng, depth - 1));
    case 4: return sum({randomTerm(rng, depth - 1), randomTerm(rng, depth - 1)});
    case 5: return par(randomTerm(rng, depth - 1), randomTerm(rng, depth - 1));
    case 6: return restrict(randomTerm(rng, depth - 1), {rng() % 2 ? nm() : sg()});
    case 7: return relabel(randomTerm(rng, depth - 1), Relabelling({{nm(), nm()}}, {}));
    case 8: return relabel(randomTerm(rng, depth - 1), Relabelling({}, {{Name("s"), Name("t")}}));
    default: return signalling(randomTerm(rng, depth - 1), sg());
  }
}

int depthOf(Term t) {
  int d = 0;
  for (Term c : t.children()) d = std::max(d, depthOf(c));
  return d + 1;
}

// Naive greatest fixed point on the disjoint union of two systems.
bool naiveBisimilar(const Lts& a, const Lts& b) {
  const std::size_t na = a.stateCount(), n = na + b.stateCount();
  auto sig = [&](std::size_t s) -> const SignalSet& { return s < na ? a.stateSignals[s] : b.stateSignals[s - na]; };
  auto succ = [&](std::size_t s) {
    std::vector<std::pair<Action, std::size_t>> out;
    const Lts& l = s < na ? a : b;
    const std::size_t off = s < na ? 0 : na, local = s - off;
    for (std::size_t t : l.outgoing[local]) out.emplace_back(l.transitions[t].label, l.transitions[t].to + off);
    return out;
  };
  std::vector<std::vector<std::pair<Action, std::size_t>>> out(n);
  for (std::size_t s = 0; s < n; ++s) out[s] = succ(s);
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) rel[p][q] = sig(p) == sig(q);
  auto transfers = [&](std::size_t p, std::size_t q) {
    for (const auto& [x, pt] : out[p]) {
      bool ok = false;
      for (const auto& [y, qt] : out[q]) {
        if (x == y && rel[pt][qt]) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        if (rel[p][q] && !(transfers(p, q) && transfers(q, p))) {
          rel[p][q] = false;
          changed = true;
        }
  }
  return rel[a.initial][na + b.initial];
}

void criterion7() {
  auto t0 = Clock::now();
  Outcome o;
  Environment env = loadSpec("signals { s, t }\nsystem = 0\n");
  std::mt19937 rng(2024);
  const auto contexts = [&](Term r) {
    return singleOperatorContexts({Name("a"), Name("b"), Name("c"), Name("d")}, {Name("s"), Name("t")},
                                  {r, signalling(nil(), Name("s"))});
  };
  std::size_t terms = 0, lawFails = 0, congFails = 0, encFails = 0, contextsChecked = 0, encChecked = 0;
  ExploreOptions small;
  small.maxStates = 2000;
  while (terms < 500) {
    Term p = randomTerm(rng, 3), q = randomTerm(rng, 3), r = randomTerm(rng, 3);
    Lts lp = explore(env, p, small), lq = explore(env, q, small), lr = explore(env, r, small);
    if (lp.truncated || lq.truncated || lr.truncated) continue;
    ++terms;
    auto lts = [&](Term t) { return explore(env, t); };
    auto same = [&](Term x, Term y) { return naiveBisimilar(lts(x), lts(y)); };
    const Term pq = par(p, q), qp = par(q, p);
    const Name s("s"), t("t");
    bool laws = depthOf(pq) <= 5 && same(pq, qp) && same(par(pq, r), par(p, par(q, r))) &&
                same(signalling(signalling(p, s), t), signalling(signalling(p, t), s));
    lawFails += !laws;
    for (const auto& [x, y] : {std::pair{pq, qp}, std::pair{sum({p, q}), sum({q, p})}}) {
      CongruenceReport c = checkCongruence(env, x, y, contexts(r));
      contextsChecked += c.checked;
      congFails += !c.premise || !c.failures.empty();
    }
    for (const auto& [x, y] : {std::pair{pq, qp}, std::pair{p, q}, std::pair{sum({p, r}), sum({q, r})},
                               std::pair{signalling(p, s), p}}) {
      EncodingReport e = checkEncoding(env, x, y);
      // Oracle for the original side: the naive fixed point.
      encFails += !e.faithful() || e.original != same(x, y);
      ++encChecked;
    }
  }
  o.require(lawFails == 0, "laws");
  o.require(congFails == 0, "congruence");
  o.require(encFails == 0, "encoding");
  o.detail << terms << " term triples; law failures " << lawFails << "; " << contextsChecked
           << " context checks, failures " << congFails << "; " << encChecked << " encoding checks, failures "
           << encFails;
  report(7, o, since(t0), 300.0);
}

// ---------------------------------------------------------------------------
// Criterion 8: bottom-up justness against literal clause enumeration.
//
// Actions a, 'a, b, 'b and the signal read s are bits 0..4 of Y; the
// signalling universe is {s}.

constexpr int kActs = 5;
using YSet = std::bitset<1 << kActs>;
using SSet = std::bitset<2>;

int bitOf(const Action& a) {
  if (a.isSignal()) return 4;
  const int base = a.name.base() == "a" ? 0 : 2;
  return base + (a.kind == ActionKind::CoName);
}

Action actOf(int bit) {
  if (bit == 4) return Action::signal(Name("s"));
  Name n(bit < 2 ? "a" : "b");
  return bit % 2 ? Action::coname(n) : Action::handshake(n);
}

struct ONode {
  enum Kind { Leaf, Par, Res, Rel } kind = Leaf;
  std::string path;
  int l = -1, r = -1;
  Term term;
  std::vector<Name> restriction;
  Relabelling f;
};

std::string joinPath(const std::string& p, const char* s) { return p == "." ? s : p + "/" + s; }

int buildTree(std::vector<ONode>& nodes, Term t, std::string path) {
  const int id = static_cast<int>(nodes.size());
  nodes.push_back({});
  nodes[id].path = path;
  nodes[id].term = t;
  if (!hasStaticPar(t)) return id;
  std::string p = path;
  while (t.kind() == TermKind::Signal) {
    t = t.body();
    p = joinPath(p, "sig");
  }
  if (t.kind() == TermKind::Par) {
    nodes[id].kind = ONode::Par;
    int l = buildTree(nodes, t.left(), joinPath(p, "L"));
    int r = buildTree(nodes, t.right(), joinPath(p, "R"));
    nodes[id].l = l;
    nodes[id].r = r;
  } else if (t.kind() == TermKind::Restrict) {
    nodes[id].kind = ONode::Res;
    nodes[id].restriction.assign(t.restriction().begin(), t.restriction().end());
    int c = buildTree(nodes, t.body(), joinPath(p, "res"));
    nodes[id].l = c;
  } else {
    nodes[id].kind = ONode::Rel;
    nodes[id].f = t.relabelling();
    int c = buildTree(nodes, t.body(), joinPath(p, "rel"));
    nodes[id].l = c;
  }
  return id;
}

int leafOfPath(const std::vector<ONode>& nodes, const std::string& participant) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind != ONode::Leaf) continue;
    const std::string& p = nodes[i].path;
    if (p == "." || participant == p || participant.rfind(p + "/", 0) == 0) return static_cast<int>(i);
  }
  return -1;
}

int coMask(int y) {
  int out = y & 16;
  for (int b = 0; b < 4; ++b)
    if (y >> b & 1) out |= 1 << (b ^ 1);
  return out;
}

struct Sets {
  YSet just;
  SSet sig;
};

Sets evalNode(const std::vector<ONode>& nodes, int id, const std::vector<bool>& moving, SosEngine& sos) {
  const ONode& nd = nodes[id];
  Sets out;
  switch (nd.kind) {
    case ONode::Leaf: {
      if (moving[id]) {
        out.just.set();
        out.sig.set();
        return out;
      }
      int need = 0;
      bool tau = false;
      for (const Action& a : sos.enabled(nd.term)) {
        if (a.isTau()) tau = true;
        else need |= 1 << bitOf(a);
      }
      for (int y = 0; y < (1 << kActs); ++y) out.just[y] = !tau && (y & need) == need;
      const bool emits = sos.signals(nd.term).count(Name("s")) > 0;
      out.sig[0] = !emits;
      out.sig[1] = true;
      return out;
    }
    case ONode::Par: {
      Sets l = evalNode(nodes, nd.l, moving, sos), r = evalNode(nodes, nd.r, moving, sos);
      for (int x = 0; x < (1 << kActs); ++x) {
        if (!l.just[x]) continue;
        for (int xs = 0; xs < 2; ++xs) {
          if (!l.sig[xs]) continue;
          for (int z = 0; z < (1 << kActs); ++z) {
            if (!r.just[z]) continue;
            for (int zs = 0; zs < 2; ++zs) {
              if (!r.sig[zs]) continue;
              const bool c1 = (x & coMask(z) & 15) == 0;
              const bool c2 = !((x & 16) && zs);
              const bool c3 = !(xs && (z & 16));
              if (!(c1 && c2 && c3)) continue;
              for (int y = 0; y < (1 << kActs); ++y)
                if ((y & (x | z)) == (x | z)) out.just[y] = true;
            }
          }
        }
      }
      for (int xs = 0; xs < 2; ++xs)
        for (int zs = 0; zs < 2; ++zs)
          if (l.sig[xs] && r.sig[zs])
            for (int ys = 0; ys < 2; ++ys)
              if ((ys | xs | zs) == ys) out.sig[ys] = true;
      return out;
    }
    case ONode::Res: {
      Sets c = evalNode(nodes, nd.l, moving, sos);
      int lm = 0, ls = 0;
      for (Name n : nd.restriction) {
        if (n.base() == "a") lm |= 3;
        if (n.base() == "b") lm |= 12;
        if (n.base() == "s") {
          lm |= 16;
          ls = 1;
        }
      }
      for (int y = 0; y < (1 << kActs); ++y) out.just[y] = c.just[y | lm];
      for (int ys = 0; ys < 2; ++ys) out.sig[ys] = c.sig[ys | ls];
      return out;
    }
    case ONode::Rel: {
      Sets c = evalNode(nodes, nd.l, moving, sos);
      for (int y = 0; y < (1 << kActs); ++y) {
        int pre = 0;
        for (int b = 0; b < kActs; ++b)
          if (y >> bitOf(nd.f.apply(actOf(b))) & 1) pre |= 1 << b;
        out.just[y] = c.just[pre];
      }
      for (int ys = 0; ys < 2; ++ys) {
        const bool sIn = ys && nd.f.applySignal(Name("s")) == Name("s");
        out.sig[ys] = c.sig[sIn ? 1 : 0];
      }
      return out;
    }
  }
  return out;
}

bool oracleJust(const Lts& lts, const Lasso& l, const Environment& env, int blockingMask) {
  std::size_t loop = lts.initial;
  for (std::size_t t : l.stem) loop = lts.transitions[t].to;
  std::vector<ONode> nodes;
  buildTree(nodes, lts.states[loop], ".");
  SosEngine sos(env);
  // Derivations available for each cycle step.
  std::vector<std::vector<std::size_t>> alts;
  for (std::size_t t : l.cycle) {
    const auto& tr = lts.transitions[t];
    std::vector<std::size_t> a;
    for (std::size_t u : lts.outgoing[tr.from])
      if (lts.transitions[u].to == tr.to && lts.transitions[u].label == tr.label) a.push_back(u);
    alts.push_back(a);
  }
  // Every choice of derivations used infinitely often per step.
  std::function<bool(std::size_t, std::vector<bool>)> choose = [&](std::size_t k, std::vector<bool> moving) {
    if (k == alts.size()) {
      const Sets s = evalNode(nodes, 0, moving, sos);
      for (int y = 0; y < (1 << kActs); ++y)
        if (s.just[y] && (y & blockingMask) == y) return true;
      return false;
    }
    const std::size_t n = alts[k].size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      std::vector<bool> mv = moving;
      for (std::size_t j = 0; j < n; ++j) {
        if (!(mask >> j & 1)) continue;
        for (const auto& p : lts.transitions[alts[k][j]].participants) mv[leafOfPath(nodes, toString(p))] = true;
      }
      if (choose(k + 1, mv)) return true;
    }
    return false;
  };
  return choose(0, std::vector<bool>(nodes.size(), false));
}

// Lassos with stem <= 3 and cycle <= 4. Verdicts depend on the loop state
// and the cycle only, so each loop state gets one shortest stem.
void lassos(const Lts& lts, const std::function<void(const Lasso&)>& f) {
  std::vector<long> via(lts.stateCount(), -1);
  std::vector<std::size_t> depth(lts.stateCount(), 0), order{lts.initial};
  std::vector<bool> seen(lts.stateCount());
  seen[lts.initial] = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t s = order[k];
    if (depth[s] == 3) continue;
    for (std::size_t t : lts.outgoing[s]) {
      const std::size_t w = lts.transitions[t].to;
      if (seen[w]) continue;
      seen[w] = true;
      via[w] = static_cast<long>(t);
      depth[w] = depth[s] + 1;
      order.push_back(w);
    }
  }
  for (std::size_t loop : order) {
    std::vector<std::size_t> stem;
    for (std::size_t s = loop; s != lts.initial; s = lts.transitions[via[s]].from) stem.push_back(via[s]);
    std::reverse(stem.begin(), stem.end());
    f(Lasso{stem, {}});
    std::vector<std::size_t> cyc;
    std::function<void(std::size_t)> cycles = [&](std::size_t at) {
      if (!cyc.empty() && at == loop) f(Lasso{stem, cyc});
      if (cyc.size() == 4) return;
      for (std::size_t t : lts.outgoing[at]) {
        cyc.push_back(t);
        cycles(lts.transitions[t].to);
        cyc.pop_back();
      }
    };
    cycles(loop);
  }
}

void criterion8() {
  auto t0 = Clock::now();
  Outcome o;
  const std::string decls =
      "signals { s }\n"
      "A = a.A\nC = 'a.C\nB = 'b.B\nS = s.S\nE = (b.E)^s\nT = tau.T\n";
  const std::vector<std::string> pool{"0",   "a.0", "'a.0", "'b.0", "s.0",        "0^s",
                                      "A",   "C",   "B",    "S",    "E",          "(a.0 + s.0)^s"};
  const std::vector<std::string> shapes1{"X", "(X)\\{a}"};
  const std::vector<std::string> shapes2{"X | Y", "(X | Y)\\{a, s}", "(X | Y)[b/a]"};
  const std::vector<std::string> shapes3{"X | Y | Z", "(X | Y)\\{a} | Z", "(X | (Y | Z)\\{s})\\{a}",
                                         "((X | Y)[b/a] | Z)\\{b}"};
  const std::vector<std::pair<std::string, int>> blockings{{"", 0}, {"blocking { a, b, s }\n", 31}};
  std::size_t systems = 0, checked = 0, disagreements = 0, justCount = 0;
  std::string firstDisagreement;
  auto run = [&](const std::string& shape, const std::vector<std::string>& leaves) {
    std::string text = shape;
    const char* vars[] = {"X", "Y", "Z"};
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const std::string v = vars[i];
      // Only replace the variable token (shapes use X, Y, Z as whole tokens).
      for (std::size_t p = text.find(v); p != std::string::npos; p = text.find(v, p + 1)) {
        text.replace(p, 1, "(" + leaves[i] + ")");
        p += leaves[i].size() + 1;
      }
    }
    for (const auto& [blk, mask] : blockings) {
      Environment env = loadSpec(decls + blk + "system = " + text + "\n");
      Lts lts = explore(env, env.root());
      ++systems;
      lassos(lts, [&](const Lasso& l) {
        ++checked;
        const bool mine = isJust(lts, l, env).just;
        const bool ref = oracleJust(lts, l, env, mask);
        justCount += ref;
        if (mine != ref) {
          ++disagreements;
          if (firstDisagreement.empty()) firstDisagreement = text + " blocking=" + std::to_string(mask);
        }
      });
    }
  };
  const std::size_t n = pool.size();
  for (const auto& s : shapes1)
    for (std::size_t i = 0; i < n; ++i) run(s, {pool[i]});
  for (const auto& s : shapes2)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) run(s, {pool[i], pool[j]});
  for (const auto& s : shapes3)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) run(s, {pool[i], pool[j], pool[k]});
  o.require(disagreements == 0, "agreement" + (firstDisagreement.empty() ? "" : " e.g. " + firstDisagreement));
  o.detail << systems << " systems, " << checked << " lassos (" << justCount << " just), " << disagreements
           << " disagreements";
  report(8, o, since(t0), 300.0);
}

// ---------------------------------------------------------------------------

void criterion9() {
  auto t0 = Clock::now();
  Outcome o;
  // Extra witnesses: unprotected and deadlocking variants, and the plain-read
  // filter lock.
  {
    const ProtocolModel& m = keep(modelFromSource("free", "blocking { noncrit1, noncrit2 }\n"
                                                          "P1 = noncrit1.crit1.P1\nP2 = noncrit2.crit2.P2\n"
                                                          "system = P1 | P2\n"));
    const Lts& lts = keep(explore(m.env, m.root));
    SafetyVerdict s = checkSafety(m, lts);
    o.require(!s.holds, "unprotected pair violates safety");
    witnesses.push_back({"unprotected safety", &m, &lts, s.witness, std::nullopt});
  }
  {
    const ProtocolModel& m = keep(modelFromSource("stuck", "blocking { noncrit1 }\n"
                                                           "P1 = noncrit1.'lock.crit1.P1\n"
                                                           "system = (P1 | lock.0)\\{lock}\n"));
    const Lts& lts = keep(explore(m.env, m.root));
    LivenessVerdict v = checkLiveness(m, lts);
    if (v.counterexample) witnesses.push_back({"deadlock liveness", &m, &lts, {}, *v.counterexample});
  }
  for (int n : {2, 3}) {
    const ProtocolModel& m = keep(filterLock(n, Flavor::Ccs));
    const Lts& lts = keep(explore(m.env, m.root));
    LivenessVerdict v = checkLiveness(m, lts);
    if (v.counterexample) witnesses.push_back({"filter ccs liveness", &m, &lts, {}, *v.counterexample});
  }
  std::size_t ok = 0;
  for (const auto& w : witnesses) {
    ReplayResult r = w.lasso ? replay(w.model->env, w.model->root, *w.lts, *w.lasso)
                             : replay(w.model->env, w.model->root, *w.lts, w.path);
    if (w.lasso) {
      r.ok = r.ok && isJust(*w.lts, *w.lasso, w.model->env).just && isComplete(*w.lts, *w.lasso, w.model->env);
    } else if (r.ok) {
      // The safety witness ends where two crit actions are offered.
      std::size_t end = w.lts->initial;
      if (!w.path.empty()) end = w.lts->transitions[w.path.back()].to;
      ProtocolView view(*w.model, *w.lts);
      std::size_t inCrit = 0;
      for (std::size_t i = 0; i < view.processCount(); ++i) inCrit += view.region(end, i) == Region::Critical;
      r.ok = inCrit >= 2;
    }
    ok += r.ok;
    if (!r.ok) o.detail << "[" << w.what << ": " << r.message << "] ";
  }
  o.require(!witnesses.empty() && ok == witnesses.size(), "all witnesses replay");
  o.detail << ok << "/" << witnesses.size() << " witnesses replayed";
  report(9, o, since(t0), 60.0);
}

}  // namespace

int main() {
  std::cout.setf(std::ios::fixed);
  std::cout.precision(3);
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::cout << (failures ? "acceptance: FAIL" : "acceptance: PASS") << std::endl;
  return failures ? 1 : 0;
}
