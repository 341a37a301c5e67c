#include "ccss/bisimulation.hpp"

#include <algorithm>
#include <map>

#include "ccss/error.hpp"
#include "ccss/sos.hpp"

namespace ccss {

namespace {

// Disjoint union view: states of `a` followed by states of `b`.
struct Graph {
  std::vector<SignalSet> signals;
  std::vector<std::vector<std::pair<Action, std::size_t>>> succ;

  void add(const Lts& lts) {
    const std::size_t off = signals.size();
    for (std::size_t s = 0; s < lts.stateCount(); ++s) {
      signals.push_back(lts.stateSignals[s]);
      succ.emplace_back();
      for (std::size_t t : lts.outgoing[s]) {
        succ.back().emplace_back(lts.transitions[t].label, lts.transitions[t].to + off);
      }
    }
  }
};

// Partition after each round; history[0] splits by signals only.
std::vector<std::vector<std::size_t>> refine(const Graph& g) {
  std::vector<std::vector<std::size_t>> history;
  std::vector<std::size_t> block(g.signals.size());
  {
    std::map<SignalSet, std::size_t> ids;
    for (std::size_t s = 0; s < block.size(); ++s) {
      block[s] = ids.emplace(g.signals[s], ids.size()).first->second;
    }
    history.push_back(block);
  }
  for (;;) {
    using Sig = std::pair<std::size_t, std::vector<std::pair<Action, std::size_t>>>;
    std::map<Sig, std::size_t> ids;
    std::vector<std::size_t> next(block.size());
    for (std::size_t s = 0; s < block.size(); ++s) {
      Sig sig{block[s], {}};
      for (const auto& [a, t] : g.succ[s]) sig.second.emplace_back(a, block[t]);
      std::sort(sig.second.begin(), sig.second.end());
      sig.second.erase(std::unique(sig.second.begin(), sig.second.end()), sig.second.end());
      next[s] = ids.emplace(std::move(sig), ids.size()).first->second;
    }
    const bool stable = ids.size() == std::set<std::size_t>(block.begin(), block.end()).size();
    block = std::move(next);
    if (stable) break;
    history.push_back(block);
  }
  return history;
}

// First round in which p and q are in different blocks.
std::size_t splitRound(const std::vector<std::vector<std::size_t>>& h, std::size_t p, std::size_t q) {
  for (std::size_t r = 0; r < h.size(); ++r) {
    if (h[r][p] != h[r][q]) return r;
  }
  return h.size();
}

BisimEvidence explain(const Graph& g, const std::vector<std::vector<std::size_t>>& h, std::size_t p,
                      std::size_t q) {
  BisimEvidence ev;
  for (;;) {
    const std::size_t r = splitRound(h, p, q);
    if (r == 0) {
      ev.reason = "signals differ: left " + toString(g.signals[p]) + ", right " + toString(g.signals[q]);
      return ev;
    }
    const auto& prev = h[r - 1];
    // A move of one side that the other cannot match within prev blocks.
    auto unmatched = [&](std::size_t x, std::size_t y) -> std::optional<std::pair<Action, std::size_t>> {
      for (const auto& [a, xt] : g.succ[x]) {
        bool ok = std::any_of(g.succ[y].begin(), g.succ[y].end(), [&](const auto& e) {
          return e.first == a && prev[e.second] == prev[xt];
        });
        if (!ok) return std::make_pair(a, xt);
      }
      return std::nullopt;
    };
    bool leftMoves = true;
    auto m = unmatched(p, q);
    if (!m) {
      m = unmatched(q, p);
      leftMoves = false;
    }
    if (!m) {
      ev.reason = "inconsistent refinement history";
      return ev;
    }
    const auto [a, target] = *m;
    const std::size_t other = leftMoves ? q : p;
    auto it = std::find_if(g.succ[other].begin(), g.succ[other].end(),
                           [&](const auto& e) { return e.first == a; });
    if (it == g.succ[other].end()) {
      ev.reason = std::string(leftMoves ? "left" : "right") + " enables " + a.str() + ", " +
                  (leftMoves ? "right" : "left") + " does not";
      return ev;
    }
    ev.trace.push_back(a);
    p = leftMoves ? target : it->second;
    q = leftMoves ? it->second : target;
  }
}

}  // namespace

std::vector<std::size_t> bisimulationClasses(const Lts& lts) {
  Graph g;
  g.add(lts);
  return refine(g).back();
}

BisimResult strongBisimilar(const Lts& a, const Lts& b) {
  Graph g;
  g.add(a);
  g.add(b);
  const auto h = refine(g);
  const std::size_t p = a.initial, q = a.stateCount() + b.initial;
  BisimResult res;
  res.rounds = h.size();
  res.bisimilar = h.back()[p] == h.back()[q];
  if (!res.bisimilar) res.evidence = explain(g, h, p, q);
  return res;
}

BisimResult strongBisimilar(const Environment& env, Term p, Term q, ExploreOptions options) {
  Lts a = explore(env, p, options);
  Lts b = explore(env, q, options);
  if (a.truncated || b.truncated) throw TruncatedInput("state limit reached while exploring for bisimulation");
  return strongBisimilar(a, b);
}

std::vector<Context> singleOperatorContexts(const std::vector<Name>& names,
                                            const std::vector<Name>& signals,
                                            const std::vector<Term>& partners) {
  std::vector<Context> out;
  std::vector<Action> prefixes{Action::tau()};
  for (Name n : names) {
    prefixes.push_back(Action::handshake(n));
    prefixes.push_back(Action::coname(n));
  }
  for (Name s : signals) prefixes.push_back(Action::signal(s));
  for (const Action& a : prefixes) {
    out.push_back({a.str() + ".[]", [a](Term t) { return prefix(a, t); }});
  }
  for (Term r : partners) {
    const std::string rs = "R" + std::to_string(r.id());
    out.push_back({"[] + " + rs, [r](Term t) { return sum({t, r}); }});
    out.push_back({rs + " + []", [r](Term t) { return sum({r, t}); }});
    out.push_back({"[] | " + rs, [r](Term t) { return par(t, r); }});
    out.push_back({rs + " | []", [r](Term t) { return par(r, t); }});
  }
  std::vector<Name> all = names;
  all.insert(all.end(), signals.begin(), signals.end());
  for (Name n : all) {
    out.push_back({"[] \\ {" + n.str() + "}", [n](Term t) { return restrict(t, {n}); }});
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    Name from = names[i], to = names[(i + 1) % names.size()];
    Relabelling f({{from, to}}, {});
    out.push_back({"[][" + to.str() + "/" + from.str() + "]", [f](Term t) { return relabel(t, f); }});
  }
  for (std::size_t i = 0; i < signals.size(); ++i) {
    Name from = signals[i], to = signals[(i + 1) % signals.size()];
    Relabelling f({}, {{from, to}});
    out.push_back({"[][" + to.str() + "/" + from.str() + "]", [f](Term t) { return relabel(t, f); }});
  }
  for (Name s : signals) {
    out.push_back({"[]^" + s.str(), [s](Term t) { return signalling(t, s); }});
  }
  return out;
}

CongruenceReport checkCongruence(const Environment& env, Term p, Term q,
                                 const std::vector<Context>& contexts) {
  CongruenceReport rep;
  rep.premise = strongBisimilar(env, p, q).bisimilar;
  if (!rep.premise) return rep;
  for (const auto& c : contexts) {
    ++rep.checked;
    if (!strongBisimilar(env, c.apply(p), c.apply(q)).bisimilar) rep.failures.push_back(c.description);
  }
  return rep;
}

EncodingReport checkEncoding(const Environment& env, Term p, Term q) {
  EncodingReport rep;
  rep.original = strongBisimilar(env, p, q).bisimilar;
  const EncodedSystem ep = encodeSignalsAsTransitions(env, p);
  const EncodedSystem eq = encodeSignalsAsTransitions(env, q);
  Lts a = explore(ep.env, ep.term);
  Lts b = explore(eq.env, eq.term);
  if (a.truncated || b.truncated) throw TruncatedInput("state limit reached while exploring encodings");
  rep.encoded = strongBisimilar(a, b).bisimilar;
  return rep;
}

}  // namespace ccss
