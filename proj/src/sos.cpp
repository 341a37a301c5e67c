#include "ccss/sos.hpp"

#include <sstream>

#include "ccss/error.hpp"

namespace ccss {

std::string toString(const ComponentPath& path) {
  if (path.empty()) return ".";
  std::string out;
  for (const auto& s : path) {
    if (!out.empty()) out += '/';
    switch (s.kind) {
      case PathStep::Kind::ParLeft: out += 'L'; break;
      case PathStep::Kind::ParRight: out += 'R'; break;
      case PathStep::Kind::UnderRestrict: out += "res"; break;
      case PathStep::Kind::UnderRelabel: out += "rel"; break;
      case PathStep::Kind::UnderSignal: out += "sig"; break;
      case PathStep::Kind::UnderSum: out += '+' + std::to_string(s.index); break;
      case PathStep::Kind::UnderIdent: out += '@' + s.agent.str(); break;
    }
  }
  return out;
}

ComponentPath parsePath(const std::string& text) {
  ComponentPath path;
  if (text == ".") return path;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, '/')) {
    PathStep s;
    if (tok == "L") {
      s.kind = PathStep::Kind::ParLeft;
    } else if (tok == "R") {
      s.kind = PathStep::Kind::ParRight;
    } else if (tok == "res") {
      s.kind = PathStep::Kind::UnderRestrict;
    } else if (tok == "rel") {
      s.kind = PathStep::Kind::UnderRelabel;
    } else if (tok == "sig") {
      s.kind = PathStep::Kind::UnderSignal;
    } else if (!tok.empty() && tok[0] == '+') {
      s.kind = PathStep::Kind::UnderSum;
      try {
        s.index = std::stoul(tok.substr(1));
      } catch (const std::logic_error&) {
        throw Error("malformed path step '" + tok + "'");
      }
    } else if (!tok.empty() && tok[0] == '@') {
      s.kind = PathStep::Kind::UnderIdent;
      s.agent = parseGroundName(tok.substr(1));
    } else {
      throw Error("malformed path step '" + tok + "'");
    }
    path.push_back(s);
  }
  return path;
}

namespace {

ComponentPath prepend(PathStep step, const ComponentPath& p) {
  ComponentPath out;
  out.reserve(p.size() + 1);
  out.push_back(step);
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

TransitionDerivation lift(const TransitionDerivation& d, Term source, Term target, PathStep step,
                          Action label) {
  TransitionDerivation out{source, label, target, {}, std::nullopt};
  for (const auto& p : d.participants) out.participants.push_back(prepend(step, p));
  if (d.signalPartner) out.signalPartner = prepend(step, *d.signalPartner);
  return out;
}

bool blockedByRestriction(Term t, const Action& a) {
  if (a.isTau()) return false;
  return t.restricts(a.name);
}

}  // namespace

struct SosEngine::Guard {
  std::unordered_set<Term>& busy;
  std::size_t& depth;
  Term t;
  Guard(std::unordered_set<Term>& b, std::size_t& d, Term term, std::size_t max)
      : busy(b), depth(d), t(term) {
    if (!busy.insert(t).second) {
      throw UnguardedRecursion("unguarded recursion through '" + t.name().str() + "'");
    }
    if (++depth > max) {
      busy.erase(t);
      --depth;
      throw UnguardedRecursion("identifier unfolding exceeds depth limit at '" +
                               t.name().str() + "'");
    }
  }
  ~Guard() {
    busy.erase(t);
    --depth;
  }
};

SosEngine::SosEngine(Environment env) : SosEngine(std::move(env), Options{}) {}

SosEngine::SosEngine(Environment env, Options options)
    : env_(std::move(env)), options_(options) {}

const std::vector<TransitionDerivation>& SosEngine::transitions(Term t) {
  if (auto it = trans_.find(t); it != trans_.end()) return it->second;
  std::vector<TransitionDerivation> ds = compute(t);
  return trans_.emplace(t, std::move(ds)).first->second;
}

const SignalSet& SosEngine::signals(Term t) {
  if (auto it = signals_.find(t); it != signals_.end()) return it->second;
  SignalSet s = computeSignals(t);
  return signals_.emplace(t, std::move(s)).first->second;
}

ActionSet SosEngine::enabled(Term t) {
  ActionSet out;
  for (const auto& d : transitions(t)) out.insert(d.label);
  return out;
}

std::vector<TransitionDerivation> SosEngine::compute(Term t) {
  using K = PathStep::Kind;
  std::vector<TransitionDerivation> out;
  switch (t.kind()) {
    case TermKind::Nil: break;
    case TermKind::Prefix: out.push_back({t, t.action(), t.body(), {ComponentPath{}}, std::nullopt}); break;
    case TermKind::Sum: {
      auto branches = t.children();
      for (std::size_t i = 0; i < branches.size(); ++i) {
        for (const auto& d : transitions(branches[i])) {
          out.push_back(lift(d, t, d.target, {K::UnderSum, i, {}}, d.label));
        }
      }
      break;
    }
    case TermKind::Par: {
      Term l = t.left();
      Term r = t.right();
      const std::vector<TransitionDerivation>& ls = transitions(l);
      const std::vector<TransitionDerivation>& rs = transitions(r);
      const SignalSet& lsig = signals(l);
      const SignalSet& rsig = signals(r);
      const PathStep left{K::ParLeft, 0, {}};
      const PathStep right{K::ParRight, 0, {}};
      for (const auto& d : ls) {
        out.push_back(lift(d, t, par(d.target, r), left, d.label));
      }
      for (const auto& d : rs) {
        out.push_back(lift(d, t, par(l, d.target), right, d.label));
      }
      for (const auto& dl : ls) {
        if (dl.label.isHandshake()) {
          for (const auto& dr : rs) {
            if (dr.label == dl.label.complement()) {
              TransitionDerivation d{t, Action::tau(), par(dl.target, dr.target), {}, std::nullopt};
              d.participants.push_back(prepend(left, dl.participants.front()));
              d.participants.push_back(prepend(right, dr.participants.front()));
              out.push_back(std::move(d));
            }
          }
        } else if (dl.label.isSignal() && rsig.contains(dl.label.name)) {
          TransitionDerivation d = lift(dl, t, par(dl.target, r), left, Action::tau());
          d.signalPartner = ComponentPath{right};
          out.push_back(std::move(d));
        }
      }
      for (const auto& dr : rs) {
        if (dr.label.isSignal() && lsig.contains(dr.label.name)) {
          TransitionDerivation d = lift(dr, t, par(l, dr.target), right, Action::tau());
          d.signalPartner = ComponentPath{left};
          out.push_back(std::move(d));
        }
      }
      break;
    }
    case TermKind::Restrict: {
      std::vector<Name> names(t.restriction().begin(), t.restriction().end());
      for (const auto& d : transitions(t.body())) {
        if (blockedByRestriction(t, d.label)) continue;
        out.push_back(lift(d, t, restrict(d.target, names), {K::UnderRestrict, 0, {}}, d.label));
      }
      break;
    }
    case TermKind::Relabel: {
      const Relabelling& f = t.relabelling();
      for (const auto& d : transitions(t.body())) {
        out.push_back(lift(d, t, relabel(d.target, f), {K::UnderRelabel, 0, {}}, f.apply(d.label)));
      }
      break;
    }
    case TermKind::Ident: {
      Guard g(transBusy_, depth_, t, options_.maxUnfold);
      Term body = env_.resolve(t.name());
      const std::vector<TransitionDerivation>& ds = transitions(body);
      for (const auto& d : ds) {
        out.push_back(lift(d, t, d.target, {K::UnderIdent, 0, t.name()}, d.label));
      }
      break;
    }
    case TermKind::Signal:
      for (const auto& d : transitions(t.body())) {
        out.push_back(lift(d, t, d.target, {K::UnderSignal, 0, {}}, d.label));
      }
      break;
  }
  return out;
}

SignalSet SosEngine::computeSignals(Term t) {
  switch (t.kind()) {
    case TermKind::Nil:
    case TermKind::Prefix: return {};
    case TermKind::Sum:
    case TermKind::Par: {
      SignalSet out;
      for (Term c : t.children()) {
        const SignalSet& s = signals(c);
        out.insert(s.begin(), s.end());
      }
      return out;
    }
    case TermKind::Restrict: {
      SignalSet out;
      for (Name s : signals(t.body())) {
        if (!t.restricts(s)) out.insert(s);
      }
      return out;
    }
    case TermKind::Relabel: {
      SignalSet out;
      for (Name s : signals(t.body())) out.insert(t.relabelling().applySignal(s));
      return out;
    }
    case TermKind::Ident: {
      Guard g(signalsBusy_, depth_, t, options_.maxUnfold);
      return signals(env_.resolve(t.name()));
    }
    case TermKind::Signal: {
      SignalSet out = signals(t.body());
      out.insert(t.name());
      return out;
    }
  }
  return {};
}

namespace {

class Encoder {
 public:
  Encoder(const Environment& env, std::size_t maxAgents) : sos_(env), maxAgents_(maxAgents) {}

  Term encode(Term t) {
    switch (t.kind()) {
      case TermKind::Par: return par(encode(t.left()), encode(t.right()));
      case TermKind::Restrict:
        return restrict(encode(t.body()), {t.restriction().begin(), t.restriction().end()});
      case TermKind::Relabel: {
        const Relabelling& f = t.relabelling();
        Relabelling::Map merged = f.handshakeMap();
        merged.insert(merged.end(), f.signalMap().begin(), f.signalMap().end());
        return relabel(encode(t.body()), Relabelling(std::move(merged), {}));
      }
      default: return agentFor(t);
    }
  }

  std::vector<std::pair<Name, Term>> takeEquations() { return std::move(equations_); }

 private:
  Term agentFor(Term t) {
    if (auto it = agents_.find(t); it != agents_.end()) return it->second;
    const auto& ds = sos_.transitions(t);
    const SignalSet& sigs = sos_.signals(t);
    if (ds.empty() && sigs.empty()) return agents_.emplace(t, nil()).first->second;
    if (agents_.size() >= maxAgents_) throw TruncatedInput("signal encoding exceeds agent limit");
    Name agent("encState", {static_cast<Value>(agents_.size())});
    Term self = ident(agent);
    agents_.emplace(t, self);
    std::vector<Term> branches;
    for (const auto& d : ds) {
      Action a = d.label.isSignal() ? Action::handshake(d.label.name) : d.label;
      branches.push_back(prefix(a, encode(d.target)));
    }
    for (Name s : sigs) branches.push_back(prefix(Action::coname(s), self));
    equations_.emplace_back(agent, sum(std::move(branches)));
    return self;
  }

  SosEngine sos_;
  std::size_t maxAgents_;
  std::unordered_map<Term, Term> agents_;
  std::vector<std::pair<Name, Term>> equations_;
};

}  // namespace

EncodedSystem encodeSignalsAsTransitions(const Environment& env, Term t, std::size_t maxAgents) {
  Encoder enc(env, maxAgents);
  Term out = enc.encode(t);
  return {Environment().withGroundEquations(enc.takeEquations()), out};
}

}  // namespace ccss
