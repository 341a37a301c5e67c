#include "ccss/environment.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "ccss/error.hpp"

namespace ccss {

namespace {

struct BlockingEntry {
  syntax::ActionExpr::Polarity polarity;
  std::string base;
  std::optional<std::vector<Value>> params;  // nullopt: any instance of base
};

constexpr Value kMaxRange = 1'000'000;

}  // namespace

struct Environment::Impl {
  syntax::SpecFile spec;
  std::set<std::string, std::less<>> signals;
  std::vector<BlockingEntry> blocking;
  std::map<std::string, std::pair<Value, Value>, std::less<>> ranges;
  std::map<std::string, std::vector<const syntax::Equation*>, std::less<>> equations;
  std::vector<std::pair<Name, Term>> groundEqs;
  std::unordered_map<Name, Term> groundIndex;
  Term root;

  mutable std::mutex cacheMutex;
  mutable std::unordered_map<Name, Term> cache;

  void index() {
    equations.clear();
    for (const auto& eq : spec.equations) equations[eq.head.base].push_back(&eq);
    groundIndex.clear();
    for (const auto& [n, t] : groundEqs) groundIndex[n] = t;
  }
};

Environment::Environment() : impl_(std::make_shared<Impl>()) {}

Environment Environment::fromSpec(syntax::SpecFile spec) {
  Environment env;
  auto& impl = *env.impl_;
  impl.spec = std::move(spec);
  for (const auto& s : impl.spec.signalDecls) impl.signals.insert(s);
  for (const auto& r : impl.spec.rangeDecls) {
    auto lo = syntax::constant(*r.lo);
    auto hi = syntax::constant(*r.hi);
    if (!lo || !hi) throw ScopeError("range '" + r.name + "' bounds must be constant");
    impl.ranges[r.name] = {*lo, *hi};
  }
  for (const auto& b : impl.spec.blockingDecls) {
    if (b.polarity == syntax::ActionExpr::Polarity::Tau) {
      throw ScopeError("tau is never blocking");
    }
    BlockingEntry e{b.polarity, b.name.base, std::nullopt};
    if (!b.name.params.empty()) {
      std::vector<Value> ps;
      for (const auto& p : b.name.params) {
        auto v = syntax::constant(*p);
        if (!v) throw ScopeError("blocking entry '" + b.name.base + "' must be constant");
        ps.push_back(*v);
      }
      e.params = std::move(ps);
    }
    impl.blocking.push_back(std::move(e));
  }
  impl.index();
  impl.root = impl.spec.root ? env.ground(*impl.spec.root) : nil();
  return env;
}

Environment Environment::withSignals(std::vector<std::string> signalBases) {
  syntax::SpecFile spec;
  spec.signalDecls = std::move(signalBases);
  return fromSpec(std::move(spec));
}

Environment Environment::withGroundEquations(std::vector<std::pair<Name, Term>> equations) const {
  Environment env;
  auto& impl = *env.impl_;
  impl.spec = impl_->spec;
  impl.signals = impl_->signals;
  impl.blocking = impl_->blocking;
  impl.ranges = impl_->ranges;
  impl.groundEqs = impl_->groundEqs;
  impl.groundEqs.insert(impl.groundEqs.end(), equations.begin(), equations.end());
  impl.index();
  impl.root = impl_->root;
  return env;
}

Term Environment::resolve(Name agent) const {
  {
    std::lock_guard lock(impl_->cacheMutex);
    if (auto it = impl_->cache.find(agent); it != impl_->cache.end()) return it->second;
  }
  Term body;
  if (auto g = impl_->groundIndex.find(agent); g != impl_->groundIndex.end()) {
    body = g->second;
  } else {
    auto it = impl_->equations.find(agent.base());
    if (it == impl_->equations.end()) {
      throw UnknownAgent("no defining equation for agent '" + agent.str() + "'");
    }
    const auto& args = agent.params();
    std::vector<std::pair<const syntax::Equation*, syntax::Bindings>> matches;
    bool arityFound = false;
    for (const syntax::Equation* eq : it->second) {
      if (eq->head.params.size() != args.size()) continue;
      arityFound = true;
      syntax::Bindings b;
      bool ok = true;
      for (std::size_t i = 0; i < args.size() && ok; ++i) {
        const auto& p = *eq->head.params[i];
        if (p.op == syntax::Expr::Op::Var) {
          auto [pos, inserted] = b.emplace(p.var, args[i]);
          ok = inserted || pos->second == args[i];
        } else {
          ok = syntax::eval(p, b) == args[i];
        }
      }
      if (ok && eq->guard) ok = syntax::eval(*eq->guard, b) != 0;
      if (ok) matches.emplace_back(eq, std::move(b));
    }
    if (!arityFound) {
      throw ArityMismatch("agent '" + agent.str() + "' used with " +
                          std::to_string(args.size()) + " parameter(s)");
    }
    if (matches.empty()) {
      throw UnknownAgent("no equation for '" + agent.base() + "' matches '" + agent.str() + "'");
    }
    if (matches.size() > 1) {
      throw AmbiguousAgent("equations at lines " + std::to_string(matches[0].first->line) +
                           " and " + std::to_string(matches[1].first->line) + " both match '" +
                           agent.str() + "'");
    }
    body = ground(*matches.front().first->body, matches.front().second);
  }
  std::lock_guard lock(impl_->cacheMutex);
  impl_->cache.emplace(agent, body);
  return body;
}

Action Environment::groundAction(const syntax::ActionExpr& a, const syntax::Bindings& b) const {
  using P = syntax::ActionExpr::Polarity;
  if (a.polarity == P::Tau) return Action::tau();
  Name n = syntax::evalName(a.name, b);
  if (a.polarity == P::Co) return Action::coname(n);
  return isSignal(n.base()) ? Action::signal(n) : Action::handshake(n);
}

Term Environment::ground(const syntax::Proc& p, const syntax::Bindings& b) const {
  using K = syntax::Proc::Kind;
  switch (p.kind) {
    case K::Nil: return nil();
    case K::Prefix: return prefix(groundAction(p.action, b), ground(*p.children[0], b));
    case K::Sum: {
      std::vector<Term> branches;
      branches.reserve(p.children.size());
      for (const auto& c : p.children) branches.push_back(ground(*c, b));
      return sum(std::move(branches));
    }
    case K::IndexedSum: {
      Value lo = 0;
      Value hi = -1;
      if (!p.range.named.empty()) {
        auto it = impl_->ranges.find(p.range.named);
        if (it == impl_->ranges.end()) throw ScopeError("undeclared range '" + p.range.named + "'");
        std::tie(lo, hi) = it->second;
      } else {
        lo = syntax::eval(*p.range.lo, b);
        hi = syntax::eval(*p.range.hi, b);
      }
      if (hi - lo > kMaxRange) throw Error("indexed sum domain too large");
      std::vector<Term> branches;
      syntax::Bindings inner = b;
      for (Value v = lo; v <= hi; ++v) {
        inner[p.var] = v;
        if (p.guard && syntax::eval(*p.guard, inner) == 0) continue;
        branches.push_back(ground(*p.children[0], inner));
      }
      return sum(std::move(branches));
    }
    case K::Par: return par(ground(*p.children[0], b), ground(*p.children[1], b));
    case K::Restrict: {
      std::vector<Name> names;
      for (const auto& n : p.names) names.push_back(syntax::evalName(n, b));
      return restrict(ground(*p.children[0], b), std::move(names));
    }
    case K::Relabel: {
      Relabelling::Map hs;
      Relabelling::Map sig;
      for (const auto& [to, from] : p.renames) {
        Name f = syntax::evalName(from, b);
        Name t = syntax::evalName(to, b);
        (isSignal(f.base()) ? sig : hs).emplace_back(f, t);
      }
      return relabel(ground(*p.children[0], b), Relabelling(std::move(hs), std::move(sig)));
    }
    case K::Ident: return ident(syntax::evalName(p.name, b));
    case K::Signal: return signalling(ground(*p.children[0], b), syntax::evalName(p.name, b));
  }
  return nil();
}

Term Environment::root() const { return impl_->root; }

bool Environment::isSignal(std::string_view base) const { return impl_->signals.contains(base); }

bool Environment::isBlocking(const Action& a) const {
  if (a.isTau()) return false;
  for (const auto& e : impl_->blocking) {
    if (e.base != a.name.base()) continue;
    if (e.params && *e.params != a.name.params()) continue;
    if (e.polarity == syntax::ActionExpr::Polarity::Co && a.kind != ActionKind::CoName) continue;
    return true;
  }
  return false;
}

const std::set<std::string, std::less<>>& Environment::declaredSignals() const {
  return impl_->signals;
}

const syntax::SpecFile& Environment::spec() const { return impl_->spec; }

const std::vector<std::pair<Name, Term>>& Environment::groundEquations() const {
  return impl_->groundEqs;
}

namespace {

class Validator {
 public:
  explicit Validator(const Environment& env) : env_(env) {}

  ValidationReport run(Term root) {
    std::vector<Term> work{root};
    std::unordered_set<Term> seen{root};
    while (!work.empty()) {
      Term t = work.back();
      work.pop_back();
      visit(t, work, seen);
    }
    return std::move(report_);
  }

 private:
  void add(Violation::Kind k, std::string msg) {
    if (messages_.insert(msg).second) report_.violations.push_back({k, std::move(msg)});
  }

  void visit(Term t, std::vector<Term>& work, std::unordered_set<Term>& seen) {
    auto push = [&](Term c) {
      if (seen.insert(c).second) work.push_back(c);
    };
    switch (t.kind()) {
      case TermKind::Prefix: {
        const Action& a = t.action();
        if (a.kind == ActionKind::CoName && env_.isSignal(a.name.base())) {
          add(Violation::Kind::SignalCoName, "signal '" + a.name.str() + "' has no co-name");
        }
        break;
      }
      case TermKind::Restrict:
        for (Name n : t.restriction()) {
          const bool ok = env_.isSignal(n.base())
                              ? env_.isBlocking(Action::signal(n))
                              : env_.isBlocking(Action::handshake(n)) &&
                                    env_.isBlocking(Action::coname(n));
          if (!ok) {
            add(Violation::Kind::RestrictedNonBlocking,
                "non-blocking action '" + n.str() + "' is restricted");
          }
        }
        break;
      case TermKind::Relabel: {
        const auto& f = t.relabelling();
        for (const auto& [from, to] : f.handshakeMap()) {
          for (auto mk : {&Action::handshake, &Action::coname}) {
            if (!env_.isBlocking(mk(from)) && env_.isBlocking(mk(to))) {
              add(Violation::Kind::RelabelIntoBlocking,
                  "non-blocking '" + mk(from).str() + "' relabelled into blocking '" +
                      mk(to).str() + "'");
            }
          }
        }
        for (const auto& [from, to] : f.signalMap()) {
          if (!env_.isBlocking(Action::signal(from)) && env_.isBlocking(Action::signal(to))) {
            add(Violation::Kind::RelabelIntoBlocking,
                "non-blocking signal '" + from.str() + "' relabelled into blocking '" +
                    to.str() + "'");
          }
        }
        break;
      }
      case TermKind::Signal:
        if (!env_.isSignal(t.name().base())) {
          add(Violation::Kind::UndeclaredSignal,
              "'" + t.name().str() + "' is emitted but not declared as a signal");
        }
        break;
      case TermKind::Ident:
        try {
          push(env_.resolve(t.name()));
        } catch (const UnknownAgent& e) {
          add(Violation::Kind::UnknownAgent, e.what());
        } catch (const ArityMismatch& e) {
          add(Violation::Kind::ArityMismatch, e.what());
        } catch (const AmbiguousAgent& e) {
          add(Violation::Kind::AmbiguousAgent, e.what());
        } catch (const Error& e) {
          add(Violation::Kind::BadRange, e.what());
        }
        break;
      default: break;
    }
    for (Term c : t.children()) push(c);
  }

  const Environment& env_;
  ValidationReport report_;
  std::set<std::string> messages_;
};

}  // namespace

ValidationReport validate(const Environment& env, Term root) { return Validator(env).run(root); }

}  // namespace ccss
