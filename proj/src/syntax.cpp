#include "ccss/syntax.hpp"

#include "ccss/error.hpp"

namespace ccss::syntax {

ExprPtr lit(Value v) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Lit;
  e->value = v;
  return e;
}

ExprPtr var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->op = Expr::Op::Var;
  e->var = std::move(name);
  return e;
}

ExprPtr unary(Expr::Op op, ExprPtr operand) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(operand);
  return e;
}

ExprPtr binary(Expr::Op op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

Value eval(const Expr& e, const Bindings& env) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::Lit: return e.value;
    case Op::Var: {
      auto it = env.find(e.var);
      if (it == env.end()) throw ScopeError("unbound variable '" + e.var + "'");
      return it->second;
    }
    case Op::Neg: return -eval(*e.lhs, env);
    case Op::Not: return eval(*e.lhs, env) == 0 ? 1 : 0;
    case Op::And: return (eval(*e.lhs, env) != 0 && eval(*e.rhs, env) != 0) ? 1 : 0;
    case Op::Or: return (eval(*e.lhs, env) != 0 || eval(*e.rhs, env) != 0) ? 1 : 0;
    default: break;
  }
  const Value a = eval(*e.lhs, env);
  const Value b = eval(*e.rhs, env);
  switch (e.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Mod:
      if (b == 0) throw Error("modulo by zero");
      return a % b;
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
    default: return 0;
  }
}

bool equal(const Expr& a, const Expr& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Expr::Op::Lit: return a.value == b.value;
    case Expr::Op::Var: return a.var == b.var;
    case Expr::Op::Neg:
    case Expr::Op::Not: return equal(*a.lhs, *b.lhs);
    default: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
}

std::optional<Value> constant(const Expr& e) {
  try {
    return eval(e, {});
  } catch (const ScopeError&) {
    return std::nullopt;
  }
}

Name evalName(const NameExpr& n, const Bindings& env) {
  std::vector<Value> params;
  params.reserve(n.params.size());
  for (const auto& p : n.params) params.push_back(eval(*p, env));
  return Name(n.base, std::move(params));
}

bool equal(const NameExpr& a, const NameExpr& b) {
  if (a.base != b.base || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (!equal(*a.params[i], *b.params[i])) return false;
  }
  return true;
}

NameExpr literalName(Name n) {
  NameExpr out{n.base(), {}};
  for (Value v : n.params()) out.params.push_back(lit(v));
  return out;
}

namespace {

std::shared_ptr<Proc> node(Proc::Kind k) {
  auto p = std::make_shared<Proc>();
  p->kind = k;
  return p;
}

bool equalAction(const ActionExpr& a, const ActionExpr& b) {
  if (a.polarity != b.polarity) return false;
  return a.polarity == ActionExpr::Polarity::Tau || equal(a.name, b.name);
}

bool equalOpt(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

}  // namespace

ProcPtr mkNil() { return node(Proc::Kind::Nil); }

ProcPtr mkPrefix(ActionExpr a, ProcPtr body) {
  auto p = node(Proc::Kind::Prefix);
  p->action = std::move(a);
  p->children = {std::move(body)};
  return p;
}

ProcPtr mkSum(std::vector<ProcPtr> branches) {
  auto p = node(Proc::Kind::Sum);
  p->children = std::move(branches);
  return p;
}

ProcPtr mkIndexedSum(std::string v, Range range, ExprPtr guard, ProcPtr body) {
  auto p = node(Proc::Kind::IndexedSum);
  p->var = std::move(v);
  p->range = std::move(range);
  p->guard = std::move(guard);
  p->children = {std::move(body)};
  return p;
}

ProcPtr mkPar(ProcPtr l, ProcPtr r) {
  auto p = node(Proc::Kind::Par);
  p->children = {std::move(l), std::move(r)};
  return p;
}

ProcPtr mkRestrict(ProcPtr body, std::vector<NameExpr> names) {
  auto p = node(Proc::Kind::Restrict);
  p->children = {std::move(body)};
  p->names = std::move(names);
  return p;
}

ProcPtr mkRelabel(ProcPtr body, std::vector<std::pair<NameExpr, NameExpr>> renames) {
  auto p = node(Proc::Kind::Relabel);
  p->children = {std::move(body)};
  p->renames = std::move(renames);
  return p;
}

ProcPtr mkIdent(NameExpr agent) {
  auto p = node(Proc::Kind::Ident);
  p->name = std::move(agent);
  return p;
}

ProcPtr mkSignal(ProcPtr body, NameExpr signal) {
  auto p = node(Proc::Kind::Signal);
  p->children = {std::move(body)};
  p->name = std::move(signal);
  return p;
}

bool equal(const Proc& a, const Proc& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!equal(*a.children[i], *b.children[i])) return false;
  }
  switch (a.kind) {
    case Proc::Kind::Prefix: return equalAction(a.action, b.action);
    case Proc::Kind::IndexedSum:
      return a.var == b.var && a.range.named == b.range.named &&
             equalOpt(a.range.lo, b.range.lo) && equalOpt(a.range.hi, b.range.hi) &&
             equalOpt(a.guard, b.guard);
    case Proc::Kind::Restrict:
      if (a.names.size() != b.names.size()) return false;
      for (std::size_t i = 0; i < a.names.size(); ++i) {
        if (!equal(a.names[i], b.names[i])) return false;
      }
      return true;
    case Proc::Kind::Relabel:
      if (a.renames.size() != b.renames.size()) return false;
      for (std::size_t i = 0; i < a.renames.size(); ++i) {
        if (!equal(a.renames[i].first, b.renames[i].first) ||
            !equal(a.renames[i].second, b.renames[i].second)) {
          return false;
        }
      }
      return true;
    case Proc::Kind::Ident:
    case Proc::Kind::Signal: return equal(a.name, b.name);
    default: return true;
  }
}

bool equal(const SpecFile& a, const SpecFile& b) {
  if (a.signalDecls != b.signalDecls) return false;
  if (a.blockingDecls.size() != b.blockingDecls.size()) return false;
  for (std::size_t i = 0; i < a.blockingDecls.size(); ++i) {
    if (!equalAction(a.blockingDecls[i], b.blockingDecls[i])) return false;
  }
  if (a.rangeDecls.size() != b.rangeDecls.size()) return false;
  for (std::size_t i = 0; i < a.rangeDecls.size(); ++i) {
    const auto& x = a.rangeDecls[i];
    const auto& y = b.rangeDecls[i];
    if (x.name != y.name || !equal(*x.lo, *y.lo) || !equal(*x.hi, *y.hi)) return false;
  }
  if (a.equations.size() != b.equations.size()) return false;
  for (std::size_t i = 0; i < a.equations.size(); ++i) {
    const auto& x = a.equations[i];
    const auto& y = b.equations[i];
    if (!equal(x.head, y.head) || !equalOpt(x.guard, y.guard) || !equal(*x.body, *y.body)) {
      return false;
    }
  }
  if (!a.root || !b.root) return !a.root && !b.root;
  return equal(*a.root, *b.root);
}

}  // namespace ccss::syntax
