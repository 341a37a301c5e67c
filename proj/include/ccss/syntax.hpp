#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccss/name.hpp"

// Unevaluated syntax of `.ccss` files: integer expressions, parameterized
// names, and process templates with indexed sums. Grounding against an
// Environment turns templates into interned Terms.
namespace ccss::syntax {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Lit, Var, Neg, Not, Add, Sub, Mul, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
  Op op = Op::Lit;
  Value value = 0;
  std::string var;
  ExprPtr lhs;
  ExprPtr rhs;
};

ExprPtr lit(Value v);
ExprPtr var(std::string name);
ExprPtr unary(Expr::Op op, ExprPtr operand);
ExprPtr binary(Expr::Op op, ExprPtr lhs, ExprPtr rhs);

using Bindings = std::map<std::string, Value, std::less<>>;

/// Throws ScopeError on an unbound variable.
Value eval(const Expr& e, const Bindings& env);
bool equal(const Expr& a, const Expr& b);
/// Literal value if the expression has no variables.
std::optional<Value> constant(const Expr& e);

struct NameExpr {
  std::string base;
  std::vector<ExprPtr> params;
};

Name evalName(const NameExpr& n, const Bindings& env);
bool equal(const NameExpr& a, const NameExpr& b);
NameExpr literalName(Name n);

struct ActionExpr {
  enum class Polarity { Plain, Co, Tau };
  Polarity polarity = Polarity::Tau;
  NameExpr name;
};

struct Range {
  std::string named;  // declared range, or empty for an inline lo..hi
  ExprPtr lo;
  ExprPtr hi;
};

struct Proc;
using ProcPtr = std::shared_ptr<const Proc>;

struct Proc {
  enum class Kind { Nil, Prefix, Sum, IndexedSum, Par, Restrict, Relabel, Ident, Signal };
  Kind kind = Kind::Nil;
  ActionExpr action;                                    // Prefix
  std::vector<ProcPtr> children;                        // Sum branches, Par {l, r}, unary body
  std::string var;                                      // IndexedSum
  Range range;                                          // IndexedSum
  ExprPtr guard;                                        // IndexedSum, may be null
  std::vector<NameExpr> names;                          // Restrict
  std::vector<std::pair<NameExpr, NameExpr>> renames;   // Relabel: (new, old)
  NameExpr name;                                        // Ident agent, Signal signal
};

ProcPtr mkNil();
ProcPtr mkPrefix(ActionExpr a, ProcPtr body);
ProcPtr mkSum(std::vector<ProcPtr> branches);
ProcPtr mkIndexedSum(std::string var, Range range, ExprPtr guard, ProcPtr body);
ProcPtr mkPar(ProcPtr l, ProcPtr r);
ProcPtr mkRestrict(ProcPtr body, std::vector<NameExpr> names);
ProcPtr mkRelabel(ProcPtr body, std::vector<std::pair<NameExpr, NameExpr>> renames);
ProcPtr mkIdent(NameExpr agent);
ProcPtr mkSignal(ProcPtr body, NameExpr signal);

bool equal(const Proc& a, const Proc& b);

struct Equation {
  NameExpr head;  // params are variables or integer literals
  ExprPtr guard;  // may be null
  ProcPtr body;
  int line = 0;
};

struct RangeDecl {
  std::string name;
  ExprPtr lo;
  ExprPtr hi;
};

struct SpecFile {
  std::vector<std::string> signalDecls;
  std::vector<ActionExpr> blockingDecls;
  std::vector<RangeDecl> rangeDecls;
  std::vector<Equation> equations;
  ProcPtr root;
};

bool equal(const SpecFile& a, const SpecFile& b);

}  // namespace ccss::syntax
