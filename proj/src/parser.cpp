#include "ccss/parser.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "ccss/error.hpp"

namespace ccss {

namespace {

using namespace syntax;

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Value value = 0;
  int line = 1;
  int col = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "sum", "in", "when", "tau", "signals", "blocking", "range", "system", "true", "false"};

bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  static const char* twoChar[] = {"..", "==", "!=", "<=", ">=", "&&", "||"};
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < src.size() &&
             (isIdentChar(src[j]) || (src[j] == '_' && j + 1 < src.size() && isIdentChar(src[j + 1])))) {
        ++j;
      }
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      try {
        t.value = std::stol(t.text);
      } catch (const std::out_of_range&) {
        throw SyntaxError("integer literal out of range", line, col);
      }
      advance(j - i);
    } else {
      t.kind = Tok::Punct;
      std::string_view two = src.substr(i, 2);
      bool matched = false;
      for (const char* p : twoChar) {
        if (two == p) {
          t.text = p;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view(".+|\\[]{}()/^',;=<>!-*%_").find(c) == std::string_view::npos) {
          throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  SpecFile spec() {
    SpecFile out;
    while (!atEnd()) {
      if (isKw("signals")) {
        next();
        expect("{");
        if (!isP("}")) {
          do {
            out.signalDecls.push_back(expectIdent());
          } while (accept(","));
        }
        expect("}");
      } else if (isKw("blocking")) {
        next();
        expect("{");
        if (!isP("}")) {
          do {
            if (isKw("tau")) fail("tau cannot be declared blocking");
            ActionExpr a;
            a.polarity = accept("'") ? ActionExpr::Polarity::Co : ActionExpr::Polarity::Plain;
            a.name = nameExpr();
            out.blockingDecls.push_back(std::move(a));
          } while (accept(","));
        }
        expect("}");
      } else if (isKw("range")) {
        next();
        RangeDecl r;
        r.name = expectIdent();
        expect("=");
        r.lo = expr();
        expect("..");
        r.hi = expr();
        out.rangeDecls.push_back(std::move(r));
      } else if (isKw("system")) {
        next();
        if (out.root) fail("duplicate system definition");
        expect("=");
        out.root = sumExpr();
      } else {
        Equation eq;
        eq.line = peek().line;
        eq.head = nameExpr();
        for (const auto& p : eq.head.params) {
          if (p->op != Expr::Op::Var && !constant(*p)) {
            fail("equation parameters must be variables or constants");
          }
        }
        if (acceptKw("when")) eq.guard = expr();
        expect("=");
        eq.body = sumExpr();
        out.equations.push_back(std::move(eq));
      }
      accept(";");
    }
    return out;
  }

  ProcPtr process() {
    ProcPtr p = sumExpr();
    if (!atEnd()) fail("unexpected '" + peek().text + "'");
    return p;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool atEnd() const { return peek().kind == Tok::End; }
  bool isP(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool isKw(std::string_view kw, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == kw;
  }
  bool isName(std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && !kKeywords.contains(peek(k).text);
  }
  bool accept(std::string_view p) {
    if (!isP(p)) return false;
    next();
    return true;
  }
  bool acceptKw(std::string_view kw) {
    if (!isKw(kw)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().col);
  }
  void expect(std::string_view p) {
    if (!accept(p)) {
      fail("expected '" + std::string(p) + "' but found " +
           (atEnd() ? std::string("end of input") : "'" + peek().text + "'"));
    }
  }
  std::string expectIdent() {
    if (!isName()) fail("expected identifier");
    return next().text;
  }

  // `[` at the current position opens a relabelling rather than an index.
  bool bracketIsRelabel() const {
    int depth = 0;
    for (std::size_t k = pos_; k < toks_.size(); ++k) {
      const Token& t = toks_[k];
      if (t.kind != Tok::Punct) continue;
      if (t.text == "[" || t.text == "(") ++depth;
      if (t.text == "]" || t.text == ")") {
        if (--depth == 0) return false;
      }
      if (t.text == "/" && depth == 1) return true;
    }
    return false;
  }

  NameExpr nameExpr() {
    NameExpr n;
    n.base = expectIdent();
    if (!isP("[") || bracketIsRelabel()) return n;
    next();
    n.params.push_back(expr());
    expect("]");
    while (accept("_")) {
      if (peek().kind == Tok::Int) {
        n.params.push_back(lit(next().value));
      } else if (accept("(")) {
        n.params.push_back(expr());
        expect(")");
      } else if (isName()) {
        // `j_1` lexes as one identifier; split it back into parameters.
        std::string text = next().text;
        std::size_t start = 0;
        while (true) {
          std::size_t us = text.find('_', start);
          std::string piece = text.substr(start, us == std::string::npos ? us : us - start);
          if (std::isdigit(static_cast<unsigned char>(piece[0]))) {
            for (char ch : piece) {
              if (!std::isdigit(static_cast<unsigned char>(ch))) fail("bad parameter '" + piece + "'");
            }
            n.params.push_back(lit(std::stol(piece)));
          } else {
            n.params.push_back(var(piece));
          }
          if (us == std::string::npos) break;
          start = us + 1;
        }
      } else {
        fail("expected parameter after '_'");
      }
    }
    return n;
  }

  // Expressions, loosest first.
  ExprPtr expr() { return orExpr(); }
  ExprPtr orExpr() {
    ExprPtr l = andExpr();
    while (accept("||")) l = binary(Expr::Op::Or, l, andExpr());
    return l;
  }
  ExprPtr andExpr() {
    ExprPtr l = cmpExpr();
    while (accept("&&")) l = binary(Expr::Op::And, l, cmpExpr());
    return l;
  }
  ExprPtr cmpExpr() {
    ExprPtr l = addExpr();
    static const std::pair<const char*, Expr::Op> ops[] = {
        {"==", Expr::Op::Eq}, {"!=", Expr::Op::Ne}, {"<=", Expr::Op::Le},
        {">=", Expr::Op::Ge}, {"<", Expr::Op::Lt},  {">", Expr::Op::Gt}};
    for (const auto& [text, op] : ops) {
      if (accept(text)) return binary(op, l, addExpr());
    }
    return l;
  }
  ExprPtr addExpr() {
    ExprPtr l = mulExpr();
    while (true) {
      if (accept("+")) {
        l = binary(Expr::Op::Add, l, mulExpr());
      } else if (accept("-")) {
        l = binary(Expr::Op::Sub, l, mulExpr());
      } else {
        return l;
      }
    }
  }
  ExprPtr mulExpr() {
    ExprPtr l = unaryExpr();
    while (true) {
      if (accept("*")) {
        l = binary(Expr::Op::Mul, l, unaryExpr());
      } else if (accept("%")) {
        l = binary(Expr::Op::Mod, l, unaryExpr());
      } else {
        return l;
      }
    }
  }
  ExprPtr unaryExpr() {
    if (accept("-")) return unary(Expr::Op::Neg, unaryExpr());
    if (accept("!")) return unary(Expr::Op::Not, unaryExpr());
    return primaryExpr();
  }
  ExprPtr primaryExpr() {
    if (peek().kind == Tok::Int) return lit(next().value);
    if (acceptKw("true")) return lit(1);
    if (acceptKw("false")) return lit(0);
    if (isName()) return var(next().text);
    if (accept("(")) {
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    fail("expected expression");
  }

  // Processes.
  ProcPtr sumExpr() {
    std::vector<ProcPtr> branches{summand()};
    while (accept("+")) branches.push_back(summand());
    return branches.size() == 1 ? branches.front() : mkSum(std::move(branches));
  }

  ProcPtr summand() {
    if (!acceptKw("sum")) return parExpr();
    std::string v = expectIdent();
    if (!acceptKw("in")) fail("expected 'in'");
    Range r;
    if (isName() && (isP(".", 1) || isKw("when", 1))) {
      r.named = next().text;
    } else {
      r.lo = expr();
      expect("..");
      r.hi = expr();
    }
    ExprPtr guard;
    if (acceptKw("when")) guard = expr();
    expect(".");
    return mkIndexedSum(std::move(v), std::move(r), std::move(guard), summand());
  }

  ProcPtr parExpr() {
    ProcPtr l = prefixed();
    while (accept("|")) l = mkPar(l, prefixed());
    return l;
  }

  // `(a + 'b + tau).P` prefix choice; nullopt with position restored otherwise.
  std::optional<std::vector<ActionExpr>> actionChoice() {
    const std::size_t saved = pos_;
    try {
      expect("(");
      std::vector<ActionExpr> acts;
      do {
        acts.push_back(action());
      } while (accept("+"));
      expect(")");
      expect(".");
      return acts;
    } catch (const SyntaxError&) {
      pos_ = saved;
      return std::nullopt;
    }
  }

  ActionExpr action() {
    ActionExpr a;
    if (acceptKw("tau")) return a;
    a.polarity = accept("'") ? ActionExpr::Polarity::Co : ActionExpr::Polarity::Plain;
    a.name = nameExpr();
    return a;
  }

  ProcPtr prefixed() {
    if (isP("'") || isKw("tau")) {
      ActionExpr a = action();
      expect(".");
      return mkPrefix(std::move(a), prefixed());
    }
    if (isP("(")) {
      if (auto acts = actionChoice()) {
        ProcPtr body = prefixed();
        std::vector<ProcPtr> branches;
        for (auto& a : *acts) branches.push_back(mkPrefix(std::move(a), body));
        return branches.size() == 1 ? branches.front() : mkSum(std::move(branches));
      }
    }
    if (isName()) {
      NameExpr n = nameExpr();
      if (accept(".")) {
        ActionExpr a;
        a.polarity = ActionExpr::Polarity::Plain;
        a.name = std::move(n);
        return mkPrefix(std::move(a), prefixed());
      }
      return postfix(mkIdent(std::move(n)));
    }
    return postfix(atom());
  }

  ProcPtr atom() {
    if (peek().kind == Tok::Int) {
      if (peek().value != 0) fail("only 0 may be used as a process");
      next();
      return mkNil();
    }
    if (accept("(")) {
      ProcPtr p = sumExpr();
      expect(")");
      return p;
    }
    if (isName()) return mkIdent(nameExpr());
    fail(atEnd() ? "unexpected end of input" : "unexpected '" + peek().text + "'");
  }

  ProcPtr postfix(ProcPtr p) {
    while (true) {
      if (accept("\\")) {
        expect("{");
        std::vector<NameExpr> names;
        if (!isP("}")) {
          do {
            names.push_back(nameExpr());
          } while (accept(","));
        }
        expect("}");
        p = mkRestrict(p, std::move(names));
      } else if (isP("[")) {
        next();
        std::vector<std::pair<NameExpr, NameExpr>> renames;
        do {
          NameExpr to = nameExpr();
          expect("/");
          NameExpr from = nameExpr();
          renames.emplace_back(std::move(to), std::move(from));
        } while (accept(","));
        expect("]");
        p = mkRelabel(p, std::move(renames));
      } else if (accept("^")) {
        p = mkSignal(p, nameExpr());
      } else {
        return p;
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Expression precedence: Or 1, And 2, Cmp 3, Add 4, Mul 5, unary 6, primary 7.
int exprLevel(const Expr& e) {
  using Op = Expr::Op;
  switch (e.op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: return 3;
    case Op::Add: case Op::Sub: return 4;
    case Op::Mul: case Op::Mod: return 5;
    case Op::Neg: case Op::Not: return 6;
    case Op::Lit: return e.value < 0 ? 6 : 7;
    case Op::Var: return 7;
  }
  return 7;
}

const char* opText(Expr::Op op) {
  using Op = Expr::Op;
  switch (op) {
    case Op::Or: return " || ";
    case Op::And: return " && ";
    case Op::Eq: return " == ";
    case Op::Ne: return " != ";
    case Op::Lt: return " < ";
    case Op::Le: return " <= ";
    case Op::Gt: return " > ";
    case Op::Ge: return " >= ";
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Mul: return " * ";
    case Op::Mod: return " % ";
    default: return "";
  }
}

void printExpr(std::ostream& os, const Expr& e, int min) {
  const int level = exprLevel(e);
  if (level < min) os << '(';
  switch (e.op) {
    case Expr::Op::Lit: os << e.value; break;
    case Expr::Op::Var: os << e.var; break;
    case Expr::Op::Neg:
      os << '-';
      printExpr(os, *e.lhs, 6);
      break;
    case Expr::Op::Not:
      os << '!';
      printExpr(os, *e.lhs, 6);
      break;
    default:
      printExpr(os, *e.lhs, level == 3 ? 4 : level);
      os << opText(e.op);
      printExpr(os, *e.rhs, level + 1);
  }
  if (level < min) os << ')';
}

void printName(std::ostream& os, const NameExpr& n) {
  os << n.base;
  for (std::size_t i = 0; i < n.params.size(); ++i) {
    const Expr& p = *n.params[i];
    if (i == 0) {
      os << '[';
      printExpr(os, p, 0);
      os << ']';
    } else if ((p.op == Expr::Op::Lit && p.value >= 0) ||
               (p.op == Expr::Op::Var && p.var.find('_') == std::string::npos)) {
      os << '_';
      printExpr(os, p, 0);
    } else {
      os << "_(";
      printExpr(os, p, 0);
      os << ')';
    }
  }
}

void printAction(std::ostream& os, const ActionExpr& a) {
  if (a.polarity == ActionExpr::Polarity::Tau) {
    os << "tau";
    return;
  }
  if (a.polarity == ActionExpr::Polarity::Co) os << '\'';
  printName(os, a.name);
}

// Process precedence: sums 0, par 1, prefix 2, postfix operators 3, atoms 4.
int procLevel(const Proc& p) {
  switch (p.kind) {
    case Proc::Kind::Sum:
    case Proc::Kind::IndexedSum: return 0;
    case Proc::Kind::Par: return 1;
    case Proc::Kind::Prefix: return 2;
    case Proc::Kind::Restrict:
    case Proc::Kind::Relabel:
    case Proc::Kind::Signal: return 3;
    default: return 4;
  }
}

void printProc(std::ostream& os, const Proc& p, int min) {
  const int level = procLevel(p);
  const bool paren = level < min;
  if (paren) os << '(';
  switch (p.kind) {
    case Proc::Kind::Nil: os << '0'; break;
    case Proc::Kind::Ident: printName(os, p.name); break;
    case Proc::Kind::Prefix:
      printAction(os, p.action);
      os << '.';
      printProc(os, *p.children[0], 2);
      break;
    case Proc::Kind::Sum:
      for (std::size_t i = 0; i < p.children.size(); ++i) {
        if (i) os << " + ";
        printProc(os, *p.children[i], 1);
      }
      break;
    case Proc::Kind::IndexedSum: {
      os << "sum " << p.var << " in ";
      if (!p.range.named.empty()) {
        os << p.range.named;
      } else {
        printExpr(os, *p.range.lo, 0);
        os << "..";
        printExpr(os, *p.range.hi, 0);
      }
      if (p.guard) {
        os << " when ";
        printExpr(os, *p.guard, 0);
      }
      os << " . ";
      const Proc& body = *p.children[0];
      printProc(os, body, body.kind == Proc::Kind::IndexedSum ? 0 : 1);
      break;
    }
    case Proc::Kind::Par:
      printProc(os, *p.children[0], 1);
      os << " | ";
      printProc(os, *p.children[1], 2);
      break;
    case Proc::Kind::Restrict:
      printProc(os, *p.children[0], 3);
      os << "\\{";
      for (std::size_t i = 0; i < p.names.size(); ++i) {
        if (i) os << ", ";
        printName(os, p.names[i]);
      }
      os << '}';
      break;
    case Proc::Kind::Relabel:
      printProc(os, *p.children[0], 3);
      os << '[';
      for (std::size_t i = 0; i < p.renames.size(); ++i) {
        if (i) os << ", ";
        printName(os, p.renames[i].first);
        os << '/';
        printName(os, p.renames[i].second);
      }
      os << ']';
      break;
    case Proc::Kind::Signal:
      printProc(os, *p.children[0], 3);
      os << '^';
      printName(os, p.name);
      break;
  }
  if (paren) os << ')';
}

}  // namespace

SpecFile parseSpec(std::string_view text) { return Parser(text).spec(); }

ProcPtr parseProcess(std::string_view text) { return Parser(text).process(); }

Term parseTerm(std::string_view text, const Environment& env) {
  return env.ground(*parseProcess(text));
}

Environment loadSpec(std::string_view text) { return Environment::fromSpec(parseSpec(text)); }

Environment loadSpecFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return loadSpec(ss.str());
}

std::string print(const Expr& e) {
  std::ostringstream os;
  printExpr(os, e, 0);
  return os.str();
}

std::string print(const NameExpr& n) {
  std::ostringstream os;
  printName(os, n);
  return os.str();
}

std::string print(const ActionExpr& a) {
  std::ostringstream os;
  printAction(os, a);
  return os.str();
}

std::string print(const Proc& p) {
  std::ostringstream os;
  printProc(os, p, 0);
  return os.str();
}

std::string print(const SpecFile& spec) {
  std::ostringstream os;
  if (!spec.signalDecls.empty()) {
    os << "signals {";
    for (std::size_t i = 0; i < spec.signalDecls.size(); ++i) {
      os << (i ? ", " : " ") << spec.signalDecls[i];
    }
    os << " }\n";
  }
  if (!spec.blockingDecls.empty()) {
    os << "blocking {";
    for (std::size_t i = 0; i < spec.blockingDecls.size(); ++i) {
      os << (i ? ", " : " ");
      printAction(os, spec.blockingDecls[i]);
    }
    os << " }\n";
  }
  for (const auto& r : spec.rangeDecls) {
    os << "range " << r.name << " = ";
    printExpr(os, *r.lo, 0);
    os << "..";
    printExpr(os, *r.hi, 0);
    os << '\n';
  }
  for (const auto& eq : spec.equations) {
    printName(os, eq.head);
    if (eq.guard) {
      os << " when ";
      printExpr(os, *eq.guard, 0);
    }
    os << " = ";
    printProc(os, *eq.body, 0);
    os << '\n';
  }
  if (spec.root) {
    os << "system = ";
    printProc(os, *spec.root, 0);
    os << '\n';
  }
  return os.str();
}

ProcPtr toSyntax(Term t) {
  switch (t.kind()) {
    case TermKind::Nil: return mkNil();
    case TermKind::Prefix: {
      const Action& a = t.action();
      ActionExpr ae;
      if (!a.isTau()) {
        ae.polarity = a.kind == ActionKind::CoName ? ActionExpr::Polarity::Co
                                                   : ActionExpr::Polarity::Plain;
        ae.name = literalName(a.name);
      }
      return mkPrefix(std::move(ae), toSyntax(t.body()));
    }
    case TermKind::Sum: {
      std::vector<ProcPtr> branches;
      for (Term c : t.children()) branches.push_back(toSyntax(c));
      return mkSum(std::move(branches));
    }
    case TermKind::Par: return mkPar(toSyntax(t.left()), toSyntax(t.right()));
    case TermKind::Restrict: {
      std::vector<NameExpr> names;
      for (Name n : t.restriction()) names.push_back(literalName(n));
      return mkRestrict(toSyntax(t.body()), std::move(names));
    }
    case TermKind::Relabel: {
      std::vector<std::pair<NameExpr, NameExpr>> renames;
      const auto& f = t.relabelling();
      for (const auto* m : {&f.handshakeMap(), &f.signalMap()}) {
        for (const auto& [from, to] : *m) renames.emplace_back(literalName(to), literalName(from));
      }
      return mkRelabel(toSyntax(t.body()), std::move(renames));
    }
    case TermKind::Ident: return mkIdent(literalName(t.name()));
    case TermKind::Signal: return mkSignal(toSyntax(t.body()), literalName(t.name()));
  }
  return mkNil();
}

std::string print(Term t) { return print(*toSyntax(t)); }

}  // namespace ccss
