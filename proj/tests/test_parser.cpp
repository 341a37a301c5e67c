#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ccss/error.hpp"
#include "ccss/parser.hpp"

using namespace ccss;

namespace {

Environment sigEnv() { return Environment::withSignals({"s", "t"}); }

}  // namespace

TEST_CASE("operator precedence") {
  Environment env = sigEnv();
  Name a("a");
  Name b("b");
  Term t = parseTerm("a.0 + b.0 | c.0", env);
  REQUIRE(t.kind() == TermKind::Sum);
  CHECK(t.children()[1].kind() == TermKind::Par);
  Term u = parseTerm("a.b.0^s", env);
  REQUIRE(u.kind() == TermKind::Prefix);
  CHECK(u.body().kind() == TermKind::Prefix);
  CHECK(u.body().body().kind() == TermKind::Signal);
  Term v = parseTerm("a.0 | b.0 | c.0", env);
  CHECK(v.left().kind() == TermKind::Par);
  Term w = parseTerm("(a.0 | b.0)\\{a}[c/b]^s", env);
  CHECK(w.kind() == TermKind::Signal);
  CHECK(w.body().kind() == TermKind::Relabel);
  CHECK(w.body().body().kind() == TermKind::Restrict);
}

TEST_CASE("indexed names and parameter splitting") {
  Environment env = loadSpec("W[i]_j_k = x[i]_j_(k+1).0\nsystem = W[1]_2_3");
  Term t = env.resolve(Name("W", {1, 2, 3}));
  CHECK(t.action().name == Name("x", {1, 2, 4}));
  CHECK(parseProcess("X[b/a]")->kind == syntax::Proc::Kind::Relabel);
  CHECK(parseProcess("X[1]")->kind == syntax::Proc::Kind::Ident);
  CHECK(parseProcess("X[1][b/a]")->kind == syntax::Proc::Kind::Relabel);
  CHECK(parseTerm("m[1]_(-2).0", env).action().name == Name("m", {1, -2}));
}

TEST_CASE("prefix choice sugar") {
  Environment env = sigEnv();
  CHECK(parseTerm("(a + 'b + tau).0", env) ==
        parseTerm("a.0 + 'b.0 + tau.0", env));
  CHECK(parseTerm("(a.0 + b.0)", env) == parseTerm("a.0 + b.0", env));
}

TEST_CASE("syntax errors carry positions") {
  try {
    parseSpec("X = a.\n  | b");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(parseProcess("a.0 +"), SyntaxError);
  CHECK_THROWS_AS(parseProcess("a.0 b"), SyntaxError);
  CHECK_THROWS_AS(parseProcess("3"), SyntaxError);
  CHECK_THROWS_AS(parseSpec("X = a.0 @"), SyntaxError);
}

TEST_CASE("scope errors") {
  CHECK_THROWS_AS(loadSpec("system = a[i].0"), ScopeError);
  CHECK_THROWS_AS(loadSpec("system = sum v in R . a[v].0"), ScopeError);
  Environment env = loadSpec("range R = 1..3\nsystem = sum v in R . a[v].0");
  CHECK(env.root().children().size() == 3);
}

TEST_CASE("spec files round trip through the printer") {
  const char* text = R"(
    # comment
    signals { s, t }
    blocking { a, 'b }
    range R = 0..2
    X[i]_j when i < j && !(i == 0) = sum v in R when v != i . c[v]_i.X[v]_j + s.0
    Y = (a.0 | 'a.Y)\{a}[d/c] ^ t
    Z[i] = (sum v in 0..i . e[v].0) | (u.0 + w.0)
    system = X[1]_2 | Y
  )";
  syntax::SpecFile spec = parseSpec(text);
  std::string printed = print(spec);
  syntax::SpecFile again = parseSpec(printed);
  CHECK(syntax::equal(spec, again));
  CHECK(print(again) == printed);
}

namespace {

Term randomTerm(std::mt19937& rng, int depth) {
  static const Name names[] = {Name("a"), Name("b"), Name("x", {1, 2})};
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  auto nm = [&] { return names[rng() % 3]; };
  switch (pick(rng)) {
    case 0: return nil();
    case 1: return ident(Name("X", {static_cast<Value>(rng() % 3)}));
    case 2: return prefix(Action::tau(), nil());
    case 3: return prefix(Action::handshake(nm()), randomTerm(rng, depth - 1));
    case 4: return prefix(Action::coname(nm()), randomTerm(rng, depth - 1));
    case 5: return prefix(Action::signal(Name("s")), randomTerm(rng, depth - 1));
    case 6: return sum({randomTerm(rng, depth - 1), randomTerm(rng, depth - 1)});
    case 7: return par(randomTerm(rng, depth - 1), randomTerm(rng, depth - 1));
    case 8:
      return (rng() % 2) ? restrict(randomTerm(rng, depth - 1), {nm()})
                         : relabel(randomTerm(rng, depth - 1),
                                   Relabelling({{Name("a"), nm()}}, {{Name("s"), Name("t")}}));
    default: return signalling(randomTerm(rng, depth - 1), Name("t"));
  }
}

}  // namespace

TEST_CASE("printed ground terms parse back to the same term") {
  Environment env = sigEnv();
  std::mt19937 rng(7);
  for (int i = 0; i < 2000; ++i) {
    Term t = randomTerm(rng, 5);
    std::string text = print(t);
    INFO(text);
    CHECK(parseTerm(text, env) == t);
  }
}
