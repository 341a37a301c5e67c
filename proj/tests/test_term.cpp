#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccss/environment.hpp"
#include "ccss/error.hpp"
#include "ccss/name.hpp"
#include "ccss/parser.hpp"
#include "ccss/term.hpp"

using namespace ccss;

TEST_CASE("names are interned and render with parameters") {
  Name a("x", {1, 2, 3});
  Name b("x", {1, 2, 3});
  CHECK(a == b);
  CHECK(a.str() == "x[1]_2_3");
  CHECK(Name("y").str() == "y");
  CHECK(Name("z", {-1, -2}).str() == "z[-1]_(-2)");
  CHECK(Name("x") < Name("y"));
  CHECK(Name("x", {1}) < Name("x", {2}));
}

TEST_CASE("actions") {
  Name a("a");
  CHECK(Action::handshake(a).complement() == Action::coname(a));
  CHECK(Action::coname(a).complement() == Action::handshake(a));
  CHECK(Action::signal(a).complement() == Action::signal(a));
  CHECK(Action::tau().str() == "tau");
  CHECK(Action::coname(a).str() == "'a");
}

TEST_CASE("terms are hash-consed") {
  Action a = Action::handshake(Name("a"));
  Term t1 = prefix(a, nil());
  Term t2 = prefix(a, nil());
  CHECK(t1 == t2);
  CHECK(t1.id() == t2.id());
  CHECK(par(t1, nil()) != par(nil(), t1));
}

TEST_CASE("sums flatten and collapse") {
  Term a = prefix(Action::handshake(Name("a")), nil());
  Term b = prefix(Action::handshake(Name("b")), nil());
  Term c = prefix(Action::handshake(Name("c")), nil());
  CHECK(sum({}) == nil());
  CHECK(sum({a}) == a);
  Term s = sum({sum({a, b}), c});
  CHECK(s.kind() == TermKind::Sum);
  CHECK(s.children().size() == 3);
  CHECK(s == sum({a, b, c}));
}

TEST_CASE("restriction sets are normalized") {
  Term t = restrict(nil(), {Name("b"), Name("a"), Name("b")});
  CHECK(t.restriction().size() == 2);
  CHECK(t == restrict(nil(), {Name("a"), Name("b")}));
  CHECK(t.restricts(Name("a")));
  CHECK_FALSE(t.restricts(Name("c")));
}

TEST_CASE("relabelling applies to handshakes and signals separately") {
  Relabelling f({{Name("a"), Name("b")}}, {{Name("s"), Name("t")}});
  CHECK(f.apply(Action::handshake(Name("a"))) == Action::handshake(Name("b")));
  CHECK(f.apply(Action::coname(Name("a"))) == Action::coname(Name("b")));
  CHECK(f.apply(Action::signal(Name("s"))) == Action::signal(Name("t")));
  CHECK(f.apply(Action::signal(Name("a"))) == Action::signal(Name("a")));
  CHECK(f.apply(Action::tau()) == Action::tau());
}

TEST_CASE("resolve instantiates parameterized equations") {
  Environment env = loadSpec(R"(
    signals { s }
    X[i] when i < 3 = a[i].X[i + 1]
    X[i] when i >= 3 = 0
    Y[i]_j = sum k in 0..j when k != i . b[k].0
  )");
  Term x0 = env.resolve(Name("X", {0}));
  CHECK(x0 == prefix(Action::handshake(Name("a", {0})), ident(Name("X", {1}))));
  CHECK(env.resolve(Name("X", {5})) == nil());
  Term y = env.resolve(Name("Y", {1, 2}));
  CHECK(y == sum({prefix(Action::handshake(Name("b", {0})), nil()),
                  prefix(Action::handshake(Name("b", {2})), nil())}));
  CHECK(env.resolve(Name("X", {0})) == x0);
  CHECK_THROWS_AS(env.resolve(Name("Z")), UnknownAgent);
  CHECK_THROWS_AS(env.resolve(Name("X", {1, 2})), ArityMismatch);
}

TEST_CASE("overlapping equations are ambiguous") {
  Environment env = loadSpec("X[i] = 0\nX[i] when i > 0 = a.0");
  CHECK(env.resolve(Name("X", {0})) == nil());
  CHECK_THROWS_AS(env.resolve(Name("X", {1})), AmbiguousAgent);
}

TEST_CASE("signal declarations decide action kinds") {
  Environment env = loadSpec("signals { s }\nsystem = s.0 + a.0 + (b.0)^s");
  Term r = env.root();
  REQUIRE(r.kind() == TermKind::Sum);
  CHECK(r.children()[0].action() == Action::signal(Name("s")));
  CHECK(r.children()[1].action() == Action::handshake(Name("a")));
}

TEST_CASE("blocking classification") {
  Environment env = loadSpec("signals { s }\nblocking { a, 'b, c[1], s }");
  CHECK(env.isBlocking(Action::handshake(Name("a"))));
  CHECK(env.isBlocking(Action::coname(Name("a"))));
  CHECK_FALSE(env.isBlocking(Action::handshake(Name("b"))));
  CHECK(env.isBlocking(Action::coname(Name("b"))));
  CHECK(env.isBlocking(Action::handshake(Name("c", {1}))));
  CHECK_FALSE(env.isBlocking(Action::handshake(Name("c", {2}))));
  CHECK(env.isBlocking(Action::signal(Name("s"))));
  CHECK_FALSE(env.isBlocking(Action::tau()));
  CHECK_THROWS_AS(loadSpec("blocking { tau }"), SyntaxError);
}

TEST_CASE("validation reports ill-formed terms") {
  Environment env = loadSpec(R"(
    signals { s }
    blocking { a }
    P = (a.0 | b.0)\{a, b}
    Q = 'a.0 [b/c]
    R = 's.0
    system = P | Q | R | U | (0)^t
  )");
  auto report = validate(env, env.root());
  auto has = [&](Violation::Kind k) {
    for (const auto& v : report.violations) {
      if (v.kind == k) return true;
    }
    return false;
  };
  CHECK(has(Violation::Kind::RestrictedNonBlocking));
  CHECK(has(Violation::Kind::SignalCoName));
  CHECK(has(Violation::Kind::UnknownAgent));
  CHECK(has(Violation::Kind::UndeclaredSignal));
  CHECK_FALSE(has(Violation::Kind::RelabelIntoBlocking));

  Environment env2 = loadSpec("blocking { b }\nsystem = (a.0)[b/a]");
  auto r2 = validate(env2, env2.root());
  REQUIRE(r2.violations.size() == 2);
  for (const auto& v : r2.violations) CHECK(v.kind == Violation::Kind::RelabelIntoBlocking);

  Environment ok = loadSpec("blocking { a }\nX = a.X\nsystem = (X | 'a.0)\\{a}");
  CHECK(validate(ok, ok.root()).ok());
}
