#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "rewrite_arena/egraph.hpp"
#include "rewrite_arena/error.hpp"
#include "rewrite_arena/sexpr.hpp"

using namespace rewrite_arena;

namespace {

Term T(const char* s) { return parse_sexpr(s); }

}  // namespace

TEST_CASE("adding terms is hash-consed") {
  EGraph g;
  EClassId a = g.add_term(T("(+ x (sin x))"));
  EClassId b = g.add_term(T("(+ x (sin x))"));
  CHECK(a == b);
  CHECK(g.num_classes() == 3);
  CHECK(g.lookup_term(T("(sin x)")).has_value());
  CHECK_FALSE(g.lookup_term(T("(cos x)")).has_value());
  CHECK(g.check_invariants());
}

TEST_CASE("merging restores congruence on rebuild") {
  EGraph g;
  EClassId fa = g.add_term(T("(f a)"));
  EClassId fb = g.add_term(T("(f b)"));
  CHECK(g.find(fa) != g.find(fb));
  g.merge(*g.lookup_term(T("a")), *g.lookup_term(T("b")));
  CHECK_FALSE(g.clean());
  g.rebuild();
  CHECK(g.clean());
  CHECK(g.find(fa) == g.find(fb));
  CHECK(g.unions() == 2);
  CHECK(g.check_invariants());
}

TEST_CASE("congruence propagates upward through several levels") {
  EGraph g;
  EClassId top1 = g.add_term(T("(g (f (h a)))"));
  EClassId top2 = g.add_term(T("(g (f (h b)))"));
  g.merge(*g.lookup_term(T("a")), *g.lookup_term(T("b")));
  g.rebuild();
  CHECK(g.find(top1) == g.find(top2));
}

TEST_CASE("constants are folded and literals injected") {
  EGraph g;
  EClassId c = g.add_term(T("(+ 1 2)"));
  REQUIRE(g.eclass(c).constant.has_value());
  CHECK(std::get<Rational>(*g.eclass(c).constant) == Rational(3));
  CHECK(g.lookup_term(T("3")) == g.find(c));
  CHECK_FALSE(g.contradiction());
}

TEST_CASE("merging different constants is a contradiction") {
  EGraph g;
  EClassId zero = g.add_term(T("0"));
  EClassId one = g.add_term(T("1"));
  g.merge(zero, one);
  g.rebuild();
  CHECK(g.contradiction());
}

TEST_CASE("constants propagate through merges") {
  EGraph g;
  EClassId sum = g.add_term(T("(+ x 1)"));
  g.merge(*g.lookup_term(T("x")), g.add_term(T("2")));
  g.rebuild();
  REQUIRE(g.eclass(sum).constant.has_value());
  CHECK(std::get<Rational>(*g.eclass(sum).constant) == Rational(3));
}

TEST_CASE("matrix dimension analysis") {
  EGraph g(DimEnv{{"A", Dims{2, 3}}, {"B", Dims{3, 4}}, {"C", Dims{4, 5}}});
  EClassId ab = g.add_term(T("(* A B)"));
  CHECK(*g.eclass(ab).dims == Dims{2, 4});
  EClassId c = *g.lookup_term(T("B"));
  CHECK_THROWS_AS(g.merge(ab, c), CostError);
}

TEST_CASE("copies are independent snapshots") {
  EGraph g;
  g.add_term(T("(f a)"));
  g.add_term(T("(f b)"));
  EGraph snap = g;
  g.merge(*g.lookup_term(T("a")), *g.lookup_term(T("b")));
  g.rebuild();
  CHECK(g.num_classes() == 2);
  CHECK(snap.num_classes() == 4);
  CHECK(snap.find(*snap.lookup_term(T("a"))) != snap.find(*snap.lookup_term(T("b"))));
}

TEST_CASE("classes_with_op lists canonical classes") {
  EGraph g;
  g.add_term(T("(+ (sin x) (sin y))"));
  CHECK(g.classes_with_op(Symbol::intern("sin")).size() == 2);
  g.merge(*g.lookup_term(T("x")), *g.lookup_term(T("y")));
  g.rebuild();
  CHECK(g.classes_with_op(Symbol::intern("sin")).size() == 1);
  CHECK(g.classes_with_op(Symbol::intern("cos")).empty());
}

TEST_CASE("property: random merges keep the invariants and match a naive closure") {
  Rng rng(8);
  std::vector<std::string> ops = {"f", "g"};
  std::vector<std::string> leaves = {"a", "b", "c", "d"};
  for (int round = 0; round < 30; ++round) {
    EGraph g;
    std::vector<Term> terms;
    std::vector<EClassId> ids;
    for (int i = 0; i < 12; ++i) {
      terms.push_back(oracle::random_term(rng, ops, leaves, 3));
      ids.push_back(g.add_term(terms.back()));
    }
    // Naive closure over the added terms: union-find by index plus repeated
    // congruence passes.
    std::vector<std::size_t> rep(terms.size());
    for (std::size_t i = 0; i < rep.size(); ++i) rep[i] = i;
    auto root = [&](std::size_t i) {
      while (rep[i] != i) i = rep[i];
      return i;
    };
    for (int m = 0; m < 3; ++m) {
      std::size_t i = rng() % terms.size(), j = rng() % terms.size();
      g.merge(ids[i], ids[j]);
      rep[root(i)] = root(j);
    }
    g.rebuild();
    CHECK(g.check_invariants());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (std::size_t j = 0; j < terms.size(); ++j) {
        if (root(i) == root(j)) CHECK(g.find(ids[i]) == g.find(ids[j]));
      }
    }
  }
}
