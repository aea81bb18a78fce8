#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "rewrite_arena/benchmarks.hpp"
#include "rewrite_arena/cost.hpp"
#include "rewrite_arena/error.hpp"
#include "rewrite_arena/sexpr.hpp"

using namespace rewrite_arena;

namespace {

Term T(const char* s) { return parse_sexpr(s); }

DimEnv chain_env(const std::vector<std::int64_t>& dims) {
  DimEnv env;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    env.bind(Symbol::intern("A" + std::to_string(i + 1)), Dims{dims[i], dims[i + 1]});
  }
  return env;
}

}  // namespace

TEST_CASE("ast size counts every node") {
  AstSize m;
  CHECK(cost(m, T("x")) == 1);
  CHECK(cost(m, T("(+ (pow (sin x) 4) 1)")) == 6);
}

TEST_CASE("weighted ast size") {
  WeightedAstSize m({{Symbol::intern("int"), 100.0}, {Symbol::intern("true"), 0.0}});
  CHECK(cost(m, T("(int x x)")) == 102);
  CHECK(cost(m, T("true")) == 0);
  CHECK(cost(m, T("(|| true x)")) == 2);
  CHECK_THROWS_AS(WeightedAstSize({{Symbol::intern("x"), -1.0}}), CostError);
}

TEST_CASE("integral cost squares the size under int") {
  IntegSquare m;
  // int (x + x) dx: (3 + 1)^2; after linearity: 1 + 2 * (1 + 1)^2.
  CHECK(cost(m, T("(int (+ x x) x)")) == 16);
  CHECK(cost(m, T("(+ (int x x) (int x x))")) == 9);
  CHECK(integ_cost(T("(int (* x (cos x)) x)")) == 25);
  CHECK(cost(m, T("(+ (* x (sin x)) (cos x))")) == 7);
  CHECK(cost(m, T("(d (sin x) x)")) == 9);
}

TEST_CASE("matmul scalar operation count") {
  MatMulScalarOps m(chain_env({2, 3, 4, 5}));
  CHECK(cost(m, T("(* (* A1 A2) A3)")) == 64);
  CHECK(cost(m, T("(* A1 (* A2 A3))")) == 90);
  CHECK(cost(m, T("A2")) == 0);
  CHECK(dims_of(m.env(), T("(* A1 A2)")) == Dims{2, 4});
  CHECK_THROWS_AS(cost(m, T("(* A2 A1)")), CostError);
  CHECK_THROWS_AS(cost(m, T("(* A1 B)")), CostError);
  CHECK_THROWS_AS(DimEnv({{"Z", Dims{0, 3}}}), CostError);
}

TEST_CASE("matmul errors name the failing position") {
  DimEnv env = chain_env({2, 3, 4});
  try {
    dims_of(env, T("(* A1 (* A2 A1))"));
    FAIL("expected a dimension error");
  } catch (const CostError& e) {
    CHECK(std::string(e.what()).find("[1]") != std::string::npos);
  }
}

TEST_CASE("goal indicator is zero exactly at the goal") {
  GoalIndicator m(T("(g b b)"));
  CHECK(cost(m, T("(g b b)")) == 0);
  CHECK(cost(m, T("(g b a)")) == 1);
  CHECK(cost(m, T("(f b b)")) == 1);
  CHECK(cost(m, T("b")) == 1);
  CHECK(cost(m, T("(h (g b b))")) == 1);
}

TEST_CASE("property: matmul cost agrees with the direct recursion on every association") {
  Rng rng(17);
  std::uniform_int_distribution<std::int64_t> dim(1, 30);
  for (int round = 0; round < 20; ++round) {
    std::size_t n = 2 + rng() % 5;
    std::vector<std::int64_t> dims(n + 1);
    for (auto& d : dims) d = dim(rng);
    MatMulScalarOps m(chain_env(dims));
    for (const Term& t : oracle::all_associations(n)) {
      CHECK(cost(m, t) == static_cast<double>(oracle::matmul_tree_cost(t, dims)));
    }
  }
}

TEST_CASE("property: context-free delta equals full recomputation") {
  Rng rng(23);
  AstSize ast;
  WeightedAstSize weighted({{Symbol::intern("*"), 3.0}, {Symbol::intern("x"), 0.5}});
  std::vector<std::string> ops = {"+", "*", "/"};
  std::vector<std::string> leaves = {"x", "y", "1"};
  auto rules = builtin_ruleset("trig");
  CandidateSet cs;
  for (const CostModel* m : {static_cast<const CostModel*>(&ast), static_cast<const CostModel*>(&weighted)}) {
    REQUIRE(m->context_free());
    CostCache cache(*m);
    for (int i = 0; i < 100; ++i) {
      Term t = oracle::random_term(rng, ops, leaves, 4);
      cs.collect(t, *rules);
      for (std::size_t k = 0; k < cs.size(); ++k) {
        double fast = cache.value(cs[k].replacement).cost - cache.value(cs[k].original).cost;
        double full = cost(*m, cs.materialize(k)) - cost(*m, t);
        CHECK(fast == doctest::Approx(full));
      }
    }
  }
}

TEST_CASE("property: matmul delta is exact when the subtree keeps its shape") {
  Rng rng(29);
  std::vector<std::int64_t> dims = {5, 2, 9, 4, 7, 3, 6};
  MatMulScalarOps m(chain_env(dims));
  auto rules = builtin_ruleset("assoc");
  CandidateSet cs;
  for (int i = 0; i < 50; ++i) {
    Term t = random_association(6, rng);
    cs.collect(t, *rules);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      NodeValue before = evaluate(m, cs[k].original);
      NodeValue after = evaluate(m, cs[k].replacement);
      REQUIRE(m.same_interface(before, after));
      CHECK(after.cost - before.cost == cost(m, cs.materialize(k)) - cost(m, t));
    }
  }
}

TEST_CASE("cost cache agrees with direct evaluation and survives eviction") {
  AstSize m;
  CostCache cache(m, 8);
  Rng rng(1);
  std::vector<std::string> ops = {"+", "*"};
  std::vector<std::string> leaves = {"x", "y"};
  for (int i = 0; i < 100; ++i) {
    Term t = oracle::random_term(rng, ops, leaves, 5);
    CHECK(cache.cost(t) == cost(m, t));
    CHECK(cache.size() <= 8 + t.size());
  }
}
