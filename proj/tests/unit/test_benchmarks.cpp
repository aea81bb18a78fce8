#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rewrite_arena/benchmarks.hpp"
#include "rewrite_arena/error.hpp"
#include "rewrite_arena/sexpr.hpp"
#include "rewrite_arena/soundness.hpp"

using namespace rewrite_arena;

namespace {

Term T(const char* s) { return parse_sexpr(s); }

const Suite& suite(const std::string& name) {
  static const auto suites = builtin_suites();
  return suites.at(name);
}

}  // namespace

TEST_CASE("matrix chain example") {
  std::vector<std::int64_t> dims = {2, 3, 4, 5};
  CHECK(dp_optimal_cost(dims) == 64);
  CHECK(brute_force_optimal(dims) == 64);
  BenchmarkCase c = matmul_case(dims);
  CHECK(c.input == T("(* (* A1 A2) A3)"));
  CHECK(cost(*c.stochastic_cost, c.input) == 64);
  CHECK(cost(*c.stochastic_cost, T("(* A1 (* A2 A3))")) == 90);
  CHECK(*c.oracle_cost == 64);
}

TEST_CASE("textbook chain") {
  std::vector<std::int64_t> dims = {30, 35, 15, 5, 10, 20, 25};
  CHECK(dp_optimal_cost(dims) == 15125);
}

TEST_CASE("property: DP, library brute force and tree enumeration agree") {
  Rng rng(2024);
  std::uniform_int_distribution<std::int64_t> dim(1, 50);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + rng() % 8;
    std::vector<std::int64_t> dims(n + 1);
    for (auto& d : dims) d = dim(rng);
    std::uint64_t dp = dp_optimal_cost(dims);
    CHECK(dp == brute_force_optimal(dims));
    CHECK(dp == oracle::matmul_by_enumeration(dims));
  }
  std::vector<std::int64_t> big(15, 3);
  CHECK_THROWS_AS(brute_force_optimal(big), Error);
}

TEST_CASE("generated chains are well formed") {
  Rng rng(4);
  BenchmarkCase c = gen_matmul_chain(12, 2, 9, rng);
  CHECK(c.input.size() == 23);
  CHECK(c.dims->size() == 12);
  CHECK(*c.oracle_cost <= cost(*c.eqsat_cost, c.input));
  CHECK_THROWS_AS(gen_matmul_chain(1, 2, 9, rng), Error);
  for (int i = 0; i < 20; ++i) {
    Term t = random_association(12, rng);
    CHECK(t.size() == 23);
    CHECK(cost(*c.eqsat_cost, t) >= *c.oracle_cost);
  }
}

TEST_CASE("needle case shape") {
  BenchmarkCase c = needle_case(4);
  CHECK(c.input == T("(f a a a a)"));
  CHECK(std::get<ReachTerm>(c.criterion).goal == T("(g b b b b)"));
  CHECK(cost(*c.stochastic_cost, c.input) == 1);
  CHECK(cost(*c.stochastic_cost, T("(g b b b b)")) == 0);
  CHECK(c.rules->size() == 3);
}

TEST_CASE("builtin suites meet their size and shape requirements") {
  CHECK(suite("trig").cases.size() >= 10);
  CHECK(suite("integration").cases.size() >= 6);
  CHECK(suite("halide-mini").cases.size() >= 10);
  CHECK(suite("halide-mini").time_limit == 3);
  bool has_example = false;
  for (const auto& c : suite("trig").cases) has_example |= c.input == T("(+ (- (pow (sin x) 4) (pow (cos x) 4)) 1)");
  CHECK(has_example);
  for (const auto& c : suite("halide-mini").cases) CHECK(std::holds_alternative<ReachTrue>(c.criterion));
  CHECK(cost(*suite("halide-mini").cases[0].eqsat_cost, T("true")) == 0);
  CHECK(suite("integration").cases[0].eqsat_cost->describe() != suite("integration").cases[0].stochastic_cost->describe());
}

TEST_CASE("trig intended answers agree with their inputs numerically") {
  for (const auto& c : suite("trig").cases) {
    CAPTURE(c.name);
    const auto& crit = std::get<TargetCost>(c.criterion);
    REQUIRE(crit.intended.has_value());
    Rng rng(1);
    CHECK(fuzz_equiv(c.input, *crit.intended, 50, 1e-6, rng).kind == Verdict::Kind::Equivalent);
    CHECK(cost(*c.eqsat_cost, *crit.intended) <= cost(*c.eqsat_cost, c.input));
  }
}

TEST_CASE("integration intended answers differentiate back to the integrand") {
  for (const auto& c : suite("integration").cases) {
    CAPTURE(c.name);
    REQUIRE(c.input.op() == Symbol::intern("int"));
    const auto& crit = std::get<TargetCost>(c.criterion);
    REQUIRE(crit.intended.has_value());
    std::string var(c.input.child(1).op().name());
    CHECK(oracle::is_antiderivative(*crit.intended, c.input.child(0), var));
  }
}

TEST_CASE("halide cases are true statements") {
  Rng rng(6);
  for (const auto& c : suite("halide-mini").cases) {
    CAPTURE(c.name);
    // Integer samples: the rules are valid over the integers.
    std::vector<std::string> vars = variables_of(c.input);
    std::uniform_int_distribution<int> pick(-20, 20);
    for (int i = 0; i < 200; ++i) {
      EvalEnv env;
      for (const auto& v : vars) env[v] = pick(rng);
      auto value = eval_numeric(c.input, env);
      REQUIRE(value.has_value());
      CHECK(*value == 1.0);
    }
  }
}

TEST_CASE("the integration example is the expected one") {
  bool found = false;
  for (const auto& c : suite("integration").cases) {
    if (c.input == T("(int (* x (cos x)) x)")) {
      found = true;
      CHECK(*std::get<TargetCost>(c.criterion).intended == T("(+ (* x (sin x)) (cos x))"));
    }
  }
  CHECK(found);
}

TEST_CASE("judging against criteria") {
  BenchmarkCase needle = needle_case(3);
  CHECK(judge(needle, T("(g b b b)"), *needle.eqsat_cost));
  CHECK_FALSE(judge(needle, T("(f b b b)"), *needle.eqsat_cost));
  const BenchmarkCase& h = suite("halide-mini").cases[0];
  CHECK(judge(h, T("true"), *h.eqsat_cost));
  CHECK_FALSE(judge(h, T("(< i 3)"), *h.eqsat_cost));
  BenchmarkCase m = matmul_case(std::vector<std::int64_t>{2, 3, 4, 5});
  CHECK(*target_cost(m, *m.eqsat_cost) == 64);
  CHECK(judge(m, T("(* (* A1 A2) A3)"), *m.eqsat_cost));
  CHECK_FALSE(judge(m, T("(* A1 (* A2 A3))"), *m.eqsat_cost));
}

TEST_CASE("cost models from JSON") {
  using nlohmann::json;
  CHECK(cost_model_from_json(json{{"kind", "ast-size"}})->describe() == "ast-size");
  auto w = cost_model_from_json(json::parse(R"j({"kind":"weighted","weights":{"int":100}})j"));
  CHECK(cost(*w, T("(int x x)")) == 102);
  auto m = cost_model_from_json(json::parse(R"j({"kind":"matmul","dims":{"A":[2,3],"B":[3,4]}})j"));
  CHECK(cost(*m, T("(* A B)")) == 24);
  auto g = cost_model_from_json(json::parse(R"j({"kind":"goal","goal":"(g b)"})j"));
  CHECK(cost(*g, T("(g b)")) == 0);
  CHECK_THROWS_AS(cost_model_from_json(json{{"kind", "mystery"}}), Error);
  CHECK_THROWS_AS(cost_model_from_json(json::parse(R"j({"kind":"matmul","dims":{"A":[2]}})j")), Error);
}

TEST_CASE("suite files round-trip and report bad input") {
  using nlohmann::json;
  json doc = suite_to_json(suite("halide-mini"));
  Suite again = load_suite(doc);
  REQUIRE(again.cases.size() == suite("halide-mini").cases.size());
  for (std::size_t i = 0; i < again.cases.size(); ++i) CHECK(again.cases[i].input == suite("halide-mini").cases[i].input);
  CHECK(again.time_limit == 3);

  json bad = json::parse(R"j({"schema":1,"name":"x","ruleset":"trig","cost":{"kind":"ast-size"},
                             "cases":[{"name":"c","input":"(+ x"}]})j");
  CHECK_THROWS_AS(load_suite(bad), Error);
  json wrong_schema = json::parse(R"j({"schema":7,"name":"x","ruleset":"trig","cases":[]})j");
  CHECK_THROWS_AS(load_suite(wrong_schema), Error);
  json no_rules = json::parse(R"j({"schema":1,"name":"x","ruleset":"nope","cost":{"kind":"ast-size"},"cases":[]})j");
  CHECK_THROWS_AS(load_suite(no_rules), Error);
}

TEST_CASE("suite files can bring their own ruleset") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "rewrite_arena_suite_test";
  fs::create_directories(dir);
  std::ofstream(dir / "tiny.rules") << "drop-zero: (+ ?a 0) => ?a\n";
  std::ofstream(dir / "tiny.json") << R"j({"schema":1,"name":"tiny","ruleset":"tiny","cost":{"kind":"ast-size"},
    "cases":[{"name":"one","input":"(+ x 0)","intended":"x"}]})j";
  Suite s = load_suite_file((dir / "tiny.json").string());
  REQUIRE(s.cases.size() == 1);
  CHECK(s.cases[0].rules->size() == 1);
  CHECK_THROWS_AS(load_suite_file((dir / "missing.json").string()), Error);
  fs::remove_all(dir);
}
