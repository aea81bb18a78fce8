#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewrite_arena/cost.hpp"
#include "rewrite_arena/rule.hpp"
#include "rewrite_arena/stochastic.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

/// Solved when the found term costs at most `cost`, or at most the cost of
/// `intended` under the engine's cost model when no explicit cost is given.
struct TargetCost {
  std::optional<double> cost;
  std::optional<Term> intended;
};
struct ReachTerm {
  Term goal;
};
struct ReachTrue {};

using Criterion = std::variant<TargetCost, ReachTerm, ReachTrue>;

/// Hyperparameters a suite recommends for the stochastic engine; the CLI
/// applies them unless a flag overrides them.
struct StochasticHints {
  std::optional<double> beta;
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> n_soft;
  std::optional<std::uint64_t> explore;
  std::optional<std::uint64_t> n_hard;
  bool validate = false;
};

struct BenchmarkCase {
  std::string name;
  Term input;
  std::shared_ptr<const Ruleset> rules;
  CostModelPtr eqsat_cost;
  CostModelPtr stochastic_cost;
  nlohmann::json cost_spec;  // as read from or written to a suite file
  Criterion criterion;
  std::optional<double> oracle_cost;
  std::optional<DimEnv> dims;
  std::string provenance;
  StochasticHints hints;
};

struct Suite {
  std::string name;
  double time_limit = 10.0;
  std::vector<BenchmarkCase> cases;
};

/// Classic O(n^3) interval DP over a chain with dimensions d0..dn.
std::uint64_t dp_optimal_cost(std::span<const std::int64_t> dims);
/// Exhaustive minimum over all parenthesizations; throws Error beyond 12
/// matrices.
std::uint64_t brute_force_optimal(std::span<const std::int64_t> dims);

/// Left-associated chain A1..An with the given n+1 dimensions.
BenchmarkCase matmul_case(std::span<const std::int64_t> dims, std::string name = "matmul");
BenchmarkCase gen_matmul_chain(std::size_t n, std::int64_t dim_lo, std::int64_t dim_hi, Rng& rng);
/// Random association of the chain in `c` (for property tests).
Term random_association(std::size_t n, Rng& rng);

/// f(a,...,a) with arity N, rules {a => b, b => a, f(b..b) => g(b..b)} and a
/// cost that is 0 only at g(b,...,b).
BenchmarkCase needle_case(std::size_t n);

/// Rulesets shipped with the library: assoc, trig, integration, halide.
std::shared_ptr<const Ruleset> builtin_ruleset(std::string_view name);
/// trig, integration, halide-mini.
std::map<std::string, Suite> builtin_suites();

/// Cost model from its JSON description:
///   {"kind":"ast-size"} | {"kind":"weighted","weights":{...}} |
///   {"kind":"integ-square"} | {"kind":"matmul","dims":{"A":[2,3]}} |
///   {"kind":"goal","goal":"(g b b)"}
CostModelPtr cost_model_from_json(const nlohmann::json& spec);

/// Suite file (JSON, "schema": 1). Ruleset names resolve to builtin rulesets
/// unless `rules_dir` holds a `<name>.rules` file.
Suite load_suite(const nlohmann::json& doc, const std::string& rules_dir = "");
Suite load_suite_file(const std::string& path);
nlohmann::json suite_to_json(const Suite& suite);

/// Target cost of a TargetCost criterion under `model`, if any.
std::optional<double> target_cost(const BenchmarkCase& c, const CostModel& model);

bool judge(const BenchmarkCase& c, const Term& found, const CostModel& model);

}  // namespace rewrite_arena
