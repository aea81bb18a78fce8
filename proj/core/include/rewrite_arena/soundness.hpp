#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rewrite_arena/stochastic.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

using EvalEnv = std::map<std::string, double, std::less<>>;

/// Below this magnitude a denominator (or cos for tan) counts as zero.
inline constexpr double kSingularityThreshold = 1e-9;

/// IEEE double evaluation. Returns nullopt where the term is undefined:
/// division by ~0, log of a non-positive value, non-finite results, and any
/// `int` or `d` node. Comparisons and booleans evaluate to 1 / 0.
/// Throws Error on an unknown operator or a variable missing from `env`.
std::optional<double> eval_numeric(const Term& t, const EvalEnv& env);

/// Variables of `t`: leaf names that are not numerals, booleans or `pi`.
std::vector<std::string> variables_of(const Term& t);

struct Verdict {
  enum class Kind { Equivalent, Inequivalent, Inconclusive };

  Kind kind = Kind::Inconclusive;
  std::size_t points_tested = 0;  // points where both sides were defined
  EvalEnv witness;                // set for Inequivalent
  double lhs = 0.0;
  double rhs = 0.0;
  std::string reason;

  bool inequivalent() const noexcept { return kind == Kind::Inequivalent; }
  std::string to_string() const;
};

/// Randomized equivalence check. Samples points mixing +-uniform(0.1, 10)
/// draws with the integers -2..2, skips points where either side is
/// undefined, and reports Inequivalent on the first relative mismatch above
/// `tol`. Equivalent needs at least max(10, samples / 2) defined points.
Verdict fuzz_equiv(const Term& a, const Term& b, std::size_t samples, double tol, Rng& rng);

/// Validator for the stochastic engine backed by fuzz_equiv.
Validator fuzz_validator(std::size_t samples = 50, double tol = 1e-6);

}  // namespace rewrite_arena
