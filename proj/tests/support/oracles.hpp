#pragma once

// Reference implementations the library is checked against. Each one is
// written the slow, obvious way and shares no code with the engines.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rewrite_arena/cost.hpp"
#include "rewrite_arena/egraph.hpp"
#include "rewrite_arena/rule.hpp"
#include "rewrite_arena/stochastic.hpp"
#include "rewrite_arena/term.hpp"

namespace oracle {

namespace ra = rewrite_arena;

/// Every full binary bracketing of matrices i..j as explicit trees, costed by
/// recursion on the dimension vector.
std::uint64_t matmul_by_enumeration(std::span<const std::int64_t> dims);

/// Scalar multiplications of a product tree over leaves A1..An, computed
/// directly from `dims` without any cost model.
std::uint64_t matmul_tree_cost(const ra::Term& t, std::span<const std::int64_t> dims);

/// All Catalan(n-1) bracketings of A1..An.
std::vector<ra::Term> all_associations(std::size_t n);

/// Cheapest term of depth at most `depth` represented by class `root`, found
/// by listing every such term. Exponential; empty when the listing hits its cap.
std::optional<double> cheapest_by_enumeration(const ra::EGraph& g, ra::EClassId root, const ra::CostModel& model,
                                              std::size_t depth);

/// Terms of depth at most `depth` in class `root`, at most `limit` per class.
/// Sets `*truncated` when some class had more.
std::vector<ra::Term> terms_of_class(const ra::EGraph& g, ra::EClassId root, std::size_t depth, std::size_t limit,
                                     bool* truncated = nullptr);

/// P(t) by brute force: every position, every rule, one at a time, with
/// duplicates and `t` itself removed.
std::vector<ra::Term> one_step_successors(const ra::Term& t, const ra::Ruleset& rules);

/// Checks d/dx F(x) = f(x) by central differences at a few points where both
/// are defined. `integral` may contain no int/d nodes.
bool is_antiderivative(const ra::Term& integral, const ra::Term& integrand, const std::string& var);

/// Upper-tail p-value of Pearson's chi-square statistic.
double chi_square_p_value(std::span<const std::size_t> observed, std::span<const double> expected_probabilities);

/// Applies the recorded rewrites in order, checking each one fires.
std::optional<ra::Term> replay(const ra::Term& t0, const ra::Ruleset& rules, std::span<const ra::TraceStep> trace);

/// Random term over the given operators and leaves.
ra::Term random_term(ra::Rng& rng, std::span<const std::string> binary_ops, std::span<const std::string> leaves,
                     std::size_t depth);

}  // namespace oracle
