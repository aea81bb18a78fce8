#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rewrite_arena/cost.hpp"
#include "rewrite_arena/rule.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

using Rng = std::mt19937_64;

/// Hyperparameters of the stochastic search plus run control.
struct RunConfig {
  static constexpr std::uint64_t kRunsUntilDeadline = std::numeric_limits<std::uint64_t>::max();

  double beta = 1.0;             // inverse temperature
  std::uint64_t budget = 0;      // number of independent runs; 0 means one per worker
  std::uint64_t n_soft = 1000;   // soft restart period
  std::uint64_t explore = 100;   // beta = 0 for the first `explore` steps of each period
  std::uint64_t n_hard = 5000;   // a run ends after this many steps without improvement
  double time_limit = 10.0;      // seconds, 0 for none
  unsigned workers = 1;
  std::uint64_t seed = 0;

  std::uint64_t validate_every = 25;  // accepted steps between validator calls
  std::uint64_t max_steps = 0;        // per run, 0 for none
  std::uint64_t max_proposals = 0;    // across the whole search, 0 for none
  std::optional<double> stop_at_cost; // end the search once any run reaches it
  bool record_trace = false;

  /// Throws Error if explore > n_soft or a period/count is zero.
  void validate() const;
  std::uint64_t resolved_budget() const { return budget == 0 ? workers : budget; }
};

/// Returns true when `candidate` is known to be inequivalent to `initial`.
using Validator = std::function<bool(const Term& initial, const Term& candidate, Rng& rng)>;

struct TraceStep {
  std::string rule;
  Position position;
};

struct RunResult {
  Term best;
  double best_cost = 0.0;
  std::uint64_t proposals = 0;  // candidates scored
  std::uint64_t steps = 0;
  std::uint64_t hard_restarts = 0;     // runs ended by stalling
  std::uint64_t unsound_restarts = 0;  // in-place restarts after validation failed
  double wall_seconds = 0.0;
  std::vector<TraceStep> trace;  // rewrites from the initial term to `best`
};

/// Shared, read-mostly state of one search. Chains poll it every step.
struct SearchControl {
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> proposals{0};
  std::uint64_t max_proposals = 0;

  bool expired() const;
};

/// Successor distribution over candidates with cost deltas `deltas` at
/// inverse temperature `beta`: p_i proportional to exp(-beta/2 * delta_i).
std::vector<double> successor_probabilities(std::span<const double> deltas, double beta);

/// Draws an index from successor_probabilities(deltas, beta). Throws Error on
/// an empty candidate set.
std::size_t sample_index(std::span<const double> deltas, double beta, Rng& rng);

/// Draws one of `candidates` given the current term `t`.
const Term& sample_successor(const Term& t, std::span<const Term> candidates, double beta, const CostModel& model,
                             Rng& rng);

/// One run of the search from `t0`. Ends when the run stalls for n_hard
/// steps, on max_steps, or when the control says stop. With a validator, a
/// current term found inequivalent to `t0` triggers an in-place restart, and
/// the reported best is always a validated term.
RunResult run_chain(const Term& t0, const Ruleset& rules, const CostModel& model, const RunConfig& cfg,
                    const Validator& validator, Rng& rng, SearchControl* control = nullptr);

struct SearchResult {
  Term best;
  double best_cost = 0.0;
  std::uint64_t best_run = 0;
  std::uint64_t runs = 0;
  std::uint64_t proposals = 0;
  std::uint64_t steps = 0;
  std::uint64_t hard_restarts = 0;
  std::uint64_t unsound_restarts = 0;
  double wall_seconds = 0.0;
  std::vector<TraceStep> trace;  // of the winning run, when recorded
};

/// Seed of run `index`; independent of worker scheduling.
std::uint64_t run_seed(std::uint64_t seed, std::uint64_t index);

/// Runs `cfg.resolved_budget()` independent runs on `cfg.workers` threads and
/// returns the cheapest best term; ties go to the lowest run index.
SearchResult search(const Term& t0, const Ruleset& rules, const CostModel& model, const RunConfig& cfg,
                    const Validator& validator = {});

}  // namespace rewrite_arena
