#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewrite_arena/benchmarks.hpp"
#include "rewrite_arena/eqsat.hpp"
#include "rewrite_arena/stochastic.hpp"

namespace rewrite_arena {

enum class Engine { Stochastic, EqSat, EqSatPulsed };

std::string to_string(Engine e);
std::optional<Engine> parse_engine(std::string_view name);

struct EqSatConfig {
  SaturationLimits limits;
  bool checkpointing = true;
  std::size_t pulse_iterations = 3;
};

/// One result row: one case solved by one engine.
struct CaseRow {
  std::string suite;
  std::string case_name;
  Engine engine = Engine::Stochastic;
  double best_cost = 0.0;
  std::optional<double> target_cost;
  std::optional<double> oracle_cost;
  std::optional<double> ratio;  // oracle / found, in (0, 1]
  bool solved = false;
  std::uint64_t work = 0;  // proposals (stochastic) or iterations (eqsat)
  std::uint64_t restarts = 0;
  std::uint64_t unsound_restarts = 0;
  bool contradiction = false;
  std::string best_term;
  double wall_seconds = 0.0;
};

/// Runs one case. `cfg` should already carry the suite's hints; the seed is
/// used as is. Stochastic runs stop early once the case is solved.
CaseRow run_case(const std::string& suite, const BenchmarkCase& c, Engine engine, const RunConfig& cfg,
                 const EqSatConfig& eqsat);

/// Applies the case's stochastic hints to fields the caller did not set.
struct ExplicitFlags {
  bool beta = false;
  bool budget = false;
  bool n_soft = false;
  bool explore = false;
  bool n_hard = false;
};
RunConfig apply_hints(RunConfig cfg, const StochasticHints& hints, const ExplicitFlags& explicit_flags = {});

/// Solved partition across the two engines (both / only eqsat / only
/// stochastic / neither), keyed by case name.
struct Partition {
  std::size_t both = 0;
  std::size_t only_eqsat = 0;
  std::size_t only_stochastic = 0;
  std::size_t neither = 0;
};
Partition solved_partition(std::span<const CaseRow> rows);

/// Counts of ratio values per bin edge; `edges` ascending, last bin closed.
std::vector<std::size_t> ratio_histogram(std::span<const CaseRow> rows, Engine engine, std::span<const double> edges);

/// CSV with a fixed column order. Wall time is emitted only when
/// `with_timing` is set so untimed output is reproducible byte for byte.
std::string rows_to_csv(std::span<const CaseRow> rows, bool with_timing);
nlohmann::json rows_to_json(std::span<const CaseRow> rows, bool with_timing);
std::string rows_to_table(std::span<const CaseRow> rows, bool with_timing);
std::vector<std::string> csv_columns(bool with_timing);

struct ScalingRow {
  unsigned workers = 1;
  std::uint64_t proposals = 0;
  double seconds = 0.0;
  double proposals_per_second = 0.0;
  std::size_t solved = 0;
};

/// One full stochastic pass over `suite` per worker count, same seed and
/// time limit for each.
std::vector<ScalingRow> scaling_report(const Suite& suite, std::span<const unsigned> workers_list, const RunConfig& cfg);
std::string scaling_to_csv(std::span<const ScalingRow> rows);

/// Writes `contents` to `path` via a temporary file and rename.
void write_file_atomically(const std::string& path, const std::string& contents);

}  // namespace rewrite_arena
