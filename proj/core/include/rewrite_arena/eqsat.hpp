#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rewrite_arena/cost.hpp"
#include "rewrite_arena/egraph.hpp"
#include "rewrite_arena/pattern.hpp"
#include "rewrite_arena/rule.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

using ClassSubstitution = BasicSubstitution<EClassId>;

struct EMatch {
  ClassSubstitution subst;
  EClassId root;
};

/// All matches of `p` in a rebuilt e-graph.
std::vector<EMatch> ematch(const EGraph& g, const Pattern& p);

/// Rule scheduler with exponential back-off: a rule whose match count
/// exceeds `match_limit << times_banned` is banned for
/// `ban_length << times_banned` iterations and its matches are dropped.
class BackoffScheduler {
 public:
  BackoffScheduler(std::size_t match_limit = 1000, std::size_t ban_length = 5)
      : match_limit_(match_limit), ban_length_(ban_length) {}

  bool is_banned(std::size_t rule, std::size_t iteration) const;
  /// Records `matches` for `rule`; returns false (and bans) over threshold.
  bool admit(std::size_t rule, std::size_t iteration, std::size_t matches);
  bool any_banned(std::size_t iteration) const;
  void unban_all();
  std::size_t threshold(std::size_t rule) const;

 private:
  struct Stats {
    std::size_t times_applied = 0;
    std::size_t banned_until = 0;
    std::size_t times_banned = 0;
  };
  Stats& stats(std::size_t rule);

  std::size_t match_limit_;
  std::size_t ban_length_;
  std::vector<Stats> stats_;
};

struct IterationReport {
  std::size_t matches_applied = 0;
  std::uint64_t unions = 0;
  std::size_t classes = 0;
  std::size_t nodes = 0;
  bool contradiction = false;
  bool changed = false;
  bool timed_out = false;
  std::vector<std::string> banned;
};

/// Searches every unbanned rule, applies guarded matches, then rebuilds once.
IterationReport run_iteration(EGraph& g, const Ruleset& rules, BackoffScheduler& scheduler, std::size_t iteration,
                              std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max());

struct Extraction {
  Term term;
  double cost = 0.0;
};

/// Cheapest tree in class `root`. Throws Error if the class has no finite
/// term.
Extraction extract(const EGraph& g, EClassId root, const CostModel& model);

struct SaturationLimits {
  std::size_t iterations = 30;
  std::size_t nodes = 100000;
  double time_limit = 10.0;  // seconds, 0 for none
};

enum class StopReason { Saturated, IterationLimit, NodeLimit, TimeLimit, Contradiction, GoalReached };
std::string to_string(StopReason r);

struct SaturationReport {
  std::size_t iterations = 0;
  std::size_t enodes = 0;
  std::size_t eclasses = 0;
  std::uint64_t unions = 0;
  bool contradiction = false;
  bool used_checkpoint = false;
  StopReason stop_reason = StopReason::Saturated;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
};

struct SaturationResult {
  Term best;
  double cost = 0.0;
  SaturationReport report;
};

struct SaturationOptions {
  SaturationLimits limits;
  bool checkpointing = false;
  /// Stop as soon as this term is in the root's class, and return it.
  std::optional<Term> goal;
  std::optional<DimEnv> dims;
};

/// Runs iterations until saturation, a limit, a contradiction or the goal.
/// With checkpointing, the graph is copied after every clean iteration and a
/// contradiction makes extraction fall back to the last copy.
SaturationResult saturate(EGraph& g, EClassId root, const Ruleset& rules, const CostModel& model,
                          const SaturationOptions& options);
SaturationResult saturate(const Term& input, const Ruleset& rules, const CostModel& model,
                          const SaturationOptions& options);

struct PulseResult {
  Term best;
  double cost = 0.0;
  std::size_t pulses = 0;
  std::size_t iterations = 0;
  bool contradiction = false;
  bool goal_reached = false;
  double wall_seconds = 0.0;
};

/// Repeatedly saturates a fresh e-graph seeded with the current best term for
/// `iterations_per_pulse` iterations and adopts the extraction when strictly
/// cheaper. Stops at the time limit or when a pulse yields no improvement.
PulseResult pulse(const Term& t0, const Ruleset& rules, const CostModel& model, std::size_t iterations_per_pulse,
                  double time_limit, const SaturationOptions& per_pulse = {});

}  // namespace rewrite_arena
