#include "rewrite_arena/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rewrite_arena/error.hpp"

namespace rewrite_arena {

void RunConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error("beta must be a finite non-negative number");
  if (n_soft == 0) throw Error("n_soft must be at least 1");
  if (n_hard == 0) throw Error("n_hard must be at least 1");
  if (explore > n_soft) throw Error("explore must not exceed n_soft");
  if (workers == 0) throw Error("workers must be at least 1");
  if (validate_every == 0) throw Error("validate_every must be at least 1");
  if (!(time_limit >= 0.0)) throw Error("time_limit must be non-negative");
  if (budget == kRunsUntilDeadline && time_limit <= 0.0 && max_proposals == 0) {
    throw Error("an unbounded run budget needs a time limit or a proposal limit");
  }
}

bool SearchControl::expired() const {
  if (stop.load(std::memory_order_relaxed)) return true;
  if (max_proposals != 0 && proposals.load(std::memory_order_relaxed) >= max_proposals) return true;
  return deadline != std::chrono::steady_clock::time_point::max() && std::chrono::steady_clock::now() >= deadline;
}

std::vector<double> successor_probabilities(std::span<const double> deltas, double beta) {
  if (deltas.empty()) throw Error("empty candidate set");
  double lowest = *std::min_element(deltas.begin(), deltas.end());
  std::vector<double> p(deltas.size());
  double total = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    p[i] = beta == 0.0 ? 1.0 : std::exp(-0.5 * beta * (deltas[i] - lowest));
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

std::size_t sample_index(std::span<const double> deltas, double beta, Rng& rng) {
  if (deltas.empty()) throw Error("empty candidate set");
  if (deltas.size() == 1) return 0;
  double lowest = *std::min_element(deltas.begin(), deltas.end());
  thread_local std::vector<double> weights;
  weights.resize(deltas.size());
  double total = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    weights[i] = beta == 0.0 ? 1.0 : std::exp(-0.5 * beta * (deltas[i] - lowest));
    total += weights[i];
  }
  double u = std::generate_canonical<double, 53>(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding can leave u just past the last bucket.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

const Term& sample_successor(const Term& t, std::span<const Term> candidates, double beta, const CostModel& model,
                             Rng& rng) {
  if (candidates.empty()) throw Error("empty candidate set");
  double base = cost(model, t);
  std::vector<double> deltas;
  deltas.reserve(candidates.size());
  for (const Term& c : candidates) deltas.push_back(cost(model, c) - base);
  return candidates[sample_index(deltas, beta, rng)];
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::chrono::steady_clock::time_point deadline_after(double seconds) {
  if (seconds <= 0.0) return std::chrono::steady_clock::time_point::max();
  return std::chrono::steady_clock::now() +
         std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
}

class Chain {
 public:
  Chain(const Term& t0, const Ruleset& rules, const CostModel& model, const RunConfig& cfg, const Validator& validator,
        Rng& rng, SearchControl& control)
      : t0_(t0), rules_(rules), cfg_(cfg), validator_(validator), rng_(rng), control_(control), cache_(model) {}

  RunResult run() {
    auto start = std::chrono::steady_clock::now();
    double c0 = cache_.cost(t0_);
    result_.best = t0_;
    result_.best_cost = c0;
    reset();
    if (reached_target(c0)) control_.stop = true;

    while (!control_.expired() && n_stall_ < cfg_.n_hard) {
      if (cfg_.max_steps != 0 && result_.steps >= cfg_.max_steps) break;
      step();
    }
    if (n_stall_ >= cfg_.n_hard) result_.hard_restarts = 1;
    if (validator_) validate();
    result_.wall_seconds = seconds_since(start);
    return std::move(result_);
  }

 private:
  void reset() {
    t_ = t0_;
    c_ = cache_.cost(t0_);
    seg_best_ = t0_;
    seg_best_cost_ = c_;
    seg_best_validated_ = true;
    n_ = 0;
    n_stall_ = 0;
    accepted_ = 0;
    path_.clear();
    seg_best_path_.clear();
  }

  bool reached_target(double c) const { return cfg_.stop_at_cost && c <= *cfg_.stop_at_cost; }

  void step() {
    double beta_now = (n_ % cfg_.n_soft) < cfg_.explore ? 0.0 : cfg_.beta;
    candidates_.collect(t_, rules_);
    ++result_.steps;
    ++n_;
    if (candidates_.empty()) {
      ++n_stall_;
      return;
    }

    result_.proposals += candidates_.size();
    control_.proposals.fetch_add(candidates_.size(), std::memory_order_relaxed);

    const CostModel& model = cache_.model();
    deltas_.resize(candidates_.size());
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      const Rewrite& rw = candidates_[i];
      if (model.context_free()) {
        NodeValue before = cache_.value(rw.original);
        NodeValue after = cache_.value(rw.replacement);
        if (model.same_interface(before, after)) {
          deltas_[i] = after.cost - before.cost;
          continue;
        }
      }
      deltas_[i] = cache_.cost(candidates_.materialize(i)) - c_;
    }

    std::size_t chosen = sample_index(deltas_, beta_now, rng_);
    if (cfg_.record_trace) {
      path_.push_back(TraceStep{rules_[candidates_[chosen].rule].name(), candidates_[chosen].position});
    }
    t_ = candidates_.materialize(chosen);
    c_ = cache_.cost(t_);

    if (c_ < seg_best_cost_) {
      seg_best_ = t_;
      seg_best_cost_ = c_;
      seg_best_validated_ = false;
      if (cfg_.record_trace) seg_best_path_ = path_;
      // Progress is counted when the run's best improves, so unvalidated or
      // unsound finds do not hold off the stall exit.
      ++n_stall_;
      if (!validator_) adopt_segment_best();
    } else {
      ++n_stall_;
    }

    ++accepted_;
    if (validator_ && (accepted_ % cfg_.validate_every == 0 || (!seg_best_validated_ && reached_target(seg_best_cost_)))) {
      validate();
    }
  }

  void adopt_segment_best() {
    seg_best_validated_ = true;
    if (seg_best_cost_ < result_.best_cost) {
      n_stall_ = 0;
      result_.best = seg_best_;
      result_.best_cost = seg_best_cost_;
      if (cfg_.record_trace) result_.trace = seg_best_path_;
    }
    if (reached_target(result_.best_cost)) control_.stop = true;
  }

  // Checks the current term and any not yet validated best. A failure sends
  // the run back to t0.
  void validate() {
    bool unsound = validator_(t0_, t_, rng_);
    if (!unsound && !seg_best_validated_ && !(seg_best_ == t_)) unsound = validator_(t0_, seg_best_, rng_);
    if (unsound) {
      ++result_.unsound_restarts;
      reset();
      return;
    }
    if (!seg_best_validated_) adopt_segment_best();
  }

  const Term& t0_;
  const Ruleset& rules_;
  const RunConfig& cfg_;
  const Validator& validator_;
  Rng& rng_;
  SearchControl& control_;
  CostCache cache_;
  CandidateSet candidates_;
  std::vector<double> deltas_;

  Term t_;
  double c_ = 0.0;
  Term seg_best_;
  double seg_best_cost_ = 0.0;
  bool seg_best_validated_ = true;
  std::uint64_t n_ = 0;
  std::uint64_t n_stall_ = 0;
  std::uint64_t accepted_ = 0;
  std::vector<TraceStep> path_;
  std::vector<TraceStep> seg_best_path_;
  RunResult result_;
};

}  // namespace

RunResult run_chain(const Term& t0, const Ruleset& rules, const CostModel& model, const RunConfig& cfg,
                    const Validator& validator, Rng& rng, SearchControl* control) {
  cfg.validate();
  SearchControl local;
  if (control == nullptr) {
    local.deadline = deadline_after(cfg.time_limit);
    local.max_proposals = cfg.max_proposals;
    control = &local;
  }
  return Chain(t0, rules, model, cfg, validator, rng, *control).run();
}

std::uint64_t run_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over a seed/index mix
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SearchResult search(const Term& t0, const Ruleset& rules, const CostModel& model, const RunConfig& cfg,
                    const Validator& validator) {
  cfg.validate();
  auto start = std::chrono::steady_clock::now();
  SearchControl control;
  control.deadline = deadline_after(cfg.time_limit);
  control.max_proposals = cfg.max_proposals;

  const std::uint64_t budget = cfg.resolved_budget();
  std::atomic<std::uint64_t> next_run{0};
  std::mutex mutex;
  std::vector<std::pair<std::uint64_t, RunResult>> finished;
  std::exception_ptr failure;

  auto worker = [&] {
    try {
      for (;;) {
        // The first run always starts so a search never returns empty-handed.
        std::uint64_t index = next_run.fetch_add(1);
        if (index >= budget || (index > 0 && control.expired())) return;
        Rng rng(run_seed(cfg.seed, index));
        RunResult r = run_chain(t0, rules, model, cfg, validator, rng, &control);
        std::lock_guard lock(mutex);
        finished.emplace_back(index, std::move(r));
      }
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!failure) failure = std::current_exception();
      control.stop = true;
    }
  };

  unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(cfg.workers, budget));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(finished.begin(), finished.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SearchResult out;
  out.best = t0;
  out.best_cost = cost(model, t0);
  bool have = false;
  for (auto& [index, r] : finished) {
    ++out.runs;
    out.proposals += r.proposals;
    out.steps += r.steps;
    out.hard_restarts += r.hard_restarts;
    out.unsound_restarts += r.unsound_restarts;
    if (!have || r.best_cost < out.best_cost) {
      have = true;
      out.best = r.best;
      out.best_cost = r.best_cost;
      out.best_run = index;
      out.trace = std::move(r.trace);
    }
  }
  out.wall_seconds = seconds_since(start);
  return out;
}

}  // namespace rewrite_arena
