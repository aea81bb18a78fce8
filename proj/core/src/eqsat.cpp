#include "rewrite_arena/eqsat.hpp"

#include <functional>
#include <unordered_map>

#include "rewrite_arena/error.hpp"

namespace rewrite_arena {

namespace {

using Continuation = std::function<void(ClassSubstitution&)>;

void match_class(const EGraph& g, const Term& pattern, EClassId cls, ClassSubstitution& sigma, const Continuation& k);

void match_children(const EGraph& g, const Term& pattern, const ENode& node, std::size_t i, ClassSubstitution& sigma,
                    const Continuation& k) {
  if (i == node.children.size()) {
    k(sigma);
    return;
  }
  match_class(g, pattern.child(i), node.children[i], sigma,
              [&](ClassSubstitution& s) { match_children(g, pattern, node, i + 1, s, k); });
}

void match_class(const EGraph& g, const Term& pattern, EClassId cls, ClassSubstitution& sigma, const Continuation& k) {
  cls = g.find(cls);
  if (pattern.op().is_pattern_var()) {
    if (const EClassId* bound = sigma.lookup(pattern.op())) {
      if (g.find(*bound) == cls) k(sigma);
      return;
    }
    sigma.bind(pattern.op(), cls);
    k(sigma);
    sigma.pop();
    return;
  }
  for (const ENode& node : g.eclass(cls).nodes) {
    if (node.op != pattern.op() || node.children.size() != pattern.arity()) continue;
    match_children(g, pattern, node, 0, sigma, k);
  }
}

EClassId add_instance(EGraph& g, const Term& pattern, const ClassSubstitution& sigma) {
  if (pattern.op().is_pattern_var()) {
    const EClassId* bound = sigma.lookup(pattern.op());
    if (bound == nullptr) throw UnboundVariable("unbound pattern variable '" + std::string(pattern.op().name()) + "'");
    return *bound;
  }
  ENode node{pattern.op(), {}};
  node.children.reserve(pattern.arity());
  for (const Term& c : pattern.children()) node.children.push_back(add_instance(g, c, sigma));
  return g.add(std::move(node));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::chrono::steady_clock::time_point deadline_after(double seconds) {
  if (seconds <= 0.0) return std::chrono::steady_clock::time_point::max();
  return std::chrono::steady_clock::now() +
         std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
}

bool past(std::chrono::steady_clock::time_point deadline) {
  return deadline != std::chrono::steady_clock::time_point::max() && std::chrono::steady_clock::now() >= deadline;
}

}  // namespace

std::vector<EMatch> ematch(const EGraph& g, const Pattern& p) {
  std::vector<EMatch> out;
  const Term& tree = p.tree();
  ClassSubstitution sigma;
  auto collect = [&](EClassId root) {
    match_class(g, tree, root, sigma, [&](ClassSubstitution& s) { out.push_back(EMatch{s, root}); });
  };
  if (tree.op().is_pattern_var()) {
    for (EClassId id : g.class_ids()) collect(id);
  } else {
    std::vector<EClassId> roots = g.classes_with_op(tree.op());
    for (EClassId id : roots) collect(id);
  }
  return out;
}

BackoffScheduler::Stats& BackoffScheduler::stats(std::size_t rule) {
  if (rule >= stats_.size()) stats_.resize(rule + 1);
  return stats_[rule];
}

bool BackoffScheduler::is_banned(std::size_t rule, std::size_t iteration) const {
  return rule < stats_.size() && iteration < stats_[rule].banned_until;
}

std::size_t BackoffScheduler::threshold(std::size_t rule) const {
  std::size_t times = rule < stats_.size() ? stats_[rule].times_banned : 0;
  return match_limit_ << times;
}

bool BackoffScheduler::admit(std::size_t rule, std::size_t iteration, std::size_t matches) {
  Stats& s = stats(rule);
  std::size_t limit = match_limit_ << s.times_banned;
  if (matches > limit) {
    std::size_t ban = ban_length_ << s.times_banned;
    ++s.times_banned;
    s.banned_until = iteration + ban;
    return false;
  }
  ++s.times_applied;
  return true;
}

bool BackoffScheduler::any_banned(std::size_t iteration) const {
  for (const Stats& s : stats_) {
    if (iteration < s.banned_until) return true;
  }
  return false;
}

void BackoffScheduler::unban_all() {
  for (Stats& s : stats_) s.banned_until = 0;
}

IterationReport run_iteration(EGraph& g, const Ruleset& rules, BackoffScheduler& scheduler, std::size_t iteration,
                              std::chrono::steady_clock::time_point deadline) {
  IterationReport report;
  if (!g.clean()) g.rebuild();
  const std::uint64_t unions_before = g.unions();
  const std::size_t nodes_before = g.num_nodes();
  const std::size_t classes_before = g.num_classes();

  std::vector<std::pair<std::size_t, std::vector<EMatch>>> found;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& rule = rules[i];
    // Folding is done by the constant analysis.
    if (rule.kind() == Rule::Kind::ConstantFold) continue;
    if (scheduler.is_banned(i, iteration)) continue;
    if (past(deadline)) {
      report.timed_out = true;
      break;
    }
    std::vector<EMatch> matches = ematch(g, rule.lhs());
    // Guards see the graph as it was when the iteration started.
    if (const auto& guard = rule.guard()) {
      std::erase_if(matches, [&](const EMatch& m) {
        const EClassId* bound = m.subst.lookup(guard->var);
        if (bound == nullptr) throw UnboundVariable("guard variable is unbound");
        return !guard->holds_for(g.eclass(*bound).constant);
      });
    }
    if (!scheduler.admit(i, iteration, matches.size())) {
      report.banned.push_back(rule.name());
      continue;
    }
    if (!matches.empty()) found.emplace_back(i, std::move(matches));
  }

  for (auto& [i, matches] : found) {
    const Rule& rule = rules[i];
    for (const EMatch& m : matches) {
      EClassId rhs = add_instance(g, rule.rhs().tree(), m.subst);
      g.merge(m.root, rhs);
      ++report.matches_applied;
    }
  }
  g.rebuild();

  report.unions = g.unions() - unions_before;
  report.classes = g.num_classes();
  report.nodes = g.num_nodes();
  report.contradiction = g.contradiction();
  report.changed = report.unions != 0 || report.nodes != nodes_before || report.classes != classes_before;
  return report;
}

Extraction extract(const EGraph& g, EClassId root, const CostModel& model) {
  struct Choice {
    NodeValue value;
    const ENode* node = nullptr;
  };
  std::unordered_map<EClassId, Choice> best;
  std::vector<EClassId> ids = g.class_ids();
  std::vector<NodeValue> kids;

  for (bool changed = true; changed;) {
    changed = false;
    for (EClassId id : ids) {
      for (const ENode& node : g.eclass(id).nodes) {
        kids.clear();
        bool ready = true;
        for (EClassId c : node.children) {
          auto it = best.find(g.find(c));
          if (it == best.end()) {
            ready = false;
            break;
          }
          kids.push_back(it->second.value);
        }
        if (!ready) continue;
        NodeValue v = model.evaluate(node.op, kids);
        auto [it, inserted] = best.try_emplace(id, Choice{v, &node});
        if (inserted) {
          changed = true;
        } else if (v.cost < it->second.value.cost) {
          it->second = Choice{v, &node};
          changed = true;
        }
      }
    }
  }

  root = g.find(root);
  if (!best.contains(root)) throw Error("e-class has no finite term");

  std::unordered_map<EClassId, Term> built;
  std::unordered_map<EClassId, bool> on_stack;
  auto build = [&](auto&& self, EClassId id) -> Term {
    id = g.find(id);
    if (auto it = built.find(id); it != built.end()) return it->second;
    if (on_stack[id]) throw Error("extraction found a cyclic choice");
    on_stack[id] = true;
    const ENode& node = *best.at(id).node;
    std::vector<Term> children;
    children.reserve(node.children.size());
    for (EClassId c : node.children) children.push_back(self(self, c));
    on_stack[id] = false;
    Term t = children.empty() ? Term::leaf(node.op) : Term::make(node.op, std::move(children));
    built.emplace(id, t);
    return t;
  };
  Term term = build(build, root);
  return Extraction{term, model.total(best.at(root).value)};
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Saturated: return "saturated";
    case StopReason::IterationLimit: return "iteration-limit";
    case StopReason::NodeLimit: return "node-limit";
    case StopReason::TimeLimit: return "time-limit";
    case StopReason::Contradiction: return "contradiction";
    case StopReason::GoalReached: return "goal-reached";
  }
  return "unknown";
}

nlohmann::json SaturationReport::to_json() const {
  return nlohmann::json{{"iterations", iterations},       {"enodes", enodes},
                        {"eclasses", eclasses},           {"unions", unions},
                        {"contradiction", contradiction}, {"used_checkpoint", used_checkpoint},
                        {"stop_reason", to_string(stop_reason)}, {"wall_seconds", wall_seconds}};
}

SaturationResult saturate(EGraph& g, EClassId root, const Ruleset& rules, const CostModel& model,
                          const SaturationOptions& options) {
  auto start = std::chrono::steady_clock::now();
  auto deadline = deadline_after(options.limits.time_limit);
  g.rebuild();

  BackoffScheduler scheduler;
  SaturationReport report;
  std::optional<EGraph> checkpoint;
  if (options.checkpointing && !g.contradiction()) checkpoint = g;

  auto goal_reached = [&] {
    if (!options.goal) return false;
    auto id = g.lookup_term(*options.goal);
    return id && g.find(*id) == g.find(root);
  };

  bool reached = goal_reached();
  if (reached) report.stop_reason = StopReason::GoalReached;
  for (std::size_t iteration = 0; !reached; ++iteration) {
    if (iteration >= options.limits.iterations) {
      report.stop_reason = StopReason::IterationLimit;
      break;
    }
    if (past(deadline)) {
      report.stop_reason = StopReason::TimeLimit;
      break;
    }
    if (g.num_nodes() > options.limits.nodes) {
      report.stop_reason = StopReason::NodeLimit;
      break;
    }
    IterationReport it = run_iteration(g, rules, scheduler, iteration, deadline);
    ++report.iterations;
    if (g.contradiction()) {
      report.stop_reason = StopReason::Contradiction;
      break;
    }
    if (options.checkpointing) checkpoint = g;
    if (goal_reached()) {
      reached = true;
      report.stop_reason = StopReason::GoalReached;
      break;
    }
    if (it.timed_out) {
      report.stop_reason = StopReason::TimeLimit;
      break;
    }
    if (!it.changed) {
      if (scheduler.any_banned(iteration + 1)) {
        scheduler.unban_all();
        continue;
      }
      report.stop_reason = StopReason::Saturated;
      break;
    }
  }

  report.enodes = g.num_nodes();
  report.eclasses = g.num_classes();
  report.unions = g.unions();
  report.contradiction = g.contradiction();

  SaturationResult result;
  if (reached) {
    result.best = *options.goal;
    result.cost = cost(model, *options.goal);
  } else {
    const EGraph* source = &g;
    if (g.contradiction() && checkpoint) {
      source = &*checkpoint;
      report.used_checkpoint = true;
    }
    Extraction e = extract(*source, root, model);
    result.best = std::move(e.term);
    result.cost = e.cost;
  }
  report.wall_seconds = seconds_since(start);
  result.report = report;
  return result;
}

SaturationResult saturate(const Term& input, const Ruleset& rules, const CostModel& model,
                          const SaturationOptions& options) {
  EGraph g = options.dims ? EGraph(*options.dims) : EGraph();
  EClassId root = g.add_term(input);
  return saturate(g, root, rules, model, options);
}

PulseResult pulse(const Term& t0, const Ruleset& rules, const CostModel& model, std::size_t iterations_per_pulse,
                  double time_limit, const SaturationOptions& per_pulse) {
  if (iterations_per_pulse == 0) throw Error("iterations_per_pulse must be at least 1");
  auto start = std::chrono::steady_clock::now();
  auto deadline = deadline_after(time_limit);

  PulseResult out;
  out.best = t0;
  out.cost = cost(model, t0);
  do {
    SaturationOptions options = per_pulse;
    options.limits.iterations = iterations_per_pulse;
    if (time_limit > 0.0) {
      double remaining = time_limit - seconds_since(start);
      options.limits.time_limit = std::max(remaining, 1e-3);
    }
    SaturationResult r = saturate(out.best, rules, model, options);
    ++out.pulses;
    out.iterations += r.report.iterations;
    out.contradiction = out.contradiction || r.report.contradiction;
    if (r.report.stop_reason == StopReason::GoalReached) {
      out.best = r.best;
      out.cost = r.cost;
      out.goal_reached = true;
      break;
    }
    if (!(r.cost < out.cost)) break;
    out.best = std::move(r.best);
    out.cost = r.cost;
  } while (!past(deadline));
  out.wall_seconds = seconds_since(start);
  return out;
}

}  // namespace rewrite_arena
