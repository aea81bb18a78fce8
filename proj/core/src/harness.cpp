#include "rewrite_arena/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <unistd.h>

#include "rewrite_arena/error.hpp"
#include "rewrite_arena/sexpr.hpp"
#include "rewrite_arena/soundness.hpp"

namespace rewrite_arena {

std::string to_string(Engine e) {
  switch (e) {
    case Engine::Stochastic: return "stochastic";
    case Engine::EqSat: return "eqsat";
    case Engine::EqSatPulsed: return "eqsat-pulsed";
  }
  return "unknown";
}

std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "stochastic") return Engine::Stochastic;
  if (name == "eqsat") return Engine::EqSat;
  if (name == "eqsat-pulsed") return Engine::EqSatPulsed;
  return std::nullopt;
}

namespace {

std::optional<Term> eqsat_goal(const BenchmarkCase& c) {
  if (const auto* r = std::get_if<ReachTerm>(&c.criterion)) return r->goal;
  if (std::holds_alternative<ReachTrue>(c.criterion)) return Term::leaf(Symbol::boolean(true));
  return std::nullopt;
}

std::optional<double> ratio_of(std::optional<double> oracle, double found) {
  if (!oracle) return std::nullopt;
  if (found <= 0.0) return *oracle <= 0.0 ? std::optional<double>(1.0) : std::nullopt;
  return *oracle / found;
}

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string format_optional(const std::optional<double>& x) { return x ? format_number(*x) : ""; }

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

bool is_eqsat(Engine e) { return e == Engine::EqSat || e == Engine::EqSatPulsed; }

}  // namespace

CaseRow run_case(const std::string& suite, const BenchmarkCase& c, Engine engine, const RunConfig& cfg,
                 const EqSatConfig& eqsat) {
  CaseRow row;
  row.suite = suite;
  row.case_name = c.name;
  row.engine = engine;
  row.oracle_cost = c.oracle_cost;

  if (engine == Engine::Stochastic) {
    const CostModel& model = *c.stochastic_cost;
    RunConfig run = cfg;
    row.target_cost = target_cost(c, model);
    if (!run.stop_at_cost) run.stop_at_cost = row.target_cost;
    Validator validator = c.hints.validate ? fuzz_validator() : Validator{};
    SearchResult r = search(c.input, *c.rules, model, run, validator);
    row.best_cost = r.best_cost;
    row.solved = judge(c, r.best, model);
    row.work = r.proposals;
    row.restarts = r.hard_restarts;
    row.unsound_restarts = r.unsound_restarts;
    row.best_term = print_sexpr(r.best);
    row.wall_seconds = r.wall_seconds;
  } else {
    const CostModel& model = *c.eqsat_cost;
    row.target_cost = target_cost(c, model);
    SaturationOptions options;
    options.limits = eqsat.limits;
    options.checkpointing = eqsat.checkpointing;
    options.goal = eqsat_goal(c);
    options.dims = c.dims;
    if (engine == Engine::EqSat) {
      SaturationResult r = saturate(c.input, *c.rules, model, options);
      row.best_cost = r.cost;
      row.solved = judge(c, r.best, model);
      row.work = r.report.iterations;
      row.contradiction = r.report.contradiction;
      row.best_term = print_sexpr(r.best);
      row.wall_seconds = r.report.wall_seconds;
    } else {
      PulseResult r = pulse(c.input, *c.rules, model, eqsat.pulse_iterations, eqsat.limits.time_limit, options);
      row.best_cost = r.cost;
      row.solved = judge(c, r.best, model);
      row.work = r.iterations;
      row.restarts = r.pulses;
      row.contradiction = r.contradiction;
      row.best_term = print_sexpr(r.best);
      row.wall_seconds = r.wall_seconds;
    }
  }
  row.ratio = ratio_of(row.oracle_cost, row.best_cost);
  return row;
}

RunConfig apply_hints(RunConfig cfg, const StochasticHints& hints, const ExplicitFlags& explicit_flags) {
  if (hints.beta && !explicit_flags.beta) cfg.beta = *hints.beta;
  if (hints.budget && !explicit_flags.budget) cfg.budget = *hints.budget;
  if (hints.n_soft && !explicit_flags.n_soft) cfg.n_soft = *hints.n_soft;
  if (hints.explore && !explicit_flags.explore) cfg.explore = *hints.explore;
  if (hints.n_hard && !explicit_flags.n_hard) cfg.n_hard = *hints.n_hard;
  return cfg;
}

Partition solved_partition(std::span<const CaseRow> rows) {
  std::map<std::pair<std::string, std::string>, std::pair<bool, bool>> cases;  // (eqsat, stochastic)
  for (const CaseRow& r : rows) {
    auto& [e, s] = cases[{r.suite, r.case_name}];
    if (is_eqsat(r.engine)) e = e || r.solved;
    else s = s || r.solved;
  }
  Partition p;
  for (const auto& [key, solved] : cases) {
    auto [e, s] = solved;
    if (e && s) ++p.both;
    else if (e) ++p.only_eqsat;
    else if (s) ++p.only_stochastic;
    else ++p.neither;
  }
  return p;
}

std::vector<std::size_t> ratio_histogram(std::span<const CaseRow> rows, Engine engine, std::span<const double> edges) {
  if (edges.size() < 2) throw Error("a histogram needs at least two edges");
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (const CaseRow& r : rows) {
    if (r.engine != engine || !r.ratio) continue;
    double x = *r.ratio;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      bool last = i + 2 == edges.size();
      if (x >= edges[i] && (x < edges[i + 1] || (last && x <= edges[i + 1]))) {
        ++counts[i];
        break;
      }
    }
  }
  return counts;
}

std::vector<std::string> csv_columns(bool with_timing) {
  std::vector<std::string> cols = {"suite",    "case", "engine",   "best_cost",        "target_cost",
                                   "oracle_cost", "ratio", "solved", "work", "restarts",
                                   "unsound_restarts", "contradiction", "best_term"};
  if (with_timing) cols.push_back("wall_seconds");
  return cols;
}

std::string rows_to_csv(std::span<const CaseRow> rows, bool with_timing) {
  std::ostringstream out;
  auto cols = csv_columns(with_timing);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const CaseRow& r : rows) {
    out << r.suite << ',' << r.case_name << ',' << to_string(r.engine) << ',' << format_number(r.best_cost) << ','
        << format_optional(r.target_cost) << ',' << format_optional(r.oracle_cost) << ',' << format_optional(r.ratio)
        << ',' << (r.solved ? 1 : 0) << ',' << r.work << ',' << r.restarts << ',' << r.unsound_restarts << ','
        << (r.contradiction ? 1 : 0) << ',' << csv_quote(r.best_term);
    if (with_timing) out << ',' << format_number(r.wall_seconds);
    out << '\n';
  }
  return out.str();
}

nlohmann::json rows_to_json(std::span<const CaseRow> rows, bool with_timing) {
  auto opt = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  nlohmann::json out = nlohmann::json::array();
  for (const CaseRow& r : rows) {
    nlohmann::json row{{"suite", r.suite},
                       {"case", r.case_name},
                       {"engine", to_string(r.engine)},
                       {"best_cost", r.best_cost},
                       {"target_cost", opt(r.target_cost)},
                       {"oracle_cost", opt(r.oracle_cost)},
                       {"ratio", opt(r.ratio)},
                       {"solved", r.solved},
                       {"work", r.work},
                       {"restarts", r.restarts},
                       {"unsound_restarts", r.unsound_restarts},
                       {"contradiction", r.contradiction},
                       {"best_term", r.best_term}};
    if (with_timing) row["wall_seconds"] = r.wall_seconds;
    out.push_back(std::move(row));
  }
  return out;
}

std::string rows_to_table(std::span<const CaseRow> rows, bool with_timing) {
  std::vector<std::string> header = {"case", "engine", "best", "target", "oracle", "ratio", "solved", "work", "restarts"};
  if (with_timing) header.push_back("seconds");
  std::vector<std::vector<std::string>> cells;
  for (const CaseRow& r : rows) {
    std::vector<std::string> line = {r.suite + "/" + r.case_name,
                                     to_string(r.engine),
                                     format_number(r.best_cost),
                                     format_optional(r.target_cost),
                                     format_optional(r.oracle_cost),
                                     format_optional(r.ratio),
                                     r.solved ? "yes" : "no",
                                     std::to_string(r.work),
                                     std::to_string(r.restarts + r.unsound_restarts)};
    if (with_timing) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(3) << r.wall_seconds;
      line.push_back(s.str());
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i])) << line[i];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& line : cells) emit(line);
  return out.str();
}

std::vector<ScalingRow> scaling_report(const Suite& suite, std::span<const unsigned> workers_list, const RunConfig& cfg) {
  if (workers_list.empty()) throw Error("scaling needs at least one worker count");
  std::vector<ScalingRow> rows;
  for (unsigned workers : workers_list) {
    ScalingRow row;
    row.workers = workers;
    for (const BenchmarkCase& c : suite.cases) {
      RunConfig run = apply_hints(cfg, c.hints);
      run.workers = workers;
      run.budget = RunConfig::kRunsUntilDeadline;
      CaseRow r = run_case(suite.name, c, Engine::Stochastic, run, EqSatConfig{});
      row.proposals += r.work;
      row.seconds += r.wall_seconds;
      if (r.solved) ++row.solved;
    }
    row.proposals_per_second = row.seconds > 0.0 ? static_cast<double>(row.proposals) / row.seconds : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string scaling_to_csv(std::span<const ScalingRow> rows) {
  std::ostringstream out;
  out << "workers,proposals,seconds,proposals_per_second,solved\n";
  for (const ScalingRow& r : rows) {
    out << r.workers << ',' << r.proposals << ',' << format_number(r.seconds) << ','
        << format_number(r.proposals_per_second) << ',' << r.solved << '\n';
  }
  return out.str();
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error("cannot move output into place at '" + path + "': " + ec.message());
  }
}

}  // namespace rewrite_arena
