// rewrite-arena: runs the stochastic and equality-saturation engines over
// benchmark suites and emits per-case rows as CSV, JSON or a table.

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rewrite_arena/benchmarks.hpp"
#include "rewrite_arena/error.hpp"
#include "rewrite_arena/harness.hpp"
#include "rewrite_arena/sexpr.hpp"

namespace ra = rewrite_arena;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string suite;
  std::string engine = "stochastic";
  std::string format = "csv";
  std::string output;
  std::vector<std::string> cases;
  bool timing = false;
  unsigned jobs = 1;

  ra::RunConfig run;
  ra::EqSatConfig eqsat;
  bool no_checkpoint = false;

  std::size_t n = 10;
  std::size_t count = 1;
  std::int64_t dim_lo = 1;
  std::int64_t dim_hi = 20;
  std::vector<unsigned> workers_list = {1, 2, 4, 8};
};

struct Flags {
  CLI::Option* beta = nullptr;
  CLI::Option* budget = nullptr;
  CLI::Option* n_soft = nullptr;
  CLI::Option* explore = nullptr;
  CLI::Option* n_hard = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* time_limit = nullptr;
  CLI::Option* iterations = nullptr;
  CLI::Option* node_limit = nullptr;
  CLI::Option* pulse_iterations = nullptr;
  CLI::Option* no_checkpoint = nullptr;
  CLI::Option* n = nullptr;
};

void add_stochastic_flags(CLI::App* cmd, Options& o, Flags& f) {
  f.beta = cmd->add_option("--beta", o.run.beta, "Inverse temperature")->check(CLI::NonNegativeNumber);
  f.budget = cmd->add_option("--budget", o.run.budget, "Independent runs (default: one per worker)");
  f.n_soft = cmd->add_option("--n-soft", o.run.n_soft, "Soft restart period")->check(CLI::PositiveNumber);
  f.explore = cmd->add_option("--explore", o.run.explore, "Exploration steps per soft restart period");
  f.n_hard = cmd->add_option("--n-hard", o.run.n_hard, "Steps without improvement before a run ends")
                 ->check(CLI::PositiveNumber);
  f.workers = cmd->add_option("--workers", o.run.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.run.seed, "Seed (REWRITE_ARENA_SEED overrides)");
}

void add_eqsat_flags(CLI::App* cmd, Options& o, Flags& f) {
  f.iterations = cmd->add_option("--iterations", o.eqsat.limits.iterations, "EqSat iteration limit");
  f.node_limit = cmd->add_option("--node-limit", o.eqsat.limits.nodes, "EqSat e-node limit");
  f.pulse_iterations = cmd->add_option("--pulse-iterations", o.eqsat.pulse_iterations, "Iterations per pulse")
                           ->check(CLI::PositiveNumber);
  f.no_checkpoint = cmd->add_flag("--no-checkpoint", o.no_checkpoint, "Disable e-graph checkpointing");
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json", "table"}));
  cmd->add_option("--output,-o", o.output, "Write to this file instead of stdout");
  cmd->add_flag("--timing", o.timing, "Include wall-clock columns");
}

void apply_seed_env(Options& o) {
  if (const char* env = std::getenv("REWRITE_ARENA_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      o.run.seed = std::stoull(env, &used);
      if (used != std::string_view(env).size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw UsageError("REWRITE_ARENA_SEED must be an unsigned integer");
    }
  }
}

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
  } else {
    ra::write_file_atomically(o.output, text);
  }
}

std::vector<ra::Engine> engines_for(const std::string& name) {
  if (name == "both") return {ra::Engine::Stochastic, ra::Engine::EqSat};
  auto e = ra::parse_engine(name);
  if (!e) throw UsageError("unknown engine '" + name + "'");
  return {*e};
}

void check_engine_flags(const std::vector<ra::Engine>& engines, const Flags& f) {
  bool stochastic = false;
  bool eqsat = false;
  bool pulsed = false;
  for (ra::Engine e : engines) {
    stochastic = stochastic || e == ra::Engine::Stochastic;
    eqsat = eqsat || e != ra::Engine::Stochastic;
    pulsed = pulsed || e == ra::Engine::EqSatPulsed;
  }
  if (!stochastic) {
    for (const CLI::Option* opt : {f.beta, f.budget, f.n_soft, f.explore, f.n_hard, f.workers}) {
      if (given(opt)) throw UsageError(opt->get_name() + " only applies to the stochastic engine");
    }
  }
  if (!eqsat) {
    for (const CLI::Option* opt : {f.iterations, f.node_limit, f.pulse_iterations, f.no_checkpoint}) {
      if (given(opt)) throw UsageError(opt->get_name() + " only applies to the eqsat engines");
    }
  }
  if (!pulsed && given(f.pulse_iterations)) throw UsageError("--pulse-iterations needs --engine eqsat-pulsed");
}

ra::Suite resolve_suite(const Options& o, const Flags& f) {
  if (o.suite == "matmul") {
    ra::Suite suite;
    suite.name = "matmul";
    ra::Rng rng(ra::run_seed(o.run.seed, 0x6d61746d756cULL));
    for (std::size_t i = 0; i < o.count; ++i) {
      ra::BenchmarkCase c = ra::gen_matmul_chain(o.n, o.dim_lo, o.dim_hi, rng);
      c.name += "-" + std::to_string(i);
      suite.cases.push_back(std::move(c));
    }
    return suite;
  }
  if (o.suite == "needle") {
    ra::Suite suite;
    suite.name = "needle";
    suite.cases.push_back(ra::needle_case(given(f.n) ? o.n : 8));
    return suite;
  }
  auto builtin = ra::builtin_suites();
  if (auto it = builtin.find(o.suite); it != builtin.end()) return it->second;
  if (o.suite.ends_with(".json")) {
    try {
      return ra::load_suite_file(o.suite);
    } catch (const ra::Error& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("unknown suite '" + o.suite + "' (try `rewrite-arena list`)");
}

void filter_cases(ra::Suite& suite, const std::vector<std::string>& names) {
  if (names.empty()) return;
  std::vector<ra::BenchmarkCase> kept;
  for (const std::string& n : names) {
    auto it = std::find_if(suite.cases.begin(), suite.cases.end(), [&](const auto& c) { return c.name == n; });
    if (it == suite.cases.end()) throw UsageError("suite '" + suite.name + "' has no case '" + n + "'");
    kept.push_back(*it);
  }
  suite.cases = std::move(kept);
}

std::string summary_lines(std::span<const ra::CaseRow> rows, const std::string& prefix) {
  std::ostringstream out;
  ra::Partition p = ra::solved_partition(rows);
  out << prefix << "partition both=" << p.both << " only_eqsat=" << p.only_eqsat
      << " only_stochastic=" << p.only_stochastic << " neither=" << p.neither << '\n';
  static const std::vector<double> edges = {0.0, 0.5, 0.8, 0.9, 0.95, 0.99, 1.0};
  for (ra::Engine e : {ra::Engine::Stochastic, ra::Engine::EqSat, ra::Engine::EqSatPulsed}) {
    bool any = std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r.engine == e && r.ratio; });
    if (!any) continue;
    auto counts = ra::ratio_histogram(rows, e, edges);
    out << prefix << "ratio_histogram engine=" << ra::to_string(e) << " edges=";
    for (std::size_t i = 0; i < edges.size(); ++i) out << (i ? ";" : "") << edges[i];
    out << " counts=";
    for (std::size_t i = 0; i < counts.size(); ++i) out << (i ? ";" : "") << counts[i];
    out << '\n';
  }
  return out.str();
}

int run_bench(Options& o, const Flags& f) {
  apply_seed_env(o);
  auto engines = engines_for(o.engine);
  check_engine_flags(engines, f);
  ra::Suite suite = resolve_suite(o, f);
  filter_cases(suite, o.cases);

  if (!given(f.time_limit)) o.run.time_limit = suite.time_limit;
  o.eqsat.limits.time_limit = o.run.time_limit;
  o.eqsat.checkpointing = !o.no_checkpoint;
  ra::ExplicitFlags explicit_flags{given(f.beta), given(f.budget), given(f.n_soft), given(f.explore), given(f.n_hard)};
  try {
    o.run.validate();
  } catch (const ra::Error& e) {
    throw UsageError(e.what());
  }

  struct Task {
    std::size_t case_index;
    ra::Engine engine;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < suite.cases.size(); ++i) {
    for (ra::Engine e : engines) tasks.push_back({i, e});
  }
  std::vector<ra::CaseRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        const ra::BenchmarkCase& c = suite.cases[tasks[t].case_index];
        ra::RunConfig cfg = ra::apply_hints(o.run, c.hints, explicit_flags);
        rows[t] = ra::run_case(suite.name, c, tasks[t].engine, cfg, o.eqsat);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::string text;
  if (o.format == "csv") {
    text = ra::rows_to_csv(rows, o.timing) + summary_lines(rows, "# ");
  } else if (o.format == "json") {
    ra::Partition p = ra::solved_partition(rows);
    json doc{{"schema", 1},
             {"suite", suite.name},
             {"rows", ra::rows_to_json(rows, o.timing)},
             {"partition",
              {{"both", p.both}, {"only_eqsat", p.only_eqsat}, {"only_stochastic", p.only_stochastic},
               {"neither", p.neither}}}};
    text = doc.dump(2) + "\n";
  } else {
    text = ra::rows_to_table(rows, o.timing) + summary_lines(rows, "");
  }
  emit(o, text);
  return 0;
}

int run_gen(Options& o) {
  apply_seed_env(o);
  if (o.n < 2) throw UsageError("--n must be at least 2");
  if (o.dim_lo < 1 || o.dim_lo > o.dim_hi) throw UsageError("need 1 <= --dim-lo <= --dim-hi");
  ra::Suite suite;
  suite.name = "matmul";
  ra::Rng rng(ra::run_seed(o.run.seed, 0x6d61746d756cULL));
  for (std::size_t i = 0; i < o.count; ++i) {
    ra::BenchmarkCase c = ra::gen_matmul_chain(o.n, o.dim_lo, o.dim_hi, rng);
    c.name += "-" + std::to_string(i);
    suite.cases.push_back(std::move(c));
  }
  json doc = ra::suite_to_json(suite);
  for (auto& entry : doc["cases"]) entry["ruleset"] = "assoc";
  emit(o, doc.dump(2) + "\n");
  return 0;
}

int run_scale(Options& o, const Flags& f) {
  apply_seed_env(o);
  ra::Suite suite = resolve_suite(o, f);
  filter_cases(suite, o.cases);
  if (!given(f.time_limit)) o.run.time_limit = suite.time_limit;
  try {
    o.run.validate();
  } catch (const ra::Error& e) {
    throw UsageError(e.what());
  }
  auto rows = ra::scaling_report(suite, o.workers_list, o.run);
  if (o.format == "json") {
    json out = json::array();
    for (const auto& r : rows) {
      out.push_back({{"workers", r.workers},
                     {"proposals", r.proposals},
                     {"seconds", r.seconds},
                     {"proposals_per_second", r.proposals_per_second},
                     {"solved", r.solved}});
    }
    emit(o, json{{"schema", 1}, {"suite", suite.name}, {"rows", out}}.dump(2) + "\n");
  } else {
    emit(o, ra::scaling_to_csv(rows));
  }
  return 0;
}

int run_list() {
  for (const auto& [name, suite] : ra::builtin_suites()) {
    std::cout << name << " (" << suite.cases.size() << " cases, " << suite.time_limit << " s)\n";
    for (const auto& c : suite.cases) {
      std::cout << "  " << c.name << "  " << ra::print_sexpr(c.input) << '\n';
    }
  }
  std::cout << "matmul (generated: --n, --count, --dim-lo, --dim-hi)\n";
  std::cout << "needle (generated: --n)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic rewriting and equality saturation benchmarks"};
  app.require_subcommand(1);
  Options o;
  Flags f;

  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark suite");
  bench->add_option("suite", o.suite, "Suite name, matmul, needle, or a suite .json file")->required();
  bench->add_option("--engine", o.engine, "stochastic, eqsat, eqsat-pulsed or both")
      ->check(CLI::IsMember({"stochastic", "eqsat", "eqsat-pulsed", "both"}));
  add_stochastic_flags(bench, o, f);
  add_eqsat_flags(bench, o, f);
  add_output_flags(bench, o);
  f.time_limit = bench->add_option("--time-limit", o.run.time_limit, "Seconds per case and engine")
                     ->check(CLI::NonNegativeNumber);
  bench->add_option("--case", o.cases, "Only run these cases");
  bench->add_option("--jobs", o.jobs, "Cases run in parallel")->check(CLI::PositiveNumber);
  f.n = bench->add_option("--n", o.n, "Chain length (matmul) or arity (needle)")->check(CLI::PositiveNumber);
  bench->add_option("--count", o.count, "Generated matmul chains")->check(CLI::PositiveNumber);
  bench->add_option("--dim-lo", o.dim_lo, "Smallest generated dimension");
  bench->add_option("--dim-hi", o.dim_hi, "Largest generated dimension");

  CLI::App* gen = app.add_subcommand("gen", "Generate a benchmark suite file");
  CLI::App* gen_matmul = gen->add_subcommand("matmul", "Random matrix chains");
  gen->require_subcommand(1);
  gen_matmul->add_option("--n", o.n, "Matrices per chain");
  gen_matmul->add_option("--count", o.count, "Number of chains")->check(CLI::PositiveNumber);
  gen_matmul->add_option("--dim-lo", o.dim_lo, "Smallest dimension");
  gen_matmul->add_option("--dim-hi", o.dim_hi, "Largest dimension");
  gen_matmul->add_option("--seed", o.run.seed, "Seed (REWRITE_ARENA_SEED overrides)");
  gen_matmul->add_option("--output,-o", o.output, "Write to this file instead of stdout");

  CLI::App* scale = app.add_subcommand("scale", "Stochastic proposals per second against worker count");
  Flags scale_flags;
  scale->add_option("suite", o.suite, "Suite name or suite .json file")->required();
  scale->add_option("--workers-list", o.workers_list, "Worker counts")->delimiter(',');
  scale_flags.time_limit = scale->add_option("--time-limit", o.run.time_limit, "Seconds per case");
  scale->add_option("--seed", o.run.seed, "Seed (REWRITE_ARENA_SEED overrides)");
  scale->add_option("--case", o.cases, "Only run these cases");
  scale->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  scale->add_option("--output,-o", o.output, "Write to this file instead of stdout");

  CLI::App* list = app.add_subcommand("list", "List builtin suites and cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (bench->parsed()) return run_bench(o, f);
    if (gen_matmul->parsed()) return run_gen(o);
    if (scale->parsed()) return run_scale(o, scale_flags);
    if (list->parsed()) return run_list();
  } catch (const UsageError& e) {
    std::cerr << "rewrite-arena: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "rewrite-arena: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
