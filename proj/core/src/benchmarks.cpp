#include "rewrite_arena/benchmarks.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include "rewrite_arena/error.hpp"
#include "rewrite_arena/sexpr.hpp"

namespace rewrite_arena {

namespace detail {
std::string_view embedded_file(std::string_view name);
}

namespace {

using nlohmann::json;

constexpr std::uint64_t kInfinity = std::numeric_limits<std::uint64_t>::max();

std::uint64_t product_cost(std::span<const std::int64_t> dims, std::size_t i, std::size_t k, std::size_t j) {
  return static_cast<std::uint64_t>(dims[i]) * static_cast<std::uint64_t>(dims[k + 1]) *
         static_cast<std::uint64_t>(dims[j + 1]);
}

void check_dims(std::span<const std::int64_t> dims) {
  if (dims.size() < 2) throw Error("a matrix chain needs at least two dimensions");
  for (std::int64_t d : dims) {
    if (d <= 0) throw Error("matrix dimensions must be positive");
  }
}

std::uint64_t brute_force(std::span<const std::int64_t> dims, std::size_t i, std::size_t j) {
  if (i == j) return 0;
  std::uint64_t best = kInfinity;
  for (std::size_t k = i; k < j; ++k) {
    best = std::min(best, brute_force(dims, i, k) + brute_force(dims, k + 1, j) + product_cost(dims, i, k, j));
  }
  return best;
}

Symbol matrix_name(std::size_t i) { return Symbol::intern("A" + std::to_string(i + 1)); }

Term random_tree(std::size_t lo, std::size_t hi, Rng& rng) {
  if (lo == hi) return Term::leaf(matrix_name(lo));
  std::size_t k = std::uniform_int_distribution<std::size_t>(lo, hi - 1)(rng);
  return Term::make(Symbol::intern("*"), {random_tree(lo, k, rng), random_tree(k + 1, hi, rng)});
}

json cost_pair(const json& eqsat, const json& stochastic) {
  return json{{"eqsat", eqsat}, {"stochastic", stochastic}};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::shared_ptr<const Ruleset> resolve_ruleset(const std::string& name, const std::string& rules_dir) {
  if (!rules_dir.empty()) {
    for (const auto& candidate : {std::filesystem::path(rules_dir) / (name + ".rules"),
                                  std::filesystem::path(rules_dir) / ".." / "rulesets" / (name + ".rules")}) {
      if (std::filesystem::is_regular_file(candidate)) {
        return std::make_shared<const Ruleset>(parse_ruleset(read_text(candidate), name));
      }
    }
  }
  return builtin_ruleset(name);
}

Term parse_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) throw Error(where + ": missing string field '" + key + "'");
  try {
    return parse_sexpr(obj[key].get<std::string>());
  } catch (const ParseError& e) {
    throw Error(where + ": field '" + key + "': " + e.what());
  }
}

}  // namespace

std::uint64_t dp_optimal_cost(std::span<const std::int64_t> dims) {
  check_dims(dims);
  const std::size_t n = dims.size() - 1;
  std::vector<std::vector<std::uint64_t>> m(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      std::size_t j = i + len - 1;
      m[i][j] = kInfinity;
      for (std::size_t k = i; k < j; ++k) {
        m[i][j] = std::min(m[i][j], m[i][k] + m[k + 1][j] + product_cost(dims, i, k, j));
      }
    }
  }
  return m[0][n - 1];
}

std::uint64_t brute_force_optimal(std::span<const std::int64_t> dims) {
  check_dims(dims);
  if (dims.size() - 1 > 12) throw Error("brute force is limited to 12 matrices");
  return brute_force(dims, 0, dims.size() - 2);
}

BenchmarkCase matmul_case(std::span<const std::int64_t> dims, std::string name) {
  check_dims(dims);
  const std::size_t n = dims.size() - 1;
  DimEnv env;
  json dims_json = json::object();
  Term chain = Term::leaf(matrix_name(0));
  for (std::size_t i = 0; i < n; ++i) {
    env.bind(matrix_name(i), Dims{dims[i], dims[i + 1]});
    dims_json[std::string(matrix_name(i).name())] = {dims[i], dims[i + 1]};
    if (i > 0) chain = Term::make(Symbol::intern("*"), {chain, Term::leaf(matrix_name(i))});
  }
  auto model = std::make_shared<const MatMulScalarOps>(env);
  double oracle = static_cast<double>(dp_optimal_cost(dims));

  BenchmarkCase c;
  c.name = std::move(name);
  c.input = chain;
  c.rules = builtin_ruleset("assoc");
  c.eqsat_cost = model;
  c.stochastic_cost = model;
  json spec{{"kind", "matmul"}, {"dims", dims_json}};
  c.cost_spec = cost_pair(spec, spec);
  c.criterion = TargetCost{oracle, std::nullopt};
  c.oracle_cost = oracle;
  c.dims = env;
  c.provenance = "generated matrix chain";
  return c;
}

BenchmarkCase gen_matmul_chain(std::size_t n, std::int64_t dim_lo, std::int64_t dim_hi, Rng& rng) {
  if (n < 2) throw Error("a generated chain needs at least two matrices");
  if (dim_lo < 1 || dim_lo > dim_hi) throw Error("need 1 <= dim_lo <= dim_hi");
  std::uniform_int_distribution<std::int64_t> dist(dim_lo, dim_hi);
  std::vector<std::int64_t> dims(n + 1);
  for (auto& d : dims) d = dist(rng);
  return matmul_case(dims, "matmul-" + std::to_string(n));
}

Term random_association(std::size_t n, Rng& rng) {
  if (n == 0) throw Error("empty chain");
  return random_tree(0, n - 1, rng);
}

BenchmarkCase needle_case(std::size_t n) {
  if (n == 0) throw Error("needle arity must be at least 1");
  std::string bs;
  for (std::size_t i = 0; i < n; ++i) bs += " b";
  std::string text = "a-to-b: a => b\nb-to-a: b => a\nf-to-g: (f" + bs + ") => (g" + bs + ")\n";
  auto rules = std::make_shared<const Ruleset>(parse_ruleset(text, "needle"));

  std::vector<Term> as(n, Term::leaf(Symbol::intern("a")));
  Term goal = parse_sexpr("(g" + bs + ")");
  auto model = std::make_shared<const GoalIndicator>(goal);

  BenchmarkCase c;
  c.name = "needle-" + std::to_string(n);
  c.input = Term::make(Symbol::intern("f"), std::move(as));
  c.rules = rules;
  c.eqsat_cost = model;
  c.stochastic_cost = model;
  json spec{{"kind", "goal"}, {"goal", print_sexpr(goal)}};
  c.cost_spec = cost_pair(spec, spec);
  c.criterion = ReachTerm{goal};
  c.provenance = "abstract needle system";
  return c;
}

std::shared_ptr<const Ruleset> builtin_ruleset(std::string_view name) {
  static const std::map<std::string, std::shared_ptr<const Ruleset>, std::less<>> rulesets = [] {
    std::map<std::string, std::shared_ptr<const Ruleset>, std::less<>> out;
    for (const char* n : {"assoc", "trig", "integration", "halide"}) {
      std::string_view text = detail::embedded_file(std::string(n) + ".rules");
      out.emplace(n, std::make_shared<const Ruleset>(parse_ruleset(text, n)));
    }
    return out;
  }();
  auto it = rulesets.find(name);
  if (it == rulesets.end()) throw Error("unknown ruleset '" + std::string(name) + "'");
  return it->second;
}

std::map<std::string, Suite> builtin_suites() {
  std::map<std::string, Suite> out;
  for (const char* file : {"trig.json", "integration.json", "halide.json"}) {
    Suite s = load_suite(json::parse(detail::embedded_file(file)));
    out.emplace(s.name, std::move(s));
  }
  return out;
}

CostModelPtr cost_model_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("kind")) throw Error("cost model needs a 'kind'");
  const std::string kind = spec["kind"].get<std::string>();
  if (kind == "ast-size") return std::make_shared<const AstSize>();
  if (kind == "integ-square") return std::make_shared<const IntegSquare>();
  if (kind == "weighted") {
    std::unordered_map<Symbol, double> weights;
    if (spec.contains("weights")) {
      for (const auto& [op, w] : spec["weights"].items()) weights.emplace(Symbol::intern(op), w.get<double>());
    }
    return std::make_shared<const WeightedAstSize>(std::move(weights));
  }
  if (kind == "matmul") {
    DimEnv env;
    if (!spec.contains("dims")) throw Error("matmul cost model needs 'dims'");
    for (const auto& [leaf, d] : spec["dims"].items()) {
      if (!d.is_array() || d.size() != 2) throw Error("dims of '" + leaf + "' must be [rows, cols]");
      env.bind(Symbol::intern(leaf), Dims{d[0].get<std::int64_t>(), d[1].get<std::int64_t>()});
    }
    return std::make_shared<const MatMulScalarOps>(std::move(env));
  }
  if (kind == "goal") {
    if (!spec.contains("goal")) throw Error("goal cost model needs 'goal'");
    return std::make_shared<const GoalIndicator>(parse_sexpr(spec["goal"].get<std::string>()));
  }
  throw Error("unknown cost model kind '" + kind + "'");
}

Suite load_suite(const json& doc, const std::string& rules_dir) {
  try {
    if (doc.contains("schema") && doc["schema"].get<int>() != 1) throw Error("unsupported suite schema");
    Suite suite;
    suite.name = doc.at("name").get<std::string>();
    suite.time_limit = doc.value("time_limit", 10.0);

    const std::string default_rules = doc.value("ruleset", std::string());
    if (!default_rules.empty()) resolve_ruleset(default_rules, rules_dir);
    const json default_cost = doc.value("cost", json());
    const json default_eqsat = doc.value("eqsat_cost", default_cost);
    const json default_stochastic = doc.value("stochastic_cost", default_cost);
    const std::string default_criterion = doc.value("criterion", std::string("target"));

    StochasticHints default_hints;
    if (doc.contains("stochastic")) {
      const json& h = doc["stochastic"];
      if (h.contains("beta")) default_hints.beta = h["beta"].get<double>();
      if (h.contains("budget")) default_hints.budget = h["budget"].get<std::uint64_t>();
      if (h.contains("n_soft")) default_hints.n_soft = h["n_soft"].get<std::uint64_t>();
      if (h.contains("explore")) default_hints.explore = h["explore"].get<std::uint64_t>();
      if (h.contains("n_hard")) default_hints.n_hard = h["n_hard"].get<std::uint64_t>();
      default_hints.validate = h.value("validate", false);
    }

    for (const json& entry : doc.at("cases")) {
      BenchmarkCase c;
      c.name = entry.at("name").get<std::string>();
      const std::string where = "case '" + c.name + "'";
      c.input = parse_field(entry, "input", where);

      std::string rules_name = entry.value("ruleset", default_rules);
      if (rules_name.empty()) throw Error(where + ": no ruleset");
      c.rules = resolve_ruleset(rules_name, rules_dir);

      json eqsat_spec = entry.value("eqsat_cost", entry.value("cost", default_eqsat));
      json stochastic_spec = entry.value("stochastic_cost", entry.value("cost", default_stochastic));
      if (eqsat_spec.is_null() || stochastic_spec.is_null()) throw Error(where + ": no cost model");
      c.eqsat_cost = cost_model_from_json(eqsat_spec);
      c.stochastic_cost = cost_model_from_json(stochastic_spec);
      c.cost_spec = cost_pair(eqsat_spec, stochastic_spec);

      std::string criterion = entry.value("criterion", default_criterion);
      if (criterion == "target") {
        TargetCost t;
        if (entry.contains("target_cost")) t.cost = entry["target_cost"].get<double>();
        if (entry.contains("intended")) t.intended = parse_field(entry, "intended", where);
        if (!t.cost && !t.intended) throw Error(where + ": target criterion needs 'intended' or 'target_cost'");
        c.criterion = t;
      } else if (criterion == "true") {
        c.criterion = ReachTrue{};
      } else if (criterion == "goal") {
        c.criterion = ReachTerm{parse_field(entry, "goal", where)};
      } else {
        throw Error(where + ": unknown criterion '" + criterion + "'");
      }

      if (entry.contains("oracle_cost")) c.oracle_cost = entry["oracle_cost"].get<double>();
      if (entry.contains("dims")) {
        DimEnv env;
        for (const auto& [leaf, d] : entry["dims"].items()) {
          env.bind(Symbol::intern(leaf), Dims{d.at(0).get<std::int64_t>(), d.at(1).get<std::int64_t>()});
        }
        c.dims = std::move(env);
      }
      c.provenance = entry.value("provenance", std::string());
      c.hints = default_hints;
      suite.cases.push_back(std::move(c));
    }
    return suite;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed suite: ") + e.what());
  }
}

Suite load_suite_file(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error("'" + path + "' is not valid JSON: " + e.what());
  }
  return load_suite(doc, std::filesystem::path(path).parent_path().string());
}

json suite_to_json(const Suite& suite) {
  json cases = json::array();
  for (const BenchmarkCase& c : suite.cases) {
    json entry{{"name", c.name}, {"input", print_sexpr(c.input)}, {"ruleset", c.rules ? c.rules->name() : ""}};
    if (c.cost_spec.contains("eqsat")) entry["eqsat_cost"] = c.cost_spec["eqsat"];
    if (c.cost_spec.contains("stochastic")) entry["stochastic_cost"] = c.cost_spec["stochastic"];
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, TargetCost>) {
            entry["criterion"] = "target";
            if (k.cost) entry["target_cost"] = *k.cost;
            if (k.intended) entry["intended"] = print_sexpr(*k.intended);
          } else if constexpr (std::is_same_v<K, ReachTerm>) {
            entry["criterion"] = "goal";
            entry["goal"] = print_sexpr(k.goal);
          } else {
            entry["criterion"] = "true";
          }
        },
        c.criterion);
    if (c.oracle_cost) entry["oracle_cost"] = *c.oracle_cost;
    if (c.dims) {
      std::vector<std::pair<std::string, Dims>> sorted;
      for (const auto& [leaf, d] : *c.dims) sorted.emplace_back(std::string(leaf.name()), d);
      std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      json dims = json::object();
      for (const auto& [leaf, d] : sorted) dims[leaf] = {d.rows, d.cols};
      entry["dims"] = dims;
    }
    if (!c.provenance.empty()) entry["provenance"] = c.provenance;
    cases.push_back(std::move(entry));
  }
  return json{{"schema", 1}, {"name", suite.name}, {"time_limit", suite.time_limit}, {"cases", cases}};
}

std::optional<double> target_cost(const BenchmarkCase& c, const CostModel& model) {
  if (const auto* t = std::get_if<TargetCost>(&c.criterion)) {
    if (t->cost) return t->cost;
    if (t->intended) return cost(model, *t->intended);
    return std::nullopt;
  }
  if (const auto* r = std::get_if<ReachTerm>(&c.criterion)) return cost(model, r->goal);
  return cost(model, Term::leaf(Symbol::boolean(true)));
}

bool judge(const BenchmarkCase& c, const Term& found, const CostModel& model) {
  if (const auto* r = std::get_if<ReachTerm>(&c.criterion)) return found == r->goal;
  if (std::holds_alternative<ReachTrue>(c.criterion)) {
    return found.is_leaf() && found.op() == Symbol::boolean(true);
  }
  auto target = target_cost(c, model);
  if (!target) return false;
  return cost(model, found) <= *target + 1e-9 * std::max(1.0, std::abs(*target));
}

}  // namespace rewrite_arena
