#include "rewrite_arena/soundness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "rewrite_arena/error.hpp"

namespace rewrite_arena {

namespace {

enum class Op {
  Add, Sub, Mul, Div, Neg, Pow, Sqrt, Exp, Log, Sin, Cos, Tan, Sec, Csc, Cot, Abs, Max, Min,
  Lt, Le, Gt, Ge, Eq, Ne, And, Or, Not, Integral, Derivative,
};

const std::unordered_map<std::string_view, Op>& operators() {
  static const std::unordered_map<std::string_view, Op> table = {
      {"+", Op::Add},     {"-", Op::Sub},     {"*", Op::Mul},   {"/", Op::Div},   {"neg", Op::Neg},
      {"pow", Op::Pow},   {"sqrt", Op::Sqrt}, {"exp", Op::Exp}, {"log", Op::Log}, {"sin", Op::Sin},
      {"cos", Op::Cos},   {"tan", Op::Tan},   {"sec", Op::Sec}, {"csc", Op::Csc}, {"cot", Op::Cot},
      {"abs", Op::Abs},   {"max", Op::Max},   {"min", Op::Min}, {"<", Op::Lt},    {"<=", Op::Le},
      {">", Op::Gt},      {">=", Op::Ge},     {"==", Op::Eq},   {"!=", Op::Ne},   {"&&", Op::And},
      {"||", Op::Or},     {"!", Op::Not},     {"int", Op::Integral},              {"d", Op::Derivative},
  };
  return table;
}

bool near_zero(double x) { return std::fabs(x) < kSingularityThreshold; }

std::optional<double> reciprocal(double x) {
  if (near_zero(x)) return std::nullopt;
  return 1.0 / x;
}

void expect_arity(std::string_view name, std::size_t actual, std::size_t lo, std::size_t hi) {
  if (actual < lo || actual > hi) throw Error("operator '" + std::string(name) + "' has unexpected arity " + std::to_string(actual));
}

std::optional<double> eval(const Term& t, const EvalEnv& env) {
  if (t.is_leaf()) {
    Symbol s = t.op();
    if (auto c = s.constant()) {
      if (const auto* r = std::get_if<Rational>(&*c)) return r->to_double();
      return std::get<bool>(*c) ? 1.0 : 0.0;
    }
    if (s.name() == "pi") return std::numbers::pi;
    auto it = env.find(s.name());
    if (it == env.end()) throw Error("no value for variable '" + std::string(s.name()) + "'");
    return it->second;
  }

  std::string_view name = t.op().name();
  auto op_it = operators().find(name);
  if (op_it == operators().end()) throw Error("cannot evaluate operator '" + std::string(name) + "'");
  Op op = op_it->second;
  if (op == Op::Integral || op == Op::Derivative) return std::nullopt;

  std::vector<double> a;
  a.reserve(t.arity());
  for (const Term& c : t.children()) {
    auto v = eval(c, env);
    if (!v) return std::nullopt;
    a.push_back(*v);
  }
  const std::size_t n = a.size();

  double r = 0.0;
  switch (op) {
    case Op::Add:
      expect_arity(name, n, 1, SIZE_MAX);
      for (double x : a) r += x;
      break;
    case Op::Mul:
      expect_arity(name, n, 1, SIZE_MAX);
      r = 1.0;
      for (double x : a) r *= x;
      break;
    case Op::Sub:
      expect_arity(name, n, 1, 2);
      r = n == 1 ? -a[0] : a[0] - a[1];
      break;
    case Op::Neg:
      expect_arity(name, n, 1, 1);
      r = -a[0];
      break;
    case Op::Div: {
      expect_arity(name, n, 2, 2);
      auto inv = reciprocal(a[1]);
      if (!inv) return std::nullopt;
      r = a[0] / a[1];
      break;
    }
    case Op::Pow:
      expect_arity(name, n, 2, 2);
      if (a[0] < 0.0 && std::floor(a[1]) != a[1]) return std::nullopt;
      if (near_zero(a[0]) && a[1] < 0.0) return std::nullopt;
      r = std::pow(a[0], a[1]);
      break;
    case Op::Sqrt:
      expect_arity(name, n, 1, 1);
      if (a[0] < 0.0) return std::nullopt;
      r = std::sqrt(a[0]);
      break;
    case Op::Exp:
      expect_arity(name, n, 1, 1);
      r = std::exp(a[0]);
      break;
    case Op::Log:
      expect_arity(name, n, 1, 1);
      if (a[0] <= 0.0 || near_zero(a[0])) return std::nullopt;
      r = std::log(a[0]);
      break;
    case Op::Sin:
      expect_arity(name, n, 1, 1);
      r = std::sin(a[0]);
      break;
    case Op::Cos:
      expect_arity(name, n, 1, 1);
      r = std::cos(a[0]);
      break;
    case Op::Tan: {
      expect_arity(name, n, 1, 1);
      auto inv = reciprocal(std::cos(a[0]));
      if (!inv) return std::nullopt;
      r = std::sin(a[0]) * *inv;
      break;
    }
    case Op::Sec: {
      expect_arity(name, n, 1, 1);
      auto inv = reciprocal(std::cos(a[0]));
      if (!inv) return std::nullopt;
      r = *inv;
      break;
    }
    case Op::Csc: {
      expect_arity(name, n, 1, 1);
      auto inv = reciprocal(std::sin(a[0]));
      if (!inv) return std::nullopt;
      r = *inv;
      break;
    }
    case Op::Cot: {
      expect_arity(name, n, 1, 1);
      auto inv = reciprocal(std::sin(a[0]));
      if (!inv) return std::nullopt;
      r = std::cos(a[0]) * *inv;
      break;
    }
    case Op::Abs:
      expect_arity(name, n, 1, 1);
      r = std::fabs(a[0]);
      break;
    case Op::Max:
      expect_arity(name, n, 1, SIZE_MAX);
      r = *std::max_element(a.begin(), a.end());
      break;
    case Op::Min:
      expect_arity(name, n, 1, SIZE_MAX);
      r = *std::min_element(a.begin(), a.end());
      break;
    case Op::Lt: expect_arity(name, n, 2, 2); r = a[0] < a[1]; break;
    case Op::Le: expect_arity(name, n, 2, 2); r = a[0] <= a[1]; break;
    case Op::Gt: expect_arity(name, n, 2, 2); r = a[0] > a[1]; break;
    case Op::Ge: expect_arity(name, n, 2, 2); r = a[0] >= a[1]; break;
    case Op::Eq: expect_arity(name, n, 2, 2); r = a[0] == a[1]; break;
    case Op::Ne: expect_arity(name, n, 2, 2); r = a[0] != a[1]; break;
    case Op::And:
      expect_arity(name, n, 2, 2);
      r = (a[0] != 0.0) && (a[1] != 0.0);
      break;
    case Op::Or:
      expect_arity(name, n, 2, 2);
      r = (a[0] != 0.0) || (a[1] != 0.0);
      break;
    case Op::Not:
      expect_arity(name, n, 1, 1);
      r = a[0] == 0.0;
      break;
    case Op::Integral:
    case Op::Derivative:
      return std::nullopt;
  }
  if (!std::isfinite(r)) return std::nullopt;
  return r;
}

void collect_variables(const Term& t, std::set<std::string, std::less<>>& out) {
  if (t.is_leaf()) {
    Symbol s = t.op();
    if (s.kind() == SymbolKind::Name && s.name() != "pi") out.emplace(s.name());
    return;
  }
  for (const Term& c : t.children()) collect_variables(c, out);
}

double draw(Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  if (pick(rng) == 0) return static_cast<double>(std::uniform_int_distribution<int>(-2, 2)(rng));
  double magnitude = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
  return std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
}

}  // namespace

std::optional<double> eval_numeric(const Term& t, const EvalEnv& env) { return eval(t, env); }

std::vector<std::string> variables_of(const Term& t) {
  std::set<std::string, std::less<>> vars;
  collect_variables(t, vars);
  return {vars.begin(), vars.end()};
}

std::string Verdict::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Equivalent:
      out << "equivalent (" << points_tested << " points)";
      break;
    case Kind::Inequivalent: {
      out << "inequivalent at {";
      bool first = true;
      for (const auto& [name, value] : witness) {
        out << (first ? "" : ", ") << name << ": " << value;
        first = false;
      }
      out << "}: " << lhs << " vs " << rhs;
      break;
    }
    case Kind::Inconclusive:
      out << "inconclusive: " << reason;
      break;
  }
  return out.str();
}

Verdict fuzz_equiv(const Term& a, const Term& b, std::size_t samples, double tol, Rng& rng) {
  if (samples == 0) throw Error("fuzz_equiv needs at least one sample");
  std::set<std::string, std::less<>> names;
  collect_variables(a, names);
  collect_variables(b, names);

  Verdict verdict;
  EvalEnv env;
  for (std::size_t i = 0; i < samples; ++i) {
    for (const std::string& name : names) env[name] = draw(rng);
    auto va = eval(a, env);
    auto vb = eval(b, env);
    if (!va || !vb) continue;
    ++verdict.points_tested;
    double scale = 1.0 + std::max(std::fabs(*va), std::fabs(*vb));
    if (std::fabs(*va - *vb) > tol * scale) {
      verdict.kind = Verdict::Kind::Inequivalent;
      verdict.witness = env;
      verdict.lhs = *va;
      verdict.rhs = *vb;
      return verdict;
    }
  }
  std::size_t needed = std::max<std::size_t>(10, samples / 2);
  if (verdict.points_tested >= needed) {
    verdict.kind = Verdict::Kind::Equivalent;
  } else {
    verdict.kind = Verdict::Kind::Inconclusive;
    verdict.reason = "only " + std::to_string(verdict.points_tested) + " of " + std::to_string(samples) +
                     " points were defined on both sides";
  }
  return verdict;
}

Validator fuzz_validator(std::size_t samples, double tol) {
  return [samples, tol](const Term& initial, const Term& candidate, Rng& rng) {
    return fuzz_equiv(initial, candidate, samples, tol, rng).inequivalent();
  };
}

}  // namespace rewrite_arena
