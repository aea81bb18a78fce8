#include "rewrite_arena/fold.hpp"

#include <string_view>

namespace rewrite_arena {

namespace {

const Rational* number(const Constant& c) { return std::get_if<Rational>(&c); }
const bool* boolean(const Constant& c) { return std::get_if<bool>(&c); }

std::optional<Constant> lift(std::optional<Rational> r) {
  if (!r) return std::nullopt;
  return Constant(*r);
}

std::optional<Constant> fold_binary_number(std::string_view op, const Rational& a, const Rational& b) {
  if (op == "+") return lift(add(a, b));
  if (op == "-") return lift(sub(a, b));
  if (op == "*") return lift(mul(a, b));
  if (op == "/") return lift(div(a, b));
  if (op == "max") return Constant(a < b ? b : a);
  if (op == "min") return Constant(a < b ? a : b);
  if (op == "<") return Constant(a < b);
  if (op == "<=") return Constant(a <= b);
  if (op == ">") return Constant(a > b);
  if (op == ">=") return Constant(a >= b);
  if (op == "==") return Constant(a == b);
  if (op == "!=") return Constant(a != b);
  if (op == "pow") {
    if (!b.is_integer()) return std::nullopt;
    return lift(pow(a, b.num()));
  }
  return std::nullopt;
}

}  // namespace

std::optional<Constant> fold_op(Symbol op, std::span<const Constant> args) {
  std::string_view name = op.name();
  if (args.size() == 1) {
    if (const Rational* a = number(args[0])) {
      if (name == "neg") return lift(sub(Rational(0), *a));
      if (name == "abs") return *a < Rational(0) ? lift(sub(Rational(0), *a)) : std::optional<Constant>(*a);
      return std::nullopt;
    }
    if (const bool* a = boolean(args[0]); a && name == "!") return Constant(!*a);
    return std::nullopt;
  }
  if (args.size() != 2) return std::nullopt;

  const Rational* a = number(args[0]);
  const Rational* b = number(args[1]);
  if (a && b) return fold_binary_number(name, *a, *b);

  const bool* p = boolean(args[0]);
  const bool* q = boolean(args[1]);
  if (p && q) {
    if (name == "&&") return Constant(*p && *q);
    if (name == "||") return Constant(*p || *q);
    if (name == "==") return Constant(*p == *q);
    if (name == "!=") return Constant(*p != *q);
  }
  return std::nullopt;
}

std::optional<Constant> fold_constant(const Term& t) {
  if (t.is_leaf()) return t.op().constant();
  std::vector<Constant> args;
  args.reserve(t.arity());
  for (const Term& c : t.children()) {
    auto v = fold_constant(c);
    if (!v) return std::nullopt;
    args.push_back(std::move(*v));
  }
  return fold_op(t.op(), args);
}

}  // namespace rewrite_arena
