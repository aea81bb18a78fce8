#include "rewrite_arena/pattern.hpp"

#include <algorithm>

#include "rewrite_arena/error.hpp"
#include "rewrite_arena/sexpr.hpp"

namespace rewrite_arena {

namespace {

void collect_vars(const Term& t, std::vector<Symbol>& vars) {
  if (t.op().is_pattern_var()) {
    if (std::find(vars.begin(), vars.end(), t.op()) == vars.end()) vars.push_back(t.op());
    return;
  }
  for (const Term& c : t.children()) collect_vars(c, vars);
}

}  // namespace

Pattern::Pattern(Term tree) : tree_(std::move(tree)) {
  for_each_position(tree_, [](const Position& p, const Term& t) {
    if (t.op().is_pattern_var() && !t.is_leaf()) {
      throw Error("pattern variable '" + std::string(t.op().name()) + "' used as an operator at " + p.to_string());
    }
  });
  collect_vars(tree_, vars_);
}

Pattern Pattern::parse(std::string_view text) { return Pattern(parse_sexpr(text)); }

bool match_into(const Term& pattern, const Term& t, Substitution& sigma) {
  Symbol op = pattern.op();
  if (op.is_pattern_var()) {
    if (const Term* bound = sigma.lookup(op)) return *bound == t;
    sigma.bind(op, t);
    return true;
  }
  if (op != t.op() || pattern.arity() != t.arity()) return false;
  std::size_t mark = sigma.size();
  for (std::size_t i = 0; i < pattern.arity(); ++i) {
    if (!match_into(pattern.child(i), t.child(i), sigma)) {
      while (sigma.size() > mark) sigma.pop();
      return false;
    }
  }
  return true;
}

std::optional<Substitution> match_pattern(const Pattern& p, const Term& t) {
  Substitution sigma;
  if (!match_into(p.tree(), t, sigma)) return std::nullopt;
  return sigma;
}

Term instantiate(const Term& pattern, const Substitution& sigma) {
  if (pattern.op().is_pattern_var()) {
    const Term* bound = sigma.lookup(pattern.op());
    if (bound == nullptr) throw UnboundVariable("unbound pattern variable '" + std::string(pattern.op().name()) + "'");
    return *bound;
  }
  if (pattern.is_leaf()) return pattern;
  std::vector<Term> children;
  children.reserve(pattern.arity());
  for (const Term& c : pattern.children()) children.push_back(instantiate(c, sigma));
  return Term::make(pattern.op(), std::move(children));
}

Term instantiate(const Pattern& p, const Substitution& sigma) { return instantiate(p.tree(), sigma); }

}  // namespace rewrite_arena
