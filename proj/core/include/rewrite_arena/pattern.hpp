#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "rewrite_arena/symbol.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

/// A term whose leaves may also be pattern variables (`?a`).
class Pattern {
 public:
  explicit Pattern(Term tree);
  static Pattern parse(std::string_view text);

  const Term& tree() const noexcept { return tree_; }
  /// Distinct pattern variables in first-occurrence order.
  const std::vector<Symbol>& vars() const noexcept { return vars_; }
  bool is_ground() const noexcept { return vars_.empty(); }

 private:
  Term tree_;
  std::vector<Symbol> vars_;
};

/// Finite map from pattern variable to a value (a Term for syntactic
/// matching, an e-class id for e-matching). Patterns rarely bind more than
/// a handful of variables, so this is a flat vector with linear lookup.
template <class Value>
class BasicSubstitution {
 public:
  const Value* lookup(Symbol var) const {
    for (const auto& [v, value] : bindings_) {
      if (v == var) return &value;
    }
    return nullptr;
  }
  void bind(Symbol var, Value value) { bindings_.emplace_back(var, std::move(value)); }
  void pop() { bindings_.pop_back(); }
  std::size_t size() const noexcept { return bindings_.size(); }
  bool empty() const noexcept { return bindings_.empty(); }
  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }

 private:
  std::vector<std::pair<Symbol, Value>> bindings_;
};

using Substitution = BasicSubstitution<Term>;

/// Root-only syntactic match. Repeated variables must bind equal terms.
std::optional<Substitution> match_pattern(const Pattern& p, const Term& t);
/// Extends `sigma` in place; on failure `sigma` is restored.
bool match_into(const Term& pattern, const Term& t, Substitution& sigma);

/// Throws UnboundVariable if `sigma` misses a variable of `p`.
Term instantiate(const Pattern& p, const Substitution& sigma);
Term instantiate(const Term& pattern, const Substitution& sigma);

}  // namespace rewrite_arena
