#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rewrite_arena/pattern.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

/// Side condition on a rule. The only kind today is a syntactic nonzero
/// check: the bound term must not fold to the literal 0.
struct Guard {
  enum class Kind { SyntacticNonzero };

  Kind kind = Kind::SyntacticNonzero;
  Symbol var = Symbol::intern("?_");

  static Guard nonzero(Symbol var) { return Guard{Kind::SyntacticNonzero, var}; }

  bool holds(const Substitution& sigma) const;
  /// Decides the guard from a known constant value of the bound term, or
  /// from the absence of one.
  bool holds_for(const std::optional<Constant>& value) const;
  std::string to_string() const;
};

class Rule {
 public:
  enum class Kind {
    Rewrite,       // lhs => rhs [if guard]
    ConstantFold,  // replaces an operator applied to literals by its value
  };

  /// Throws Error when the rhs or guard uses variables the lhs does not bind.
  static Rule rewrite(std::string name, Pattern lhs, Pattern rhs, std::optional<Guard> guard = std::nullopt);
  static Rule constant_fold(std::string name);

  const std::string& name() const noexcept { return name_; }
  Kind kind() const noexcept { return kind_; }
  const Pattern& lhs() const { return *lhs_; }
  const Pattern& rhs() const { return *rhs_; }
  const std::optional<Guard>& guard() const noexcept { return guard_; }

  /// Applies the rule at the root of `t`, or nullopt if it does not match or
  /// the guard fails.
  std::optional<Term> apply_root(const Term& t) const;
  std::string to_string() const;

 private:
  Rule() = default;

  std::string name_;
  Kind kind_ = Kind::Rewrite;
  std::optional<Pattern> lhs_;
  std::optional<Pattern> rhs_;
  std::optional<Guard> guard_;
};

/// Named, ordered rule collection with an index from root operator to the
/// rules that can possibly fire there.
class Ruleset {
 public:
  explicit Ruleset(std::string name = "rules") : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  /// Throws Error on a duplicate rule name.
  void add(Rule rule);
  /// Returns a copy without the named rules (unknown names are ignored).
  Ruleset without(std::span<const std::string> names) const;

  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  const Rule& operator[](std::size_t i) const { return rules_[i]; }
  const Rule* find(std::string_view name) const;
  auto begin() const { return rules_.begin(); }
  auto end() const { return rules_.end(); }

  /// Indices, in ruleset order, of rules that may apply at a node with `op`.
  std::span<const std::uint32_t> rules_for(Symbol op) const;

 private:
  void reindex();

  std::string name_;
  std::vector<Rule> rules_;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_op_;
  std::vector<std::uint32_t> any_op_;
};

/// Ruleset text: one rule per line,
///   name: LHS => RHS [if nonzero(?v)]
///   name: LHS <=> RHS          (desugars to `name` and `name-rev`)
///   name: constant-fold
/// `;` starts a comment. Throws ParseError with the byte offset.
Ruleset parse_ruleset(std::string_view text, std::string name = "rules");

/// Throws InvalidPosition when `p` is not a position of `t`.
std::optional<Term> apply_rule_at(const Rule& r, const Term& t, const Position& p);

struct Proposal {
  Term term;
  std::string rule;
  Position position;
};

/// Every distinct term reachable by one rule application anywhere in `t`,
/// position-major (pre-order) then rule-minor. `t` itself is never included.
std::vector<Proposal> proposals(const Term& t, const Ruleset& rules);

/// One candidate rewrite of a source term, kept unmaterialized: the new
/// subterm at `position` plus the hash the rewritten whole term would have.
struct Rewrite {
  Position position;
  std::uint32_t rule = 0;
  Term original;
  Term replacement;
  std::size_t result_hash = 0;
};

/// The deduplicated proposal set P(t). Enumeration does not allocate new
/// spines; only materialize() builds a full successor term.
class CandidateSet {
 public:
  void collect(const Term& source, const Ruleset& rules);

  const Term& source() const noexcept { return source_; }
  std::size_t size() const noexcept { return rewrites_.size(); }
  bool empty() const noexcept { return rewrites_.empty(); }
  const Rewrite& operator[](std::size_t i) const { return rewrites_[i]; }

  Term materialize(std::size_t i) const;

 private:
  bool is_duplicate(const Rewrite& candidate);

  Term source_;
  std::vector<Rewrite> rewrites_;
  std::unordered_multimap<std::size_t, std::uint32_t> by_hash_;
};

}  // namespace rewrite_arena
