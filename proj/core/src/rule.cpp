#include "rewrite_arena/rule.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "rewrite_arena/error.hpp"
#include "rewrite_arena/fold.hpp"
#include "rewrite_arena/sexpr.hpp"

namespace rewrite_arena {

bool Guard::holds_for(const std::optional<Constant>& value) const {
  switch (kind) {
    case Kind::SyntacticNonzero:
      return !value || !is_zero(*value);
  }
  return false;
}

bool Guard::holds(const Substitution& sigma) const {
  const Term* bound = sigma.lookup(var);
  if (bound == nullptr) throw UnboundVariable("guard variable '" + std::string(var.name()) + "' is unbound");
  return holds_for(fold_constant(*bound));
}

std::string Guard::to_string() const { return "nonzero(" + std::string(var.name()) + ")"; }

Rule Rule::rewrite(std::string name, Pattern lhs, Pattern rhs, std::optional<Guard> guard) {
  const auto& bound = lhs.vars();
  for (Symbol v : rhs.vars()) {
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) {
      throw Error("rule '" + name + "': right-hand side uses unbound variable '" + std::string(v.name()) + "'");
    }
  }
  if (guard && std::find(bound.begin(), bound.end(), guard->var) == bound.end()) {
    throw Error("rule '" + name + "': guard uses unbound variable '" + std::string(guard->var.name()) + "'");
  }
  Rule r;
  r.name_ = std::move(name);
  r.kind_ = Kind::Rewrite;
  r.lhs_ = std::move(lhs);
  r.rhs_ = std::move(rhs);
  r.guard_ = guard;
  return r;
}

Rule Rule::constant_fold(std::string name) {
  Rule r;
  r.name_ = std::move(name);
  r.kind_ = Kind::ConstantFold;
  return r;
}

std::optional<Term> Rule::apply_root(const Term& t) const {
  if (kind_ == Kind::ConstantFold) {
    if (t.is_leaf()) return std::nullopt;
    std::vector<Constant> args;
    args.reserve(t.arity());
    for (const Term& c : t.children()) {
      if (!c.is_leaf()) return std::nullopt;
      auto v = c.op().constant();
      if (!v) return std::nullopt;
      args.push_back(*v);
    }
    auto folded = fold_op(t.op(), args);
    if (!folded) return std::nullopt;
    return Term::leaf(Symbol::of(*folded));
  }

  Substitution sigma;
  if (!match_into(lhs_->tree(), t, sigma)) return std::nullopt;
  if (guard_ && !guard_->holds(sigma)) return std::nullopt;
  return instantiate(*rhs_, sigma);
}

std::string Rule::to_string() const {
  if (kind_ == Kind::ConstantFold) return name_ + ": constant-fold";
  std::string out = name_ + ": " + print_sexpr(lhs_->tree()) + " => " + print_sexpr(rhs_->tree());
  if (guard_) out += " if " + guard_->to_string();
  return out;
}

void Ruleset::add(Rule rule) {
  if (find(rule.name()) != nullptr) throw Error("duplicate rule name '" + rule.name() + "'");
  rules_.push_back(std::move(rule));
  reindex();
}

Ruleset Ruleset::without(std::span<const std::string> names) const {
  Ruleset out(name_);
  for (const Rule& r : rules_) {
    if (std::find(names.begin(), names.end(), r.name()) == names.end()) out.add(r);
  }
  return out;
}

const Rule* Ruleset::find(std::string_view name) const {
  for (const Rule& r : rules_) {
    if (r.name() == name) return &r;
  }
  return nullptr;
}

void Ruleset::reindex() {
  by_op_.clear();
  any_op_.clear();
  for (std::uint32_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    if (r.kind() == Rule::Kind::ConstantFold || r.lhs().tree().op().is_pattern_var()) {
      any_op_.push_back(i);
      for (auto& [op, list] : by_op_) list.push_back(i);
    } else {
      auto [it, inserted] = by_op_.try_emplace(r.lhs().tree().op().id());
      if (inserted) it->second = any_op_;
      if (it->second.empty() || it->second.back() != i) it->second.push_back(i);
    }
  }
}

std::span<const std::uint32_t> Ruleset::rules_for(Symbol op) const {
  auto it = by_op_.find(op.id());
  if (it == by_op_.end()) return any_op_;
  return it->second;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  if (auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
  return line;
}

// Position just past the balanced s-expression starting at `from`.
std::size_t sexpr_end(std::string_view text, std::size_t from, std::size_t base) {
  std::size_t offset = from;
  try {
    parse_sexpr_prefix(text, offset);
  } catch (const ParseError& e) {
    throw ParseError(base + e.offset(), std::string(e.what()).substr(std::string(e.what()).find(':') + 2));
  }
  return offset;
}

Guard parse_guard(std::string_view text, std::size_t base) {
  text = trim(text);
  constexpr std::string_view kPrefix = "nonzero(";
  if (text.substr(0, kPrefix.size()) != kPrefix || text.back() != ')') {
    throw ParseError(base, "unknown guard '" + std::string(text) + "', expected nonzero(?v)");
  }
  std::string_view var = trim(text.substr(kPrefix.size(), text.size() - kPrefix.size() - 1));
  if (var.size() < 2 || var.front() != '?') throw ParseError(base, "guard expects a pattern variable");
  return Guard::nonzero(Symbol::intern(var));
}

}  // namespace

Ruleset parse_ruleset(std::string_view text, std::string name) {
  Ruleset rules(std::move(name));
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = strip_comment(text.substr(line_start, line_end - line_start));
    std::size_t base = line_start;
    line_start = line_end + 1;
    if (trim(line).empty()) continue;

    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(base, "expected 'name: rule'");
    std::string rule_name(trim(line.substr(0, colon)));
    if (rule_name.empty()) throw ParseError(base, "empty rule name");
    std::string_view body = line.substr(colon + 1);
    std::size_t body_base = base + colon + 1;

    try {
      if (trim(body) == "constant-fold") {
        rules.add(Rule::constant_fold(rule_name));
        continue;
      }

      std::size_t lhs_end = sexpr_end(body, 0, body_base);
      Pattern lhs(parse_sexpr(body.substr(0, lhs_end)));
      std::string_view rest = body.substr(lhs_end);
      rest = trim(rest);
      std::size_t arrow_at = body.size() - rest.size();
      bool bidirectional = false;
      if (rest.substr(0, 3) == "<=>") {
        bidirectional = true;
        rest.remove_prefix(3);
      } else if (rest.substr(0, 2) == "=>") {
        rest.remove_prefix(2);
      } else {
        throw ParseError(body_base + arrow_at, "expected '=>' or '<=>'");
      }

      std::size_t rhs_offset = body.size() - rest.size();
      std::size_t rhs_end = sexpr_end(body, rhs_offset, body_base);
      Pattern rhs(parse_sexpr(body.substr(rhs_offset, rhs_end - rhs_offset)));
      std::string_view tail = trim(body.substr(rhs_end));

      std::optional<Guard> guard;
      if (!tail.empty()) {
        if (tail.substr(0, 2) != "if" || tail.size() < 3 || !std::isspace(static_cast<unsigned char>(tail[2]))) {
          throw ParseError(body_base + rhs_end, "unexpected text after rule: '" + std::string(tail) + "'");
        }
        if (bidirectional) throw ParseError(body_base + rhs_end, "guards are not allowed on bidirectional rules");
        guard = parse_guard(tail.substr(2), body_base + rhs_end);
      }

      rules.add(Rule::rewrite(rule_name, lhs, rhs, guard));
      if (bidirectional) rules.add(Rule::rewrite(rule_name + "-rev", rhs, lhs));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(base, e.what());
    }
  }
  return rules;
}

std::optional<Term> apply_rule_at(const Rule& r, const Term& t, const Position& p) {
  Term sub = subterm_at(t, p);
  auto replacement = r.apply_root(sub);
  if (!replacement) return std::nullopt;
  return replace_at(t, p, *replacement);
}

namespace {

struct Collector {
  const Ruleset& rules;
  std::vector<const Term*> ancestors;
  Position position;
  std::function<void(Rewrite&&)> emit;

  void visit(const Term& node) {
    for (std::uint32_t r : rules.rules_for(node.op())) {
      auto replacement = rules[r].apply_root(node);
      if (!replacement || *replacement == node) continue;
      std::size_t h = replacement->hash();
      for (std::size_t d = ancestors.size(); d-- > 0;) h = Term::hash_with_child(*ancestors[d], position.path[d], h);
      emit(Rewrite{position, r, node, std::move(*replacement), h});
    }
    ancestors.push_back(&node);
    for (std::uint32_t i = 0; i < node.arity(); ++i) {
      position.path.push_back(i);
      visit(node.child(i));
      position.path.pop_back();
    }
    ancestors.pop_back();
  }
};

}  // namespace

void CandidateSet::collect(const Term& source, const Ruleset& rules) {
  source_ = source;
  rewrites_.clear();
  by_hash_.clear();
  Collector collector{rules, {}, {}, [this](Rewrite&& rw) {
                        if (is_duplicate(rw)) return;
                        by_hash_.emplace(rw.result_hash, static_cast<std::uint32_t>(rewrites_.size()));
                        rewrites_.push_back(std::move(rw));
                      }};
  collector.visit(source_);
}

bool CandidateSet::is_duplicate(const Rewrite& candidate) {
  auto [first, last] = by_hash_.equal_range(candidate.result_hash);
  if (first == last) return false;
  Term materialized;
  for (auto it = first; it != last; ++it) {
    const Rewrite& other = rewrites_[it->second];
    if (other.position == candidate.position) {
      if (other.replacement == candidate.replacement) return true;
      continue;
    }
    if (materialized.is_null()) materialized = replace_at(source_, candidate.position, candidate.replacement);
    if (materialize(it->second) == materialized) return true;
  }
  return false;
}

Term CandidateSet::materialize(std::size_t i) const {
  const Rewrite& rw = rewrites_[i];
  return replace_at(source_, rw.position, rw.replacement);
}

std::vector<Proposal> proposals(const Term& t, const Ruleset& rules) {
  CandidateSet set;
  set.collect(t, rules);
  std::vector<Proposal> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.push_back(Proposal{set.materialize(i), rules[set[i].rule].name(), set[i].position});
  }
  return out;
}

}  // namespace rewrite_arena
