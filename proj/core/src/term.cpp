#include "rewrite_arena/term.hpp"

#include <algorithm>

#include "rewrite_arena/error.hpp"

namespace rewrite_arena {

namespace {

constexpr std::size_t mix(std::size_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

std::size_t seed_hash(Symbol op, std::size_t arity) {
  return mix((static_cast<std::size_t>(op.id()) << 8) ^ arity ^ 0x9e3779b97f4a7c15ULL);
}

std::size_t fold_child(std::size_t h, std::size_t child) { return mix(h ^ (child + 0x9e3779b97f4a7c15ULL + (h << 6))); }

}  // namespace

Term Term::leaf(Symbol s) { return make(s, {}); }

Term Term::make(Symbol op, std::vector<Term> children) {
  std::size_t h = seed_hash(op, children.size());
  std::uint64_t size = 1;
  for (const Term& c : children) {
    if (c.is_null()) throw Error("null child term");
    h = fold_child(h, c.hash());
    size += c.size();
  }
  auto node = std::make_shared<const Node>(
      Node{op, std::move(children), h, static_cast<std::uint32_t>(std::min<std::uint64_t>(size, UINT32_MAX))});
  return Term(std::move(node));
}

std::size_t Term::combine_hash(Symbol op, std::span<const std::size_t> child_hashes) {
  std::size_t h = seed_hash(op, child_hashes.size());
  for (std::size_t c : child_hashes) h = fold_child(h, c);
  return h;
}

std::size_t Term::hash_with_child(const Term& node, std::size_t index, std::size_t child_hash) {
  std::size_t h = seed_hash(node.op(), node.arity());
  for (std::size_t i = 0; i < node.arity(); ++i) h = fold_child(h, i == index ? child_hash : node.child(i).hash());
  return h;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash() || a.size() != b.size() || a.op() != b.op() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!(a.child(i) == b.child(i))) return false;
  }
  return true;
}

std::string Position::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(path[i]);
  }
  return out + "]";
}

bool is_valid_position(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::uint32_t i : p.path) {
    if (i >= cur->arity()) return false;
    cur = &cur->child(i);
  }
  return true;
}

Term subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::uint32_t i : p.path) {
    if (i >= cur->arity()) throw InvalidPosition("invalid position " + p.to_string());
    cur = &cur->child(i);
  }
  return *cur;
}

namespace {

Term replace_from(const Term& t, const Position& p, std::size_t depth, const Term& replacement) {
  if (depth == p.path.size()) return replacement;
  std::uint32_t index = p.path[depth];
  if (index >= t.arity()) throw InvalidPosition("invalid position " + p.to_string());
  std::vector<Term> children(t.children().begin(), t.children().end());
  children[index] = replace_from(t.child(index), p, depth + 1, replacement);
  return Term::make(t.op(), std::move(children));
}

void visit_positions(const Term& t, Position& p, const std::function<void(const Position&, const Term&)>& visit) {
  visit(p, t);
  for (std::uint32_t i = 0; i < t.arity(); ++i) {
    p.path.push_back(i);
    visit_positions(t.child(i), p, visit);
    p.path.pop_back();
  }
}

}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& replacement) {
  return replace_from(t, p, 0, replacement);
}

std::size_t node_count(const Term& t) { return t.size(); }

void for_each_position(const Term& t, const std::function<void(const Position&, const Term&)>& visit) {
  Position p;
  visit_positions(t, p, visit);
}

}  // namespace rewrite_arena
