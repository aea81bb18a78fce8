#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rewrite_arena/symbol.hpp"

namespace rewrite_arena {

/// Immutable, structurally shared term tree. Copying a Term copies a pointer;
/// rewriting produces a new spine and shares every untouched subtree.
///
/// Each node caches its structural hash and node count, so equality checks
/// reject mismatches in O(1) and node_count is free.
class Term {
 public:
  /// Null term. Only useful as a placeholder in containers.
  Term() = default;

  static Term leaf(Symbol s);
  static Term make(Symbol op, std::vector<Term> children);

  Symbol op() const { return node_->op; }
  std::span<const Term> children() const { return node_->children; }
  const Term& child(std::size_t i) const { return node_->children[i]; }
  std::size_t arity() const { return node_->children.size(); }
  bool is_leaf() const { return node_->children.empty(); }
  bool is_null() const noexcept { return node_ == nullptr; }

  std::size_t hash() const { return node_->hash; }
  std::uint32_t size() const { return node_->size; }
  /// Address of the shared node; stable for the lifetime of any copy.
  const void* identity() const noexcept { return node_.get(); }

  /// Hash a node with the given operator and child hashes would have.
  static std::size_t combine_hash(Symbol op, std::span<const std::size_t> child_hashes);
  /// Hash of `node` with child `index` replaced by a term of hash `child_hash`.
  static std::size_t hash_with_child(const Term& node, std::size_t index, std::size_t child_hash);

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node {
    Symbol op;
    std::vector<Term> children;
    std::size_t hash;
    std::uint32_t size;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Path of child indices from the root; empty is the root itself.
struct Position {
  std::vector<std::uint32_t> path;

  Position() = default;
  Position(std::initializer_list<std::uint32_t> indices) : path(indices) {}
  explicit Position(std::vector<std::uint32_t> indices) : path(std::move(indices)) {}

  bool is_root() const noexcept { return path.empty(); }
  std::size_t depth() const noexcept { return path.size(); }
  std::string to_string() const;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

bool is_valid_position(const Term& t, const Position& p);
Term subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& replacement);
std::size_t node_count(const Term& t);

/// Pre-order visit of every position in `t`.
void for_each_position(const Term& t, const std::function<void(const Position&, const Term&)>& visit);

}  // namespace rewrite_arena

template <>
struct std::hash<rewrite_arena::Term> {
  std::size_t operator()(const rewrite_arena::Term& t) const noexcept { return t.hash(); }
};
