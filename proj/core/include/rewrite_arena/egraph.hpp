#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rewrite_arena/cost.hpp"
#include "rewrite_arena/rational.hpp"
#include "rewrite_arena/symbol.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

struct EClassId {
  std::uint32_t value = 0;
  friend bool operator==(EClassId, EClassId) = default;
  friend auto operator<=>(EClassId, EClassId) = default;
};

struct ENode {
  Symbol op;
  std::vector<EClassId> children;

  friend bool operator==(const ENode&, const ENode&) = default;
};

}  // namespace rewrite_arena

template <>
struct std::hash<rewrite_arena::EClassId> {
  std::size_t operator()(rewrite_arena::EClassId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

template <>
struct std::hash<rewrite_arena::ENode> {
  std::size_t operator()(const rewrite_arena::ENode& n) const noexcept;
};

namespace rewrite_arena {

struct EClass {
  EClassId id;
  std::vector<ENode> nodes;
  std::vector<std::pair<ENode, EClassId>> parents;
  std::optional<Constant> constant;
  std::optional<Dims> dims;
};

/// E-graph with egg-style deferred rebuilding: merge() only records the
/// union, rebuild() restores congruence and hashcons canonicity.
///
/// Per-class analysis: an exact constant (folded from children, with the
/// literal node added to the class) and, when constructed with a DimEnv,
/// matrix dimensions. Merging classes with different constants sets the
/// contradiction flag; merging different dimensions throws CostError.
///
/// Value type: copying produces an independent snapshot.
class EGraph {
 public:
  EGraph() = default;
  explicit EGraph(DimEnv dims) : dim_env_(std::move(dims)) {}

  EClassId add(ENode node);
  EClassId add_term(const Term& t);
  std::optional<EClassId> lookup(ENode node) const;
  std::optional<EClassId> lookup_term(const Term& t) const;

  EClassId find(EClassId id) const;
  /// Returns the surviving root. Congruence is repaired by rebuild().
  EClassId merge(EClassId a, EClassId b);
  void rebuild();
  bool clean() const noexcept { return pending_.empty() && analysis_pending_.empty(); }

  const EClass& eclass(EClassId id) const;
  /// Canonical class ids in increasing order.
  std::vector<EClassId> class_ids() const;
  /// Canonical classes containing at least one node with `op` (valid after
  /// rebuild).
  const std::vector<EClassId>& classes_with_op(Symbol op) const;

  std::size_t num_classes() const noexcept { return classes_.size(); }
  std::size_t num_nodes() const noexcept { return memo_.size(); }
  std::uint64_t unions() const noexcept { return unions_; }
  bool contradiction() const noexcept { return contradiction_; }

  /// Full scan used by tests: hashcons keys canonical and congruence closed.
  bool check_invariants() const;

 private:
  ENode canonicalize(ENode node) const;
  std::optional<Constant> make_constant(const ENode& node) const;
  std::optional<Dims> make_dims(const ENode& node) const;
  void join_analysis(EClass& into, const std::optional<Constant>& c, const std::optional<Dims>& d);
  void add_constant_literal(EClassId id);
  void process_unions();
  void rebuild_classes();

  mutable std::vector<std::uint32_t> parent_;
  std::unordered_map<EClassId, EClass> classes_;
  std::unordered_map<ENode, EClassId> memo_;
  std::vector<std::pair<ENode, EClassId>> pending_;
  std::vector<std::pair<ENode, EClassId>> analysis_pending_;
  mutable std::unordered_map<std::uint32_t, std::vector<EClassId>> by_op_;
  std::optional<DimEnv> dim_env_;
  std::uint64_t unions_ = 0;
  bool contradiction_ = false;
};

}  // namespace rewrite_arena
