#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rewrite_arena/symbol.hpp"
#include "rewrite_arena/term.hpp"

namespace rewrite_arena {

struct Dims {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Matrix leaf symbol -> (rows, cols).
class DimEnv {
 public:
  DimEnv() = default;
  DimEnv(std::initializer_list<std::pair<std::string_view, Dims>> bindings);

  void bind(Symbol leaf, Dims dims);
  const Dims* lookup(Symbol leaf) const;
  std::size_t size() const noexcept { return dims_.size(); }
  auto begin() const { return dims_.begin(); }
  auto end() const { return dims_.end(); }

 private:
  std::unordered_map<Symbol, Dims> dims_;
};

/// Bottom-up summary of a subtree under one cost model. `cost` is the
/// subtree cost; `dims` is used by the matmul model and `tag` by the goal
/// model.
struct NodeValue {
  double cost = 0.0;
  Dims dims;
  std::int32_t tag = -1;
};

/// A tree cost computed bottom-up from per-operator rules. The same
/// evaluate() drives term costing and e-graph extraction.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual NodeValue evaluate(Symbol op, std::span<const NodeValue> children) const = 0;
  /// Cost of a whole term given its root value.
  virtual double total(const NodeValue& root) const { return root.cost; }

  /// True when the cost of a term changes by exactly value(new) - value(old)
  /// if one subtree is swapped for another with the same interface.
  virtual bool context_free() const { return true; }
  virtual bool same_interface(const NodeValue&, const NodeValue&) const { return true; }

  virtual std::string describe() const = 0;
};

using CostModelPtr = std::shared_ptr<const CostModel>;

/// Every node costs 1.
class AstSize final : public CostModel {
 public:
  NodeValue evaluate(Symbol op, std::span<const NodeValue> children) const override;
  std::string describe() const override { return "ast-size"; }
};

/// Node cost is weight(op) + sum of children; unlisted operators weigh 1.
class WeightedAstSize final : public CostModel {
 public:
  explicit WeightedAstSize(std::unordered_map<Symbol, double> weights);
  NodeValue evaluate(Symbol op, std::span<const NodeValue> children) const override;
  std::string describe() const override;
  const std::unordered_map<Symbol, double>& weights() const noexcept { return weights_; }

 private:
  std::unordered_map<Symbol, double> weights_;
};

/// Integral (`int`) and derivative (`d`) nodes cost the square of the sum of
/// their children's costs; every other node costs 1 + sum of children.
class IntegSquare final : public CostModel {
 public:
  NodeValue evaluate(Symbol op, std::span<const NodeValue> children) const override;
  bool context_free() const override { return false; }
  std::string describe() const override { return "integ-square"; }
};

/// Scalar multiplications of a product tree: (m x n) * (n x k) costs m*n*k
/// plus the cost of both operands; leaves cost 0.
class MatMulScalarOps final : public CostModel {
 public:
  explicit MatMulScalarOps(DimEnv env);
  NodeValue evaluate(Symbol op, std::span<const NodeValue> children) const override;
  bool same_interface(const NodeValue& a, const NodeValue& b) const override { return a.dims == b.dims; }
  std::string describe() const override { return "matmul"; }
  const DimEnv& env() const noexcept { return env_; }

 private:
  DimEnv env_;
  Symbol product_ = Symbol::intern("*");
};

/// Cost 0 for exactly the goal term and 1 for anything else. Subtrees that
/// equal some subterm of the goal are tagged so extraction can find it.
class GoalIndicator final : public CostModel {
 public:
  explicit GoalIndicator(Term goal);
  NodeValue evaluate(Symbol op, std::span<const NodeValue> children) const override;
  double total(const NodeValue& root) const override;
  bool context_free() const override { return false; }
  std::string describe() const override;
  const Term& goal() const noexcept { return goal_; }

 private:
  struct Shape {
    Symbol op;
    std::vector<std::int32_t> children;
  };
  Term goal_;
  std::vector<Shape> shapes_;  // distinct goal subterms, children before parents
  std::int32_t root_tag_ = -1;
};

NodeValue evaluate(const CostModel& model, const Term& t);
double cost(const CostModel& model, const Term& t);

/// Throws CostError naming the offending position on unbound leaves or
/// incompatible operands.
Dims dims_of(const DimEnv& env, const Term& t);

/// IntegSquare cost of `t`.
double integ_cost(const Term& t);

/// Memoizes NodeValues by shared node identity. Holds a reference to every
/// cached node so addresses cannot be recycled while cached. Not
/// thread-safe; each stochastic chain owns one.
class CostCache {
 public:
  explicit CostCache(const CostModel& model, std::size_t capacity = 1u << 18)
      : model_(&model), capacity_(capacity) {}

  NodeValue value(const Term& t);
  double cost(const Term& t) { return model_->total(value(t)); }
  const CostModel& model() const noexcept { return *model_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  struct Entry {
    Term term;
    NodeValue value;
  };
  const CostModel* model_;
  std::size_t capacity_;
  std::unordered_map<const void*, Entry> values_;
};

}  // namespace rewrite_arena
