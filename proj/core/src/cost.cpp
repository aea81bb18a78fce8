#include "rewrite_arena/cost.hpp"

#include <algorithm>
#include <sstream>

#include "rewrite_arena/error.hpp"

namespace rewrite_arena {

DimEnv::DimEnv(std::initializer_list<std::pair<std::string_view, Dims>> bindings) {
  for (const auto& [name, dims] : bindings) bind(Symbol::intern(name), dims);
}

void DimEnv::bind(Symbol leaf, Dims dims) {
  if (dims.rows <= 0 || dims.cols <= 0) {
    throw CostError("matrix '" + std::string(leaf.name()) + "' needs positive dimensions");
  }
  dims_[leaf] = dims;
}

const Dims* DimEnv::lookup(Symbol leaf) const {
  auto it = dims_.find(leaf);
  return it == dims_.end() ? nullptr : &it->second;
}

namespace {

double sum_costs(std::span<const NodeValue> children) {
  double total = 0.0;
  for (const NodeValue& c : children) total += c.cost;
  return total;
}

}  // namespace

NodeValue AstSize::evaluate(Symbol, std::span<const NodeValue> children) const {
  return NodeValue{1.0 + sum_costs(children), {}, -1};
}

WeightedAstSize::WeightedAstSize(std::unordered_map<Symbol, double> weights) : weights_(std::move(weights)) {
  for (const auto& [op, w] : weights_) {
    if (!(w >= 0.0)) throw CostError("weight of '" + std::string(op.name()) + "' must be non-negative");
  }
}

NodeValue WeightedAstSize::evaluate(Symbol op, std::span<const NodeValue> children) const {
  auto it = weights_.find(op);
  double w = it == weights_.end() ? 1.0 : it->second;
  return NodeValue{w + sum_costs(children), {}, -1};
}

std::string WeightedAstSize::describe() const {
  std::vector<std::pair<std::string, double>> sorted;
  for (const auto& [op, w] : weights_) sorted.emplace_back(std::string(op.name()), w);
  std::sort(sorted.begin(), sorted.end());
  std::ostringstream out;
  out << "weighted{";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i) out << ',';
    out << sorted[i].first << ':' << sorted[i].second;
  }
  out << '}';
  return out.str();
}

NodeValue IntegSquare::evaluate(Symbol op, std::span<const NodeValue> children) const {
  static const Symbol integral = Symbol::intern("int");
  static const Symbol derivative = Symbol::intern("d");
  double sum = sum_costs(children);
  if ((op == integral || op == derivative) && !children.empty()) return NodeValue{sum * sum, {}, -1};
  return NodeValue{1.0 + sum, {}, -1};
}

MatMulScalarOps::MatMulScalarOps(DimEnv env) : env_(std::move(env)) {}

NodeValue MatMulScalarOps::evaluate(Symbol op, std::span<const NodeValue> children) const {
  if (children.empty()) {
    const Dims* d = env_.lookup(op);
    if (d == nullptr) throw CostError("unbound matrix '" + std::string(op.name()) + "'");
    return NodeValue{0.0, *d, -1};
  }
  if (op != product_ || children.size() != 2) {
    throw CostError("matmul cost expects binary '*', got '" + std::string(op.name()) + "'");
  }
  const Dims& l = children[0].dims;
  const Dims& r = children[1].dims;
  if (l.cols != r.rows) {
    throw CostError("dimension mismatch: " + std::to_string(l.rows) + "x" + std::to_string(l.cols) + " * " +
                    std::to_string(r.rows) + "x" + std::to_string(r.cols));
  }
  double mults = static_cast<double>(l.rows) * static_cast<double>(l.cols) * static_cast<double>(r.cols);
  return NodeValue{children[0].cost + children[1].cost + mults, Dims{l.rows, r.cols}, -1};
}

GoalIndicator::GoalIndicator(Term goal) : goal_(std::move(goal)) {
  // Post-order walk assigning each distinct goal subterm a tag.
  auto walk = [this](auto&& self, const Term& t) -> std::int32_t {
    Shape shape{t.op(), {}};
    for (const Term& c : t.children()) shape.children.push_back(self(self, c));
    for (std::size_t i = 0; i < shapes_.size(); ++i) {
      if (shapes_[i].op == shape.op && shapes_[i].children == shape.children) return static_cast<std::int32_t>(i);
    }
    shapes_.push_back(std::move(shape));
    return static_cast<std::int32_t>(shapes_.size() - 1);
  };
  root_tag_ = walk(walk, goal_);
}

NodeValue GoalIndicator::evaluate(Symbol op, std::span<const NodeValue> children) const {
  NodeValue v{1.0, {}, -1};
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    const Shape& s = shapes_[i];
    if (s.op != op || s.children.size() != children.size()) continue;
    bool same = true;
    for (std::size_t k = 0; k < children.size() && same; ++k) same = children[k].tag == s.children[k];
    if (same) {
      v.tag = static_cast<std::int32_t>(i);
      break;
    }
  }
  if (v.tag == root_tag_) v.cost = 0.0;
  return v;
}

double GoalIndicator::total(const NodeValue& root) const { return root.tag == root_tag_ ? 0.0 : 1.0; }

std::string GoalIndicator::describe() const { return "goal-indicator"; }

namespace {

NodeValue evaluate_rec(const CostModel& model, const Term& t) {
  if (t.is_leaf()) return model.evaluate(t.op(), {});
  std::vector<NodeValue> kids;
  kids.reserve(t.arity());
  for (const Term& c : t.children()) kids.push_back(evaluate_rec(model, c));
  return model.evaluate(t.op(), kids);
}

}  // namespace

NodeValue evaluate(const CostModel& model, const Term& t) { return evaluate_rec(model, t); }

double cost(const CostModel& model, const Term& t) { return model.total(evaluate(model, t)); }

Dims dims_of(const DimEnv& env, const Term& t) {
  static const Symbol product = Symbol::intern("*");
  auto rec = [&](auto&& self, const Term& node, Position& at) -> Dims {
    if (node.is_leaf()) {
      const Dims* d = env.lookup(node.op());
      if (d == nullptr) throw CostError("unbound matrix '" + std::string(node.op().name()) + "' at " + at.to_string());
      return *d;
    }
    if (node.op() != product || node.arity() != 2) {
      throw CostError("not a matrix product at " + at.to_string());
    }
    at.path.push_back(0);
    Dims l = self(self, node.child(0), at);
    at.path.back() = 1;
    Dims r = self(self, node.child(1), at);
    at.path.pop_back();
    if (l.cols != r.rows) {
      throw CostError("dimension mismatch at " + at.to_string() + ": " + std::to_string(l.rows) + "x" +
                      std::to_string(l.cols) + " * " + std::to_string(r.rows) + "x" + std::to_string(r.cols));
    }
    return Dims{l.rows, r.cols};
  };
  Position at;
  return rec(rec, t, at);
}

double integ_cost(const Term& t) {
  static const IntegSquare model;
  return cost(model, t);
}

NodeValue CostCache::value(const Term& t) {
  if (auto it = values_.find(t.identity()); it != values_.end()) return it->second.value;
  NodeValue v;
  if (t.is_leaf()) {
    v = model_->evaluate(t.op(), {});
  } else {
    std::vector<NodeValue> kids;
    kids.reserve(t.arity());
    for (const Term& c : t.children()) kids.push_back(value(c));
    v = model_->evaluate(t.op(), kids);
  }
  if (values_.size() >= capacity_) values_.clear();
  values_.emplace(t.identity(), Entry{t, v});
  return v;
}

}  // namespace rewrite_arena
