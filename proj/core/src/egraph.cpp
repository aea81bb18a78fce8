#include "rewrite_arena/egraph.hpp"

#include <algorithm>
#include <map>

#include "rewrite_arena/error.hpp"
#include "rewrite_arena/fold.hpp"

std::size_t std::hash<rewrite_arena::ENode>::operator()(const rewrite_arena::ENode& n) const noexcept {
  std::size_t h = std::hash<std::uint32_t>{}(n.op.id()) * 0x9E3779B97F4A7C15ULL;
  for (rewrite_arena::EClassId c : n.children) {
    h ^= c.value + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace rewrite_arena {

namespace {

bool node_less(const ENode& a, const ENode& b) {
  if (a.op != b.op) return a.op < b.op;
  return std::lexicographical_compare(a.children.begin(), a.children.end(), b.children.begin(), b.children.end());
}

bool parent_less(const std::pair<ENode, EClassId>& a, const std::pair<ENode, EClassId>& b) {
  if (!(a.first == b.first)) return node_less(a.first, b.first);
  return a.second < b.second;
}

}  // namespace

EClassId EGraph::find(EClassId id) const {
  std::uint32_t root = id.value;
  while (parent_[root] != root) root = parent_[root];
  std::uint32_t cur = id.value;
  while (parent_[cur] != root) {
    std::uint32_t next = parent_[cur];
    parent_[cur] = root;
    cur = next;
  }
  return EClassId{root};
}

ENode EGraph::canonicalize(ENode node) const {
  for (EClassId& c : node.children) c = find(c);
  return node;
}

std::optional<Constant> EGraph::make_constant(const ENode& node) const {
  if (node.children.empty()) return node.op.constant();
  std::vector<Constant> args;
  args.reserve(node.children.size());
  for (EClassId c : node.children) {
    const auto& value = classes_.at(find(c)).constant;
    if (!value) return std::nullopt;
    args.push_back(*value);
  }
  return fold_op(node.op, args);
}

std::optional<Dims> EGraph::make_dims(const ENode& node) const {
  if (!dim_env_) return std::nullopt;
  if (node.children.empty()) {
    const Dims* d = dim_env_->lookup(node.op);
    return d ? std::optional<Dims>(*d) : std::nullopt;
  }
  if (node.children.size() != 2 || node.op.name() != "*") return std::nullopt;
  const auto& l = classes_.at(find(node.children[0])).dims;
  const auto& r = classes_.at(find(node.children[1])).dims;
  if (!l || !r || l->cols != r->rows) return std::nullopt;
  return Dims{l->rows, r->cols};
}

EClassId EGraph::add(ENode node) {
  node = canonicalize(std::move(node));
  if (auto it = memo_.find(node); it != memo_.end()) return find(it->second);

  EClassId id{static_cast<std::uint32_t>(parent_.size())};
  parent_.push_back(id.value);
  EClass cls;
  cls.id = id;
  cls.constant = make_constant(node);
  cls.dims = make_dims(node);
  cls.nodes.push_back(node);
  for (EClassId child : node.children) classes_.at(find(child)).parents.emplace_back(node, id);
  bool fold_in = cls.constant && !node.children.empty();
  classes_.emplace(id, std::move(cls));
  memo_.emplace(std::move(node), id);
  by_op_.clear();
  if (fold_in) add_constant_literal(id);
  return find(id);
}

EClassId EGraph::add_term(const Term& t) {
  ENode node{t.op(), {}};
  node.children.reserve(t.arity());
  for (const Term& c : t.children()) node.children.push_back(add_term(c));
  return add(std::move(node));
}

std::optional<EClassId> EGraph::lookup(ENode node) const {
  node = canonicalize(std::move(node));
  auto it = memo_.find(node);
  if (it == memo_.end()) return std::nullopt;
  return find(it->second);
}

std::optional<EClassId> EGraph::lookup_term(const Term& t) const {
  ENode node{t.op(), {}};
  for (const Term& c : t.children()) {
    auto id = lookup_term(c);
    if (!id) return std::nullopt;
    node.children.push_back(*id);
  }
  return lookup(std::move(node));
}

void EGraph::add_constant_literal(EClassId id) {
  const auto& value = classes_.at(find(id)).constant;
  if (!value) return;
  EClassId literal = add(ENode{Symbol::of(*value), {}});
  merge(id, literal);
}

void EGraph::join_analysis(EClass& into, const std::optional<Constant>& c, const std::optional<Dims>& d) {
  bool changed = false;
  if (c) {
    if (!into.constant) {
      into.constant = c;
      changed = true;
    } else if (*into.constant != *c) {
      contradiction_ = true;
    }
  }
  if (d) {
    if (!into.dims) {
      into.dims = d;
      changed = true;
    } else if (!(*into.dims == *d)) {
      throw CostError("e-graph merged matrices of different dimensions");
    }
  }
  if (changed) analysis_pending_.insert(analysis_pending_.end(), into.parents.begin(), into.parents.end());
}

EClassId EGraph::merge(EClassId a, EClassId b) {
  a = find(a);
  b = find(b);
  if (a == b) return a;
  ++unions_;

  // Keep the class with more parents as the root; ties go to the older id.
  std::size_t pa = classes_.at(a).parents.size();
  std::size_t pb = classes_.at(b).parents.size();
  if (pb > pa || (pb == pa && b < a)) std::swap(a, b);

  parent_[b.value] = a.value;
  EClass absorbed = std::move(classes_.at(b));
  classes_.erase(b);
  EClass& root = classes_.at(a);

  pending_.insert(pending_.end(), absorbed.parents.begin(), absorbed.parents.end());
  bool root_had_constant = root.constant.has_value();
  bool root_had_dims = root.dims.has_value();
  root.nodes.insert(root.nodes.end(), std::make_move_iterator(absorbed.nodes.begin()),
                    std::make_move_iterator(absorbed.nodes.end()));
  // Parents of the absorbed class see new analysis data when the root had it.
  if ((root_had_constant && !absorbed.constant) || (root_had_dims && !absorbed.dims)) {
    analysis_pending_.insert(analysis_pending_.end(), absorbed.parents.begin(), absorbed.parents.end());
  }
  root.parents.insert(root.parents.end(), std::make_move_iterator(absorbed.parents.begin()),
                      std::make_move_iterator(absorbed.parents.end()));
  join_analysis(root, absorbed.constant, absorbed.dims);
  by_op_.clear();
  return a;
}

void EGraph::process_unions() {
  while (!pending_.empty() || !analysis_pending_.empty()) {
    while (!pending_.empty()) {
      auto [node, cls] = std::move(pending_.back());
      pending_.pop_back();
      node = canonicalize(std::move(node));
      auto [it, inserted] = memo_.try_emplace(node, cls);
      if (!inserted) {
        EClassId existing = it->second;
        it->second = cls;
        merge(existing, cls);
      }
    }
    while (!analysis_pending_.empty()) {
      auto [node, cls] = std::move(analysis_pending_.back());
      analysis_pending_.pop_back();
      EClassId id = find(cls);
      auto constant = make_constant(node);
      auto dims = make_dims(node);
      EClass& target = classes_.at(id);
      bool gains_constant = constant && !target.constant;
      join_analysis(target, constant, dims);
      if (gains_constant) add_constant_literal(id);
    }
  }
}

void EGraph::rebuild_classes() {
  memo_.clear();
  by_op_.clear();
  for (auto& [id, cls] : classes_) {
    for (ENode& n : cls.nodes) n = canonicalize(std::move(n));
    std::sort(cls.nodes.begin(), cls.nodes.end(), node_less);
    cls.nodes.erase(std::unique(cls.nodes.begin(), cls.nodes.end()), cls.nodes.end());
    for (auto& [n, p] : cls.parents) {
      n = canonicalize(std::move(n));
      p = find(p);
    }
    std::sort(cls.parents.begin(), cls.parents.end(), parent_less);
    cls.parents.erase(std::unique(cls.parents.begin(), cls.parents.end()), cls.parents.end());
    for (const ENode& n : cls.nodes) memo_.emplace(n, id);
  }
}

void EGraph::rebuild() {
  process_unions();
  rebuild_classes();
}

const EClass& EGraph::eclass(EClassId id) const { return classes_.at(find(id)); }

std::vector<EClassId> EGraph::class_ids() const {
  std::vector<EClassId> ids;
  ids.reserve(classes_.size());
  for (const auto& [id, cls] : classes_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

const std::vector<EClassId>& EGraph::classes_with_op(Symbol op) const {
  static const std::vector<EClassId> none;
  if (by_op_.empty() && !classes_.empty()) {
    for (EClassId id : class_ids()) {
      for (const ENode& n : classes_.at(id).nodes) {
        auto& list = by_op_[n.op.id()];
        if (list.empty() || list.back() != id) list.push_back(id);
      }
    }
  }
  auto it = by_op_.find(op.id());
  return it == by_op_.end() ? none : it->second;
}

bool EGraph::check_invariants() const {
  std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, EClassId> seen;
  for (const auto& [id, cls] : classes_) {
    if (find(id) != id) return false;
    for (const ENode& n : cls.nodes) {
      ENode canon = canonicalize(n);
      if (!(canon == n)) return false;
      std::vector<std::uint32_t> kids;
      for (EClassId c : n.children) kids.push_back(c.value);
      auto [it, inserted] = seen.emplace(std::make_pair(n.op.id(), kids), id);
      if (!inserted && it->second != id) return false;
      auto m = memo_.find(n);
      if (m == memo_.end() || find(m->second) != id) return false;
    }
  }
  for (const auto& [node, id] : memo_) {
    if (!(canonicalize(node) == node)) return false;
  }
  return memo_.size() == seen.size();
}

}  // namespace rewrite_arena
