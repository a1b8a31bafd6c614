#include "slpspan/enumerate.hpp"

#include <algorithm>

namespace slpspan {

namespace {

MTree make_leaf(const RelationTables& tables, SymbolId a, StateId i, StateId j) {
  auto node = std::make_shared<MTreeNode>();
  node->kind = tables.reach(a, i, j) == Reach::Empty ? MTreeNode::Kind::EmptyLeaf : MTreeNode::Kind::TerminalLeaf;
  node->symbol = a;
  node->from = i;
  node->to = j;
  return node;
}

void shape_of(const MTreeNode& n, std::size_t depth, TreeShape& s) {
  ++s.nodes;
  s.height = std::max(s.height, depth);
  switch (n.kind) {
    case MTreeNode::Kind::EmptyLeaf: ++s.empty_leaves; break;
    case MTreeNode::Kind::TerminalLeaf: ++s.terminal_leaves; break;
    case MTreeNode::Kind::Inner:
      shape_of(*n.left, depth + 1, s);
      shape_of(*n.right, depth + 1, s);
      break;
  }
}

}  // namespace

TreeShape tree_shape(const MTree& tree) {
  TreeShape s;
  if (tree) shape_of(*tree, 1, s);
  return s;
}

SortedRelation tree_yield(const MTree& tree, const RelationTables& tables) {
  switch (tree->kind) {
    case MTreeNode::Kind::EmptyLeaf: return {PartialMarkerSet{}};
    case MTreeNode::Kind::TerminalLeaf: return tables.leaf_sets(tree->symbol, tree->from, tree->to);
    case MTreeNode::Kind::Inner: break;
  }
  SortedRelation out = merge_product(tree_yield(tree->left, tables), tree_yield(tree->right, tables), tree->shift);
  std::sort(out.begin(), out.end(), MarkerSetLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

TreeEnumerator::TreeEnumerator(const RelationTables& tables, SymbolId a, StateId i, StateId k, StateId j,
                               StepCounter* counter)
    : tables_(tables), counter_(counter), symbol_(a), i_(i), k_(k), j_(j) {
  if (counter_) counter_->tick();
  if (k_ == kBaseCase) {
    if (!tables_.is_base(a, i, j) || tables_.reach(a, i, j) == Reach::Bottom) {
      throw InvalidArgument("TreeEnumerator: base case requested for a non-base entry");
    }
    return;
  }
  if (tables_.slp().is_leaf(a) || tables_.reach(a, i, j) != Reach::Nonempty || !tables_.inter(a, i, j).test(k)) {
    throw InvalidArgument("TreeEnumerator: invalid intermediate state");
  }
  const Rule& r = tables_.slp().rule(a);
  left_choices_ = choices(r.left, i, k);
  right_choices_ = choices(r.right, k, j);
}

std::vector<StateId> TreeEnumerator::choices(SymbolId a, StateId i, StateId j) const {
  if (tables_.is_base(a, i, j)) return {kBaseCase};
  std::vector<StateId> out;
  tables_.inter(a, i, j).for_each([&](std::size_t k) { out.push_back(static_cast<StateId>(k)); });
  return out;
}

MTree TreeEnumerator::next() {
  if (done_) return nullptr;
  if (k_ == kBaseCase) {
    done_ = true;
    if (counter_) counter_->tick();
    return make_leaf(tables_, symbol_, i_, j_);
  }
  const Rule& r = tables_.slp().rule(symbol_);
  const std::size_t pairs = left_choices_.size() * right_choices_.size();
  for (;;) {
    if (counter_) counter_->tick();
    if (right_) {
      if (MTree t = right_->next()) {
        auto node = std::make_shared<MTreeNode>();
        node->kind = MTreeNode::Kind::Inner;
        node->symbol = symbol_;
        node->from = i_;
        node->middle = k_;
        node->to = j_;
        node->shift = tables_.slp().length(r.left);
        node->left = left_tree_;
        node->right = std::move(t);
        return node;
      }
      right_.reset();
    }
    if (left_) {
      left_tree_ = left_->next();
      if (left_tree_) {
        const StateId kc = right_choices_[pair_ % right_choices_.size()];
        right_ = std::make_unique<TreeEnumerator>(tables_, r.right, k_, kc, j_, counter_);
        continue;
      }
      left_.reset();
      ++pair_;
    }
    if (pair_ >= pairs) {
      done_ = true;
      return nullptr;
    }
    const StateId kb = left_choices_[pair_ / right_choices_.size()];
    left_ = std::make_unique<TreeEnumerator>(tables_, r.left, i_, kb, k_, counter_);
  }
}

// ---------------------------------------------------------------------------

YieldEnumerator::YieldEnumerator(const MTree& tree, const RelationTables& tables, StepCounter* counter)
    : counter_(counter) {
  std::vector<std::pair<const MTreeNode*, Position>> stack{{tree.get(), 0}};
  while (!stack.empty()) {
    auto [node, shift] = stack.back();
    stack.pop_back();
    if (counter_) counter_->tick();
    switch (node->kind) {
      case MTreeNode::Kind::EmptyLeaf: break;
      case MTreeNode::Kind::TerminalLeaf:
        leaves_.push_back({&tables.leaf_sets(node->symbol, node->from, node->to), shift});
        if (leaves_.back().list->empty()) done_ = true;
        break;
      case MTreeNode::Kind::Inner:
        stack.emplace_back(node->right.get(), shift + node->shift);
        stack.emplace_back(node->left.get(), shift);
        break;
    }
  }
  odometer_.assign(leaves_.size(), 0);
}

std::optional<PartialMarkerSet> YieldEnumerator::next() {
  if (done_) return std::nullopt;
  std::vector<MarkerEntry> entries;
  for (std::size_t r = 0; r < leaves_.size(); ++r) {
    for (const auto& e : (*leaves_[r].list)[odometer_[r]].entries()) {
      entries.push_back({e.position + leaves_[r].shift, e.marker});
      if (counter_) counter_->tick();
    }
  }
  // Advance: the last leaf turns fastest.
  std::size_t r = leaves_.size();
  while (r > 0) {
    --r;
    if (counter_) counter_->tick();
    if (++odometer_[r] < leaves_[r].list->size()) break;
    odometer_[r] = 0;
    if (r == 0) done_ = true;
  }
  if (leaves_.empty()) done_ = true;
  return PartialMarkerSet::from_sorted(std::move(entries));
}

// ---------------------------------------------------------------------------

RelationTables prepare_enumeration_tables(const Slp& slp, const SpannerAutomaton& m, const EnumerateOptions& options) {
  if (options.determinize && !m.is_deterministic()) {
    return build_sentinel_tables(slp, determinize(m, options.determinize_cap));
  }
  return build_sentinel_tables(slp, m);
}

RelationEnumerator::RelationEnumerator(const Slp& slp, const SpannerAutomaton& m, EnumerateOptions options)
    : options_(std::move(options)),
      variables_(m.variables().size()),
      document_length_(slp.document_length()),
      tables_(prepare_enumeration_tables(slp, m, options_)) {
  const SymbolId s = tables_.slp().start();
  for (StateId j : tables_.accepting_reachable()) {
    if (tables_.is_base(s, 0, j)) {
      roots_.emplace_back(TreeEnumerator::kBaseCase, j);
    } else {
      tables_.inter(s, 0, j).for_each([&](std::size_t k) { roots_.emplace_back(static_cast<StateId>(k), j); });
    }
  }
}

void RelationEnumerator::record_output() {
  const std::uint64_t delay = counter_.steps - last_output_steps_;
  if (delay_.outputs == 0) {
    delay_.preprocessing_steps = delay;
  } else {
    delay_.max_delay = std::max(delay_.max_delay, delay);
    ++delay_.histogram[delay];
  }
  ++delay_.outputs;
  last_output_steps_ = counter_.steps;
}

std::optional<PartialMarkerSet> RelationEnumerator::next_marker_set() {
  if (finished_) return std::nullopt;
  for (;;) {
    counter_.tick();
    if (yield_) {
      if (auto s = yield_->next()) {
        record_output();
        return s;
      }
      yield_.reset();
    }
    if (trees_) {
      if (MTree t = trees_->next()) {
        ++delay_.trees;
        if (options_.tree_observer) options_.tree_observer(t);
        yield_ = std::make_unique<YieldEnumerator>(t, tables_, &counter_);
        continue;
      }
      trees_.reset();
      ++root_;
    }
    if (root_ >= roots_.size()) {
      finished_ = true;
      delay_.final_delay = counter_.steps - last_output_steps_;
      return std::nullopt;
    }
    trees_ = std::make_unique<TreeEnumerator>(tables_, tables_.slp().start(), 0, roots_[root_].first,
                                              roots_[root_].second, &counter_);
  }
}

std::optional<SpanTuple> RelationEnumerator::next() {
  auto s = next_marker_set();
  if (!s) return std::nullopt;
  return marker_set_to_tuple(*s, variables_, document_length_);
}

}  // namespace slpspan
