#pragma once

#include <cstddef>
#include <vector>

#include "tcmc/mucalc.hpp"

namespace tcmc::formula_enum {

// Quantifier-free, fixpoint-free formulas with sugar, enumerated by AST size
// over per-state literals; deterministic order, truncated at count_cap.
inline std::vector<FormulaPtr> fixpoint_free(const TransitionSystem& ts,
                                                   int max_size, std::size_t count_cap) {
  std::vector<std::vector<FormulaPtr>> by_size(max_size + 1);
  for (std::size_t s = 0; s < ts.state_count(); ++s)
    by_size[1].push_back(make_state_prop(StateSet{1} << s));
  auto total = [&] {
    std::size_t n = 0;
    for (auto& v : by_size) n += v.size();
    return n;
  };
  for (int size = 2; size <= max_size && total() < count_cap; ++size) {
    for (const auto& k : by_size[size - 1]) {
      for (NodeKind op : {NodeKind::Not, NodeKind::Next, NodeKind::Prev, NodeKind::Reverse,
                          NodeKind::Finally, NodeKind::Globally, NodeKind::FinallyPast,
                          NodeKind::GloballyPast}) {
        by_size[size].push_back(make_node(op, {k}));
        if (total() >= count_cap) break;
      }
      if (total() >= count_cap) break;
    }
    for (int ls = 1; ls < size - 1 && total() < count_cap; ++ls) {
      for (const auto& a : by_size[ls]) {
        for (const auto& b : by_size[size - 1 - ls]) {
          for (NodeKind op : {NodeKind::Or, NodeKind::And, NodeKind::Until, NodeKind::WeakUntil}) {
            by_size[size].push_back(make_node(op, {a, b}));
            if (total() >= count_cap) break;
          }
          if (total() >= count_cap) break;
        }
        if (total() >= count_cap) break;
      }
    }
  }
  std::vector<FormulaPtr> out;
  for (auto& v : by_size)
    for (auto& f : v) out.push_back(f);
  return out;
}

// LTL_det formulas by grammar-production depth: literals at depth 0, one
// production application per level, arguments drawn from the previous level
// (rotating through it to keep the family representative when truncating).
inline std::vector<FormulaPtr> ltl_det(const TransitionSystem& ts, int max_depth,
                                             std::size_t count_cap) {
  std::vector<FormulaPtr> lits, guards;
  for (std::size_t s = 0; s < ts.state_count(); ++s) {
    auto p = make_state_prop(StateSet{1} << s);
    lits.push_back(p);
    lits.push_back(make_node(NodeKind::Not, {p}));
    guards.push_back(p);
  }
  std::vector<FormulaPtr> level = lits, all = lits;
  for (int d = 1; d <= max_depth && all.size() < count_cap; ++d) {
    std::vector<FormulaPtr> next;
    auto pick = [&](std::size_t i) { return level[i % level.size()]; };
    for (std::size_t i = 0; i < level.size() && all.size() + next.size() < count_cap; ++i) {
      next.push_back(make_node(NodeKind::Next, {level[i]}));
      next.push_back(make_node(NodeKind::And, {level[i], pick(i + 1)}));
      for (const auto& g : guards) {
        auto l = make_node(NodeKind::And, {g, level[i]});
        auto r = make_node(NodeKind::And, {make_node(NodeKind::Not, {g}), pick(i + 1)});
        next.push_back(make_node(NodeKind::Or, {l, r}));
        next.push_back(make_node(NodeKind::Until, {l, r}));
        next.push_back(make_node(NodeKind::WeakUntil, {l, r}));
        if (all.size() + next.size() >= count_cap) break;
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  if (all.size() > count_cap) all.resize(count_cap);
  return all;
}

}  // namespace tcmc::formula_enum
