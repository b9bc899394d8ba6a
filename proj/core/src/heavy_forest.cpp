#include "slpmatch/heavy_forest.hpp"

#include <algorithm>

namespace slpmatch {

SlpHeavyForest build_heavy_forest(const Slp& slp) {
  const std::size_t n = slp.rule_count();
  SlpHeavyForest out;
  out.heavy_child_.assign(n, kNoNode);
  out.tree_id_.assign(n, kNoNode);
  out.local_id_.assign(n, kNoNode);
  out.depth_.assign(n, 0);
  out.delta_.assign(n, 0);

  for (NodeId v = 0; v < n; ++v) {
    if (slp.is_terminal(v)) continue;
    out.heavy_child_[v] =
        slp.length(slp.left(v)) >= slp.length(slp.right(v)) ? slp.left(v) : slp.right(v);
  }

  // Forest children of u are the reachable nonterminals whose heavy child
  // is u, ordered by rule id.
  std::vector<std::uint32_t> child_count(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (!slp.reachable(v) || slp.is_terminal(v)) continue;
    ++child_count[out.heavy_child_[v]];
  }
  std::vector<std::uint32_t> child_begin(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) child_begin[v + 1] = child_begin[v] + child_count[v];
  std::vector<NodeId> child_flat(child_begin[n]);
  {
    std::vector<std::uint32_t> fill(child_begin.begin(), child_begin.end() - 1);
    for (NodeId v = 0; v < n; ++v) {
      if (!slp.reachable(v) || slp.is_terminal(v)) continue;
      child_flat[fill[out.heavy_child_[v]]++] = v;
    }
  }

  // One tree per reachable terminal; BFS from the terminal root assigns
  // local ids (root = 0) and computes depths and terminal offsets.
  for (NodeId r = 0; r < n; ++r) {
    if (!slp.reachable(r) || !slp.is_terminal(r)) continue;
    const auto id = static_cast<std::uint32_t>(out.trees_.size());
    SlpHeavyForest::ForestTree ft;
    ft.root_slp = r;
    std::vector<NodeId> queue{r};
    out.tree_id_[r] = id;
    out.local_id_[r] = 0;
    out.depth_[r] = 0;
    out.delta_[r] = 0;
    ft.to_slp.push_back(r);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const NodeId u = queue[qi];
      for (std::uint32_t k = child_begin[u]; k < child_begin[u + 1]; ++k) {
        const NodeId v = child_flat[k];
        out.tree_id_[v] = id;
        out.local_id_[v] = static_cast<NodeId>(ft.to_slp.size());
        out.depth_[v] = out.depth_[u] + 1;
        out.delta_[v] =
            out.delta_[u] + (out.heavy_child_[v] == slp.right(v) ? slp.length(slp.left(v)) : 0);
        ft.to_slp.push_back(v);
        queue.push_back(v);
      }
    }
    std::vector<Tree::Node> parents(ft.to_slp.size());
    for (NodeId j = 0; j < ft.to_slp.size(); ++j) {
      const NodeId v = ft.to_slp[j];
      parents[j] = v == r ? kNoNode : out.local_id_[out.heavy_child_[v]];
    }
    ft.tree = std::make_shared<const Tree>(Tree(std::move(parents)));
    out.trees_.push_back(std::move(ft));
  }

  // Most light edges on any root-to-terminal path, over reachable nodes.
  std::vector<std::uint32_t> light(n, 0);
  for (const NodeId v : slp.topological_order()) {
    if (!slp.reachable(v) || slp.is_terminal(v)) continue;
    const NodeId l = slp.left(v);
    const NodeId r = slp.right(v);
    const NodeId h = out.heavy_child_[v];
    light[v] = std::max(light[l] + (l == h ? 0 : 1), light[r] + (r == h ? 0 : 1));
  }
  out.light_edge_max_ = light[slp.root()];
  return out;
}

AccessTrace access(const Slp& slp, const SlpHeavyForest& forest, std::uint64_t i) {
  check_arg(i >= 1 && i <= slp.text_length(), "access: position out of range");

  AccessTrace trace;
  NodeId cur = slp.root();
  std::uint64_t offset = 0;  // 0-based start of S(cur) within S
  const std::uint64_t target = i - 1;

  AccessVisit visit;
  visit.tree = forest.tree_id(cur);
  visit.entry = cur;
  visit.entry_offset = offset;

  while (!slp.is_terminal(cur)) {
    const NodeId l = slp.left(cur);
    const NodeId r = slp.right(cur);
    const bool go_left = target - offset < slp.length(l);
    const NodeId next = go_left ? l : r;
    if (!go_left) offset += slp.length(l);
    if (next == forest.heavy_child(cur)) {
      cur = next;
      continue;
    }
    visit.exit = cur;
    visit.side = go_left ? ExitSide::kLeft : ExitSide::kRight;
    trace.visits.push_back(visit);
    cur = next;
    visit = AccessVisit{};
    visit.tree = forest.tree_id(cur);
    visit.entry = cur;
    visit.entry_offset = offset;
  }
  visit.exit = cur;  // the terminal, root of its heavy tree
  visit.side = ExitSide::kNone;
  trace.visits.push_back(visit);
  trace.symbol = slp.symbol(cur);
  return trace;
}

}  // namespace slpmatch
