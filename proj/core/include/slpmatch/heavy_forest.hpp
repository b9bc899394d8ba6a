#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "slpmatch/slp.hpp"
#include "slpmatch/tree.hpp"

namespace slpmatch {

/// Heavy forest of an SLP: each nonterminal's heavy child is the child
/// deriving the longer string (ties to the left). Orienting every node's
/// forest parent towards its heavy child splits the reachable nodes into
/// disjoint trees whose roots are terminals; any root-to-terminal grammar
/// path crosses at most floor(log2 N) light edges.
class SlpHeavyForest {
 public:
  struct ForestTree {
    std::shared_ptr<const Tree> tree;
    std::vector<NodeId> to_slp;  // local node -> grammar rule; local 0 is the root
    NodeId root_slp = kNoNode;   // a terminal
  };

  NodeId heavy_child(NodeId v) const { return heavy_child_[v]; }
  std::uint32_t tree_id(NodeId v) const { return tree_id_[v]; }
  NodeId local_id(NodeId v) const { return local_id_[v]; }
  std::uint32_t depth_in_tree(NodeId v) const { return depth_[v]; }
  /// Offset of the tree-root terminal inside the expansion of v.
  std::uint64_t terminal_offset(NodeId v) const { return delta_[v]; }

  std::size_t tree_count() const { return trees_.size(); }
  const ForestTree& tree(std::uint32_t id) const { return trees_[id]; }

  /// Largest number of light edges on any root-to-terminal grammar path.
  std::uint32_t light_edge_max() const { return light_edge_max_; }

 private:
  friend SlpHeavyForest build_heavy_forest(const Slp& slp);

  std::vector<NodeId> heavy_child_;
  std::vector<std::uint32_t> tree_id_;
  std::vector<NodeId> local_id_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint64_t> delta_;
  std::vector<ForestTree> trees_;
  std::uint32_t light_edge_max_ = 0;
};

/// Unreachable rules get no tree assignment and are ignored by queries.
SlpHeavyForest build_heavy_forest(const Slp& slp);

enum class ExitSide : std::uint8_t { kLeft, kRight, kNone };

/// One heavy tree visited by a grammar path: the path enters the tree at
/// `entry`, follows heavy edges up the forest to `exit`, then leaves along
/// the light edge towards the given side's child (kNone for the final,
/// terminal visit).
struct AccessVisit {
  std::uint32_t tree = 0;
  NodeId entry = kNoNode;
  NodeId exit = kNoNode;
  std::uint64_t entry_offset = 0;  // 0-based start of the entry's expansion in S
  ExitSide side = ExitSide::kNone;
};

struct AccessTrace {
  std::uint32_t symbol = 0;  // dense alphabet index of S[i]
  std::vector<AccessVisit> visits;
};

/// Resolves S[i] (1-indexed) in O(h) by length-guided descent and reports
/// the entry/exit nodes of every heavy tree on the way.
AccessTrace access(const Slp& slp, const SlpHeavyForest& forest, std::uint64_t i);

}  // namespace slpmatch
