#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slpmatch/common.hpp"

namespace slpmatch {

/// Rooted ordered tree over nodes 0..t-1. Children are ordered by ascending
/// node id. Immutable after construction.
class Tree {
 public:
  using Node = NodeId;

  /// parent[v] is v's parent, kNoNode for the single root. The constructor
  /// verifies that the links form one tree.
  explicit Tree(std::vector<Node> parent);

  std::size_t node_count() const { return parent_.size(); }
  Node root() const { return root_; }
  Node parent(Node v) const { return parent_[v]; }
  std::span<const Node> children(Node v) const {
    return {child_flat_.data() + child_begin_[v], child_begin_[v + 1] - child_begin_[v]};
  }
  std::uint32_t depth(Node v) const { return depth_[v]; }
  std::uint32_t max_depth() const { return max_depth_; }

  const std::vector<Node>& preorder() const { return preorder_; }
  std::uint32_t preorder_rank(Node v) const { return pre_rank_[v]; }

  /// Ancestor-or-self test in O(1) via preorder intervals.
  bool is_ancestor(Node u, Node v) const {
    return pre_rank_[u] <= pre_rank_[v] && pre_rank_[v] <= pre_out_[u];
  }

  std::vector<std::uint64_t> subtree_sizes() const;

 private:
  std::vector<Node> parent_;
  Node root_ = kNoNode;
  std::vector<Node> child_flat_;
  std::vector<std::uint32_t> child_begin_;
  std::vector<std::uint32_t> depth_;
  std::uint32_t max_depth_ = 0;
  std::vector<Node> preorder_;
  std::vector<std::uint32_t> pre_rank_;
  std::vector<std::uint32_t> pre_out_;
};

/// Disjoint heavy paths covering the tree; paths[p] lists nodes from the
/// highest node (the path head) downwards.
struct HeavyPathDecomposition {
  std::vector<std::uint8_t> is_heavy;  // v is the heavy child of its parent
  std::vector<Tree::Node> heavy_child;  // kNoNode for leaves
  std::vector<std::uint32_t> path_id;
  std::vector<std::uint32_t> path_pos;  // position within the path, 0 = head
  std::vector<std::vector<Tree::Node>> paths;

  Tree::Node head(std::uint32_t p) const { return paths[p][0]; }
};

/// Heavy child = child with the largest subtree; ties go to the
/// lowest-ordered child.
HeavyPathDecomposition heavy_path_decompose(const Tree& t);
/// Same, but maximizing a caller-supplied per-node subtree weight.
HeavyPathDecomposition heavy_path_decompose(const Tree& t,
                                            std::span<const std::uint64_t> subtree_weight);

/// Binary version of a tree. Original nodes keep their ids; nodes of degree
/// > 2 get chains of helper nodes appended after id t-1. The ancestor
/// relation between original nodes is preserved.
struct BinarizedTree {
  Tree tree;
  std::vector<Tree::Node> bin_to_orig;  // kNoNode for helper nodes
  std::size_t original_count = 0;
};

BinarizedTree binarize(const Tree& t);

/// Partition of a binary tree into connected clusters that pairwise overlap
/// in at most one node. Shared nodes are boundary nodes; every cluster has
/// at most two of them (its root and at most one cluster leaf).
///
/// The macro tree keeps only the boundary nodes, plus a synthetic root
/// (macro node 0) above the highest ones.
struct ClusterPartition {
  std::uint32_t x = 0;
  std::vector<std::vector<Tree::Node>> clusters;
  std::vector<Tree::Node> cluster_root;
  std::vector<Tree::Node> cluster_leaf_boundary;  // kNoNode when the cluster has none
  /// Per node: the cluster in which the node is not the root. The tree root
  /// maps to its topmost cluster instead.
  std::vector<std::uint32_t> home_cluster;
  std::vector<std::uint8_t> is_boundary;
  Tree macro_tree;
  std::vector<Tree::Node> macro_to_node;  // [0] = kNoNode (synthetic root)
  std::vector<NodeId> node_to_macro;      // kNoNode for non-boundary nodes
};

ClusterPartition cluster_partition(const Tree& binary_tree, std::uint32_t x);

/// Structural diagnostics; empty when every partition invariant holds
/// (cover, overlap <= 1 node, <= 2 boundary nodes per cluster, size and
/// count within size_factor, macro tree consistency).
std::vector<std::string> check_cluster_partition(const Tree& t, const ClusterPartition& p,
                                                 std::uint32_t size_factor = 4);

/// Level ancestor queries with jump pointers: O(t log t) space, O(log t)
/// per query.
class LevelAncestorIndex {
 public:
  explicit LevelAncestorIndex(const Tree& t);

  std::uint32_t depth(Tree::Node v) const { return depth_[v]; }

  /// Ancestor of v at depth d (root depth = 0). Requires d <= depth(v).
  Tree::Node la(Tree::Node v, std::uint32_t d) const;

  std::size_t index_words() const;

 private:
  std::vector<std::uint32_t> depth_;
  std::vector<std::vector<Tree::Node>> up_;  // up_[k][v]: 2^k-th ancestor
};

}  // namespace slpmatch
