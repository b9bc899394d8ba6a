#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "slpmatch/bitpack.hpp"
#include "slpmatch/common.hpp"
#include "slpmatch/tree.hpp"

namespace slpmatch {

/// Tree whose nodes carry sets of colors from {0..sigma-1}, packed as
/// sigma-bit strings.
class PackedColorTree {
 public:
  PackedColorTree(std::shared_ptr<const Tree> tree, std::uint32_t sigma,
                  std::vector<BitString> colors);
  PackedColorTree(Tree tree, std::uint32_t sigma, std::vector<BitString> colors);

  const Tree& tree() const { return *tree_; }
  std::shared_ptr<const Tree> tree_ptr() const { return tree_; }
  std::uint32_t sigma() const { return sigma_; }
  const BitString& colors(Tree::Node v) const { return colors_[v]; }
  bool has_color(Tree::Node v, std::uint32_t c) const { return colors_[v].test(c); }
  /// Total number of (node, color) pairs.
  std::uint64_t total_color_count() const { return total_colors_; }
  std::size_t color_words() const;

 private:
  std::shared_ptr<const Tree> tree_;
  std::uint32_t sigma_;
  std::vector<BitString> colors_;
  std::uint64_t total_colors_ = 0;
};

/// Per-query instrumentation counters.
struct ColorQueryStats {
  std::uint64_t balanced_steps = 0;           // nodes touched inside path summary trees
  std::uint64_t balanced_steps_max_call = 0;  // worst single engine call
  std::uint64_t path_hops = 0;                // heavy path segments visited
  std::uint64_t macro_calls = 0;              // engine calls on the macro tree
  std::uint64_t cluster_calls = 0;            // engine calls on cluster-local trees
};

enum class EngineKind { Dense, HeavySummary, Matrix, ClusteredLog, ClusteredConst };

/// Query interface shared by all engines.
///
/// firstcolor(v, c): deepest node with color c on the root-to-v path, v
/// included.
/// lastcolor(u, v, c, include_u): shallowest node with color c on the path
/// from u down to v; v is always included, u only when include_u is set.
/// Requires u to be an ancestor of v (or u == v).
class ColorQueryEngine {
 public:
  virtual ~ColorQueryEngine() = default;

  std::optional<Tree::Node> firstcolor(Tree::Node v, std::uint32_t c,
                                       ColorQueryStats* stats = nullptr) const;
  std::optional<Tree::Node> lastcolor(Tree::Node u, Tree::Node v, std::uint32_t c,
                                      bool include_u, ColorQueryStats* stats = nullptr) const;

  virtual EngineKind kind() const = 0;
  /// 64-bit words held by this index (excluding the input tree and colors).
  virtual std::size_t index_words() const = 0;

 protected:
  explicit ColorQueryEngine(const PackedColorTree& source) : source_(&source) {}
  const PackedColorTree& source() const { return *source_; }

  virtual std::optional<Tree::Node> firstcolor_impl(Tree::Node v, std::uint32_t c,
                                                    ColorQueryStats* stats) const = 0;
  virtual std::optional<Tree::Node> lastcolor_impl(Tree::Node u, Tree::Node v, std::uint32_t c,
                                                   bool include_u,
                                                   ColorQueryStats* stats) const = 0;

 private:
  const PackedColorTree* source_;
};

/// Ground-truth walks along parent pointers.
std::optional<Tree::Node> naive_firstcolor(const PackedColorTree& t, Tree::Node v,
                                           std::uint32_t c);
std::optional<Tree::Node> naive_lastcolor(const PackedColorTree& t, Tree::Node u, Tree::Node v,
                                          std::uint32_t c, bool include_u);

/// Precomputed answers for every (node, color) plus per-color induced
/// subtrees: O(t*sigma) space, O(1)-ish queries.
class DenseIndex : public ColorQueryEngine {
 public:
  explicit DenseIndex(const PackedColorTree& source);

  EngineKind kind() const override { return EngineKind::Dense; }
  std::size_t index_words() const override;
  /// Node count of the induced subtree for color c.
  std::size_t induced_node_count(std::uint32_t c) const;

 protected:
  std::optional<Tree::Node> firstcolor_impl(Tree::Node v, std::uint32_t c,
                                            ColorQueryStats* stats) const override;
  std::optional<Tree::Node> lastcolor_impl(Tree::Node u, Tree::Node v, std::uint32_t c,
                                           bool include_u, ColorQueryStats* stats) const override;

 private:
  struct Induced {
    std::vector<Tree::Node> to_orig;
    std::unique_ptr<LevelAncestorIndex> la;
  };

  std::uint32_t t_ = 0;
  std::uint32_t sigma_ = 0;
  std::vector<NodeId> first_;    // t * sigma, kNoNode when undefined
  std::vector<NodeId> ind_id_;   // sigma * t, id within the induced subtree
  std::vector<Induced> induced_;
};

/// Heavy path decomposition with balanced summary trees per path and packed
/// prefix summaries: O(t + t*sigma/w) space, O(log t) queries.
class HeavySummaryIndex : public ColorQueryEngine {
 public:
  explicit HeavySummaryIndex(const PackedColorTree& source);

  EngineKind kind() const override { return EngineKind::HeavySummary; }
  std::size_t index_words() const override;

 protected:
  std::optional<Tree::Node> firstcolor_impl(Tree::Node v, std::uint32_t c,
                                            ColorQueryStats* stats) const override;
  std::optional<Tree::Node> lastcolor_impl(Tree::Node u, Tree::Node v, std::uint32_t c,
                                           bool include_u, ColorQueryStats* stats) const override;

 private:
  std::span<const std::uint64_t> seg_summary(std::uint32_t path, std::uint32_t heap_node) const;
  bool seg_has(std::uint32_t path, std::uint32_t heap_node, std::uint32_t c) const;
  /// Smallest/largest leaf position in [lo..hi] whose node has color c.
  std::optional<std::uint32_t> leftmost_colored(std::uint32_t path, std::uint32_t lo,
                                                std::uint32_t hi, std::uint32_t c,
                                                std::uint64_t& steps) const;
  std::optional<std::uint32_t> rightmost_colored(std::uint32_t path, std::uint32_t lo,
                                                 std::uint32_t hi, std::uint32_t c,
                                                 std::uint64_t& steps) const;

  HeavyPathDecomposition hpd_;
  std::uint32_t stride_ = 0;
  std::vector<std::uint64_t> prefix_;      // per node: summary of its path prefix
  std::vector<std::uint32_t> seg_base_;    // per path: offset into seg_ (in strides)
  std::vector<std::uint32_t> seg_leaves_;  // per path: padded leaf count (power of two)
  std::vector<std::uint64_t> seg_;
};

/// Pre-order color matrix plus per-node ancestor bit strings: queries scan
/// O(t/w) words. The ancestor strings take t*t/w words, so this layout is
/// meant for trees of at most a few thousand nodes (say t <= 8w) — inside
/// cluster partitions it is effectively linear.
class MatrixIndex : public ColorQueryEngine {
 public:
  explicit MatrixIndex(const PackedColorTree& source);

  EngineKind kind() const override { return EngineKind::Matrix; }
  std::size_t index_words() const override;
  /// Proper ancestors of v as a bit string over pre-order ranks.
  BitString ancestors(Tree::Node v) const;

 protected:
  std::optional<Tree::Node> firstcolor_impl(Tree::Node v, std::uint32_t c,
                                            ColorQueryStats* stats) const override;
  std::optional<Tree::Node> lastcolor_impl(Tree::Node u, Tree::Node v, std::uint32_t c,
                                           bool include_u, ColorQueryStats* stats) const override;

 private:
  void colored_ancestors(Tree::Node v, std::uint32_t c, std::vector<std::uint64_t>& out) const;

  std::uint32_t t_ = 0;
  std::uint32_t words_ = 0;  // words per t-bit row
  std::vector<Tree::Node> order_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint64_t> color_rows_;  // sigma x words_
  std::vector<std::uint64_t> anc_rows_;    // t x words_
};

enum class ClusteredFlavor { LogQuery, ConstQuery };

/// Cluster partition of the (binarized) tree with word-sized clusters, a
/// dense index over the macro tree, and a per-cluster engine; queries touch
/// at most three macro/cluster indexes.
class ClusteredIndex : public ColorQueryEngine {
 public:
  ClusteredIndex(const PackedColorTree& source, ClusteredFlavor flavor,
                 std::uint32_t cluster_size = kWordBits);

  EngineKind kind() const override {
    return flavor_ == ClusteredFlavor::LogQuery ? EngineKind::ClusteredLog
                                                : EngineKind::ClusteredConst;
  }
  std::size_t index_words() const override;
  ClusteredFlavor flavor() const { return flavor_; }

 protected:
  std::optional<Tree::Node> firstcolor_impl(Tree::Node v, std::uint32_t c,
                                            ColorQueryStats* stats) const override;
  std::optional<Tree::Node> lastcolor_impl(Tree::Node u, Tree::Node v, std::uint32_t c,
                                           bool include_u, ColorQueryStats* stats) const override;

 private:
  struct Cluster {
    std::vector<Tree::Node> to_bin;
    NodeId root_local = kNoNode;
    NodeId leaf_local = kNoNode;
    std::unique_ptr<PackedColorTree> pct;
    std::unique_ptr<ColorQueryEngine> engine;
  };

  std::optional<Tree::Node> cluster_first(std::uint32_t ci, NodeId local, std::uint32_t c,
                                          ColorQueryStats* stats) const;
  std::optional<Tree::Node> cluster_last(std::uint32_t ci, NodeId lu, NodeId lv, std::uint32_t c,
                                         bool include_u, ColorQueryStats* stats) const;
  std::optional<Tree::Node> to_orig(std::uint32_t ci, Tree::Node local) const;

  ClusteredFlavor flavor_;
  BinarizedTree bin_;
  ClusterPartition part_;
  std::vector<NodeId> local_id_;  // bin node -> id within its home cluster
  std::vector<Cluster> clusters_;
  std::unique_ptr<PackedColorTree> macro_pct_;
  std::unique_ptr<DenseIndex> macro_engine_;
  std::unique_ptr<LevelAncestorIndex> macro_la_;
};

std::unique_ptr<ColorQueryEngine> make_engine(const PackedColorTree& source, EngineKind kind);

}  // namespace slpmatch
