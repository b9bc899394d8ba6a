#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "slpmatch/heavy_forest.hpp"
#include "slpmatch/slp.hpp"
#include "slpmatch/treecolor.hpp"

namespace slpmatch {

enum class LsFlavor { LogQuery, ConstQuery };

struct LsStats {
  std::uint64_t visits = 0;           // heavy trees on the access path
  std::uint64_t walkup_queries = 0;   // lastcolor calls while walking up
  std::uint64_t descent_queries = 0;  // engine calls while walking down
  ColorQueryStats engine;

  std::uint64_t engine_queries() const { return walkup_queries + descent_queries; }
};

/// Labelled successor/predecessor queries on an SLP-compressed string:
/// ls(i, c) is the least j > i with S[j] = c, lp(i, c) the greatest j < i.
///
/// Every node stores which characters its left/right child derives when
/// that child hangs off the heavy tree (plus the full character set of its
/// expansion); each heavy tree carries two packed color indexes, one keyed
/// by the left summaries and one by the right ones.
class LsIndex {
 public:
  LsIndex(const Slp& slp, const SlpHeavyForest& forest, LsFlavor flavor);

  /// i ranges over 0..N; i = 0 asks for the first occurrence anywhere.
  std::optional<std::uint64_t> ls(std::uint64_t i, std::string_view symbol,
                                  LsStats* stats = nullptr) const;
  std::optional<std::uint64_t> ls_id(std::uint64_t i, std::uint32_t c,
                                     LsStats* stats = nullptr) const;
  /// i ranges over 1..N+1; i = N+1 asks for the last occurrence anywhere.
  std::optional<std::uint64_t> lp(std::uint64_t i, std::string_view symbol,
                                  LsStats* stats = nullptr) const;
  std::optional<std::uint64_t> lp_id(std::uint64_t i, std::uint32_t c,
                                     LsStats* stats = nullptr) const;

  LsFlavor flavor() const { return flavor_; }
  const Slp& slp() const { return *slp_; }
  const SlpHeavyForest& forest() const { return *forest_; }

  /// Character set of the expansion of rule v, as a sigma-bit string.
  BitString node_charset(NodeId v) const;

  std::size_t index_words() const;

 private:
  struct TreeEngines {
    std::unique_ptr<PackedColorTree> left_colors;
    std::unique_ptr<PackedColorTree> right_colors;
    std::unique_ptr<ClusteredIndex> left_engine;
    std::unique_ptr<ClusteredIndex> right_engine;
  };

  std::span<const std::uint64_t> charset(NodeId v) const {
    return {charset_.data() + static_cast<std::size_t>(v) * stride_, stride_};
  }
  bool charset_has(NodeId v, std::uint32_t c) const {
    return wordops::test_bit(charset(v), c);
  }
  std::uint64_t descend_first(NodeId w, std::uint64_t offset, std::uint32_t c,
                              LsStats* stats) const;
  std::uint64_t descend_last(NodeId w, std::uint64_t offset, std::uint32_t c,
                             LsStats* stats) const;

  const Slp* slp_;
  const SlpHeavyForest* forest_;
  LsFlavor flavor_;
  std::uint32_t stride_;
  std::vector<std::uint64_t> charset_;      // per rule: characters of S(v)
  std::vector<std::uint64_t> left_light_;   // per rule: chars of S(left(v)), zero if left is heavy
  std::vector<std::uint64_t> right_light_;  // symmetric
  std::vector<TreeEngines> engines_;        // one pair per heavy tree
};

}  // namespace slpmatch
