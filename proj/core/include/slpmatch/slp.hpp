#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slpmatch/common.hpp"

namespace slpmatch {

/// Maps external symbols (byte sequences, usually single UTF-8 scalars) to
/// dense indices 0..sigma-1.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  std::uint32_t sigma() const { return static_cast<std::uint32_t>(symbols_.size()); }
  const std::string& symbol(std::uint32_t i) const { return symbols_[i]; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::optional<std::uint32_t> find(std::string_view symbol) const;

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Splits text into symbols: single bytes in byte mode, UTF-8 scalar values
/// otherwise (bytes that do not form a valid sequence count as one symbol).
std::vector<std::string_view> split_symbols(std::string_view text, bool byte_mode);

/// A straight-line program: an acyclic grammar in Chomsky normal form whose
/// rules are either terminals or ordered pairs of rules, deriving a single
/// string. Validated on construction; immutable afterwards.
class Slp {
 public:
  struct Rule {
    NodeId left = kNoNode;
    NodeId right = kNoNode;
    std::uint32_t symbol = 0;  // dense alphabet index, terminals only

    bool is_terminal() const { return left == kNoNode; }
    static Rule terminal(std::uint32_t symbol) { return Rule{kNoNode, kNoNode, symbol}; }
    static Rule pair(NodeId left, NodeId right) { return Rule{left, right, 0}; }
  };

  /// Throws FormatError if the rules contain a cycle, ids out of range,
  /// bad symbols, or derive a string longer than 2^63-1.
  Slp(std::vector<Rule> rules, NodeId root, Alphabet alphabet);

  std::size_t rule_count() const { return rules_.size(); }
  NodeId root() const { return root_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::uint32_t sigma() const { return alphabet_.sigma(); }

  bool is_terminal(NodeId v) const { return rules_[v].is_terminal(); }
  NodeId left(NodeId v) const { return rules_[v].left; }
  NodeId right(NodeId v) const { return rules_[v].right; }
  std::uint32_t symbol(NodeId v) const { return rules_[v].symbol; }
  const Rule& rule(NodeId v) const { return rules_[v]; }

  /// Length of the string derived from rule v.
  std::uint64_t length(NodeId v) const { return length_[v]; }
  std::uint64_t text_length() const { return length_[root_]; }
  /// Nodes on the longest root-to-terminal chain.
  std::uint32_t height() const { return height_; }
  bool reachable(NodeId v) const { return reachable_[v] != 0; }
  /// Rule ids ordered children-before-parents.
  const std::vector<NodeId>& topological_order() const { return topo_; }

  /// Derived string as dense symbol ids. Refuses when N > max_len.
  std::vector<std::uint32_t> expand_ids(std::uint64_t max_len) const;
  /// Derived string as bytes.
  std::string expand(std::uint64_t max_len) const;

  /// Symbol at position i (1-indexed) by length-guided descent, O(h).
  std::uint32_t symbol_at(std::uint64_t i) const;
  /// Symbols at positions from..from+count-1 (1-indexed).
  std::vector<std::uint32_t> window_ids(std::uint64_t from, std::uint64_t count) const;

 private:
  std::vector<Rule> rules_;
  NodeId root_ = kNoNode;
  Alphabet alphabet_;
  std::vector<std::uint64_t> length_;
  std::vector<std::uint8_t> reachable_;
  std::vector<NodeId> topo_;
  std::uint32_t height_ = 0;
};

}  // namespace slpmatch
