#include "slpmatch/lsq.hpp"

#include <algorithm>
#include <cassert>

namespace slpmatch {

namespace {
[[noreturn]] void inconsistent() { throw std::logic_error("ls index: summary inconsistency"); }
}  // namespace

LsIndex::LsIndex(const Slp& slp, const SlpHeavyForest& forest, LsFlavor flavor)
    : slp_(&slp), forest_(&forest), flavor_(flavor) {
  const std::size_t n = slp.rule_count();
  const std::uint32_t sigma = slp.sigma();
  stride_ = static_cast<std::uint32_t>(words_for_bits(sigma));

  charset_.assign(n * stride_, 0);
  left_light_.assign(n * stride_, 0);
  right_light_.assign(n * stride_, 0);
  auto row = [this](std::vector<std::uint64_t>& arena, NodeId v) {
    return std::span<std::uint64_t>{arena.data() + static_cast<std::size_t>(v) * stride_,
                                    stride_};
  };
  for (const NodeId v : slp.topological_order()) {
    auto cs = row(charset_, v);
    if (slp.is_terminal(v)) {
      wordops::set_bit(cs, slp.symbol(v));
      continue;
    }
    wordops::or_into(cs, charset(slp.left(v)));
    wordops::or_into(cs, charset(slp.right(v)));
    const NodeId heavy = forest.heavy_child(v);
    if (slp.left(v) != heavy) wordops::or_into(row(left_light_, v), charset(slp.left(v)));
    if (slp.right(v) != heavy) wordops::or_into(row(right_light_, v), charset(slp.right(v)));
  }

  engines_.resize(forest.tree_count());
  const ClusteredFlavor cf =
      flavor == LsFlavor::LogQuery ? ClusteredFlavor::LogQuery : ClusteredFlavor::ConstQuery;
  for (std::uint32_t ti = 0; ti < forest.tree_count(); ++ti) {
    const auto& ft = forest.tree(ti);
    std::vector<BitString> left_colors(ft.to_slp.size());
    std::vector<BitString> right_colors(ft.to_slp.size());
    for (NodeId j = 0; j < ft.to_slp.size(); ++j) {
      const NodeId v = ft.to_slp[j];
      BitString l(sigma), r(sigma);
      for (std::uint32_t c = 0; c < sigma; ++c) {
        if (wordops::test_bit(row(left_light_, v), c)) l.set(c);
        if (wordops::test_bit(row(right_light_, v), c)) r.set(c);
      }
      left_colors[j] = std::move(l);
      right_colors[j] = std::move(r);
    }
    TreeEngines& te = engines_[ti];
    te.left_colors = std::make_unique<PackedColorTree>(ft.tree, sigma, std::move(left_colors));
    te.right_colors = std::make_unique<PackedColorTree>(ft.tree, sigma, std::move(right_colors));
    te.left_engine = std::make_unique<ClusteredIndex>(*te.left_colors, cf);
    te.right_engine = std::make_unique<ClusteredIndex>(*te.right_colors, cf);
  }
}

BitString LsIndex::node_charset(NodeId v) const {
  check_arg(v < slp_->rule_count(), "node_charset: rule out of range");
  BitString out(slp_->sigma());
  for (std::uint32_t c = 0; c < slp_->sigma(); ++c) {
    if (charset_has(v, c)) out.set(c);
  }
  return out;
}

// Leftmost occurrence of c inside S(w); requires c in charset(w). `offset`
// is the 0-based start of S(w); returns the 0-based position of the hit.
//
// On the heavy chain from w down to its tree's terminal, the light-left
// expansions precede everything deeper, then comes the terminal, then the
// light-right expansions in reverse chain order. firstcolor on the left
// summaries finds the earliest left piece; lastcolor to the tree root on
// the right summaries finds the earliest right piece. Each pivot crosses a
// light edge, so the loop runs at most log2(N)+1 times.
std::uint64_t LsIndex::descend_first(NodeId w, std::uint64_t offset, std::uint32_t c,
                                     LsStats* stats) const {
  while (true) {
    assert(charset_has(w, c));
    if (slp_->is_terminal(w)) return offset;
    const std::uint32_t ti = forest_->tree_id(w);
    const TreeEngines& te = engines_[ti];
    if (stats) ++stats->descent_queries;
    if (const auto z = te.left_engine->firstcolor(forest_->local_id(w), c,
                                                  stats ? &stats->engine : nullptr)) {
      const NodeId zslp = forest_->tree(ti).to_slp[*z];
      offset += forest_->terminal_offset(w) - forest_->terminal_offset(zslp);
      w = slp_->left(zslp);
      continue;
    }
    const NodeId root = forest_->tree(ti).root_slp;
    if (slp_->symbol(root) == c) return offset + forest_->terminal_offset(w);
    if (stats) ++stats->descent_queries;
    const auto z = te.right_engine->lastcolor(0, forest_->local_id(w), c, true,
                                              stats ? &stats->engine : nullptr);
    if (!z) inconsistent();
    const NodeId zslp = forest_->tree(ti).to_slp[*z];
    offset += forest_->terminal_offset(w) - forest_->terminal_offset(zslp);
    offset += slp_->length(slp_->left(zslp));
    w = slp_->right(zslp);
  }
}

// Mirror of descend_first: rightmost occurrence of c inside S(w).
std::uint64_t LsIndex::descend_last(NodeId w, std::uint64_t offset, std::uint32_t c,
                                    LsStats* stats) const {
  while (true) {
    assert(charset_has(w, c));
    if (slp_->is_terminal(w)) return offset;
    const std::uint32_t ti = forest_->tree_id(w);
    const TreeEngines& te = engines_[ti];
    if (stats) ++stats->descent_queries;
    if (const auto z = te.right_engine->firstcolor(forest_->local_id(w), c,
                                                   stats ? &stats->engine : nullptr)) {
      const NodeId zslp = forest_->tree(ti).to_slp[*z];
      offset += forest_->terminal_offset(w) - forest_->terminal_offset(zslp);
      offset += slp_->length(slp_->left(zslp));
      w = slp_->right(zslp);
      continue;
    }
    const NodeId root = forest_->tree(ti).root_slp;
    if (slp_->symbol(root) == c) return offset + forest_->terminal_offset(w);
    if (stats) ++stats->descent_queries;
    const auto z = te.left_engine->lastcolor(0, forest_->local_id(w), c, true,
                                             stats ? &stats->engine : nullptr);
    if (!z) inconsistent();
    const NodeId zslp = forest_->tree(ti).to_slp[*z];
    offset += forest_->terminal_offset(w) - forest_->terminal_offset(zslp);
    w = slp_->left(zslp);
  }
}

std::optional<std::uint64_t> LsIndex::ls_id(std::uint64_t i, std::uint32_t c,
                                            LsStats* stats) const {
  check_arg(i <= slp_->text_length(), "ls: position out of range");
  if (c >= slp_->sigma()) return std::nullopt;

  if (i == 0) {
    if (!charset_has(slp_->root(), c)) return std::nullopt;
    return descend_first(slp_->root(), 0, c, stats) + 1;
  }

  const AccessTrace trace = access(*slp_, *forest_, i);
  if (stats) stats->visits += trace.visits.size();

  for (std::size_t j = trace.visits.size(); j-- > 0;) {
    const AccessVisit& vis = trace.visits[j];
    const std::uint64_t exit_offset = vis.entry_offset + forest_->terminal_offset(vis.entry) -
                                      forest_->terminal_offset(vis.exit);
    if (vis.side == ExitSide::kLeft) {
      // The heavy (right) subtree below the exit starts right after i's
      // region; the right summaries skip heavy children, so probe the full
      // character set before falling back to the light-right pieces.
      const NodeId heavy = forest_->heavy_child(vis.exit);
      if (charset_has(heavy, c)) {
        const std::uint64_t off = exit_offset + slp_->length(slp_->left(vis.exit));
        return descend_first(heavy, off, c, stats) + 1;
      }
    }
    // With a right-side exit the subtree holding position i is the exit's
    // own light right child; deeper visits covered it already.
    const bool include_exit = vis.side != ExitSide::kRight;
    const std::uint32_t ti = vis.tree;
    if (stats) ++stats->walkup_queries;
    const auto z =
        engines_[ti].right_engine->lastcolor(forest_->local_id(vis.exit),
                                             forest_->local_id(vis.entry), c, include_exit,
                                             stats ? &stats->engine : nullptr);
    if (z) {
      const NodeId zslp = forest_->tree(ti).to_slp[*z];
      const std::uint64_t z_off = vis.entry_offset + forest_->terminal_offset(vis.entry) -
                                  forest_->terminal_offset(zslp);
      const std::uint64_t off = z_off + slp_->length(slp_->left(zslp));
      return descend_first(slp_->right(zslp), off, c, stats) + 1;
    }
  }
  return std::nullopt;
}

std::optional<std::uint64_t> LsIndex::lp_id(std::uint64_t i, std::uint32_t c,
                                            LsStats* stats) const {
  check_arg(i >= 1 && i <= slp_->text_length() + 1, "lp: position out of range");
  if (c >= slp_->sigma()) return std::nullopt;

  if (i == slp_->text_length() + 1) {
    if (!charset_has(slp_->root(), c)) return std::nullopt;
    return descend_last(slp_->root(), 0, c, stats) + 1;
  }

  const AccessTrace trace = access(*slp_, *forest_, i);
  if (stats) stats->visits += trace.visits.size();

  for (std::size_t j = trace.visits.size(); j-- > 0;) {
    const AccessVisit& vis = trace.visits[j];
    const std::uint64_t exit_offset = vis.entry_offset + forest_->terminal_offset(vis.entry) -
                                      forest_->terminal_offset(vis.exit);
    if (vis.side == ExitSide::kRight) {
      const NodeId heavy = forest_->heavy_child(vis.exit);
      if (charset_has(heavy, c)) {
        return descend_last(heavy, exit_offset, c, stats) + 1;
      }
    }
    const bool include_exit = vis.side != ExitSide::kLeft;
    const std::uint32_t ti = vis.tree;
    if (stats) ++stats->walkup_queries;
    const auto z =
        engines_[ti].left_engine->lastcolor(forest_->local_id(vis.exit),
                                            forest_->local_id(vis.entry), c, include_exit,
                                            stats ? &stats->engine : nullptr);
    if (z) {
      const NodeId zslp = forest_->tree(ti).to_slp[*z];
      const std::uint64_t z_off = vis.entry_offset + forest_->terminal_offset(vis.entry) -
                                  forest_->terminal_offset(zslp);
      return descend_last(slp_->left(zslp), z_off, c, stats) + 1;
    }
  }
  return std::nullopt;
}

std::optional<std::uint64_t> LsIndex::ls(std::uint64_t i, std::string_view symbol,
                                         LsStats* stats) const {
  const auto c = slp_->alphabet().find(symbol);
  if (!c) {
    check_arg(i <= slp_->text_length(), "ls: position out of range");
    return std::nullopt;
  }
  return ls_id(i, *c, stats);
}

std::optional<std::uint64_t> LsIndex::lp(std::uint64_t i, std::string_view symbol,
                                         LsStats* stats) const {
  const auto c = slp_->alphabet().find(symbol);
  if (!c) {
    check_arg(i >= 1 && i <= slp_->text_length() + 1, "lp: position out of range");
    return std::nullopt;
  }
  return lp_id(i, *c, stats);
}

std::size_t LsIndex::index_words() const {
  std::size_t words = charset_.size() + left_light_.size() + right_light_.size();
  for (const TreeEngines& te : engines_) {
    words += te.left_colors->color_words() + te.right_colors->color_words();
    words += te.left_engine->index_words() + te.right_engine->index_words();
  }
  return words;
}

}  // namespace slpmatch
