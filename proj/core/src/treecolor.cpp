#include "slpmatch/treecolor.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstring>
#include <unordered_map>

namespace slpmatch {

namespace {

template <typename F>
void for_each_set_bit(const BitString& b, F f) {
  const auto ws = b.words();
  for (std::size_t wi = 0; wi < ws.size(); ++wi) {
    std::uint64_t w = ws[wi];
    while (w) {
      f(wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
}

[[noreturn]] void inconsistent() { throw std::logic_error("treecolor: index inconsistency"); }

}  // namespace

PackedColorTree::PackedColorTree(std::shared_ptr<const Tree> tree, std::uint32_t sigma,
                                 std::vector<BitString> colors)
    : tree_(std::move(tree)), sigma_(sigma), colors_(std::move(colors)) {
  check_arg(tree_ != nullptr, "PackedColorTree: null tree");
  check_arg(colors_.size() == tree_->node_count(), "PackedColorTree: one color set per node");
  for (const BitString& b : colors_) {
    check_arg(b.size() == sigma_, "PackedColorTree: color set length must equal sigma");
    total_colors_ += b.count();
  }
}

PackedColorTree::PackedColorTree(Tree tree, std::uint32_t sigma, std::vector<BitString> colors)
    : PackedColorTree(std::make_shared<const Tree>(std::move(tree)), sigma, std::move(colors)) {}

std::size_t PackedColorTree::color_words() const {
  std::size_t words = 0;
  for (const BitString& b : colors_) words += b.word_count();
  return words;
}

std::optional<Tree::Node> ColorQueryEngine::firstcolor(Tree::Node v, std::uint32_t c,
                                                       ColorQueryStats* stats) const {
  check_arg(v < source_->tree().node_count(), "firstcolor: node out of range");
  check_arg(c < source_->sigma(), "firstcolor: color out of range");
  return firstcolor_impl(v, c, stats);
}

std::optional<Tree::Node> ColorQueryEngine::lastcolor(Tree::Node u, Tree::Node v, std::uint32_t c,
                                                      bool include_u,
                                                      ColorQueryStats* stats) const {
  const Tree& tr = source_->tree();
  check_arg(u < tr.node_count() && v < tr.node_count(), "lastcolor: node out of range");
  check_arg(c < source_->sigma(), "lastcolor: color out of range");
  check_arg(tr.is_ancestor(u, v), "lastcolor: u is not an ancestor of v");
  return lastcolor_impl(u, v, c, include_u, stats);
}

std::optional<Tree::Node> naive_firstcolor(const PackedColorTree& t, Tree::Node v,
                                           std::uint32_t c) {
  check_arg(v < t.tree().node_count(), "naive_firstcolor: node out of range");
  check_arg(c < t.sigma(), "naive_firstcolor: color out of range");
  Tree::Node z = v;
  while (true) {
    if (t.has_color(z, c)) return z;
    if (z == t.tree().root()) return std::nullopt;
    z = t.tree().parent(z);
  }
}

std::optional<Tree::Node> naive_lastcolor(const PackedColorTree& t, Tree::Node u, Tree::Node v,
                                          std::uint32_t c, bool include_u) {
  check_arg(u < t.tree().node_count() && v < t.tree().node_count(),
            "naive_lastcolor: node out of range");
  check_arg(c < t.sigma(), "naive_lastcolor: color out of range");
  check_arg(t.tree().is_ancestor(u, v), "naive_lastcolor: u is not an ancestor of v");
  std::optional<Tree::Node> best;
  Tree::Node z = v;
  while (true) {
    if ((z != u || include_u) && t.has_color(z, c)) best = z;
    if (z == u) break;
    z = t.tree().parent(z);
  }
  return best;
}

// ---------------------------------------------------------------------------
// DenseIndex

DenseIndex::DenseIndex(const PackedColorTree& source) : ColorQueryEngine(source) {
  const Tree& tr = source.tree();
  t_ = static_cast<std::uint32_t>(tr.node_count());
  sigma_ = source.sigma();

  first_.assign(static_cast<std::size_t>(t_) * sigma_, kNoNode);
  for (Tree::Node v : tr.preorder()) {
    NodeId* row = first_.data() + static_cast<std::size_t>(v) * sigma_;
    if (v != tr.root()) {
      const NodeId* parent_row = first_.data() + static_cast<std::size_t>(tr.parent(v)) * sigma_;
      std::memcpy(row, parent_row, sizeof(NodeId) * sigma_);
    }
    for_each_set_bit(source.colors(v), [&](std::size_t c) { row[c] = v; });
  }

  ind_id_.assign(static_cast<std::size_t>(sigma_) * t_, kNoNode);
  induced_.resize(sigma_);
  for (std::uint32_t c = 0; c < sigma_; ++c) {
    Induced& ind = induced_[c];
    std::vector<Tree::Node> parents;
    for (Tree::Node v : tr.preorder()) {
      if (v != tr.root() && !source.has_color(v, c)) continue;
      const auto local = static_cast<NodeId>(ind.to_orig.size());
      ind_id_[static_cast<std::size_t>(c) * t_ + v] = local;
      ind.to_orig.push_back(v);
      if (v == tr.root()) {
        parents.push_back(kNoNode);
      } else {
        const NodeId pa = first_[static_cast<std::size_t>(tr.parent(v)) * sigma_ + c];
        parents.push_back(pa == kNoNode ? 0 : ind_id_[static_cast<std::size_t>(c) * t_ + pa]);
      }
    }
    ind.la = std::make_unique<LevelAncestorIndex>(Tree(std::move(parents)));
  }
}

std::optional<Tree::Node> DenseIndex::firstcolor_impl(Tree::Node v, std::uint32_t c,
                                                      ColorQueryStats*) const {
  const NodeId z = first_[static_cast<std::size_t>(v) * sigma_ + c];
  if (z == kNoNode) return std::nullopt;
  return z;
}

std::optional<Tree::Node> DenseIndex::lastcolor_impl(Tree::Node u, Tree::Node v, std::uint32_t c,
                                                     bool include_u, ColorQueryStats*) const {
  const Tree& tr = source().tree();
  if (include_u && source().has_color(u, c)) return u;
  const NodeId fv = first_[static_cast<std::size_t>(v) * sigma_ + c];
  if (fv == kNoNode || tr.depth(fv) <= tr.depth(u)) return std::nullopt;
  // The answer is the highest colored node strictly below u: the child of
  // u's image on the induced-subtree path towards v's image.
  const NodeId fu = first_[static_cast<std::size_t>(u) * sigma_ + c];
  const Induced& ind = induced_[c];
  const NodeId u_ind = fu == kNoNode ? 0 : ind_id_[static_cast<std::size_t>(c) * t_ + fu];
  const NodeId v_ind = ind_id_[static_cast<std::size_t>(c) * t_ + fv];
  const Tree::Node z = ind.la->la(v_ind, ind.la->depth(u_ind) + 1);
  return ind.to_orig[z];
}

std::size_t DenseIndex::index_words() const {
  std::size_t words = (first_.size() + ind_id_.size() + 1) / 2;
  for (const Induced& ind : induced_) {
    words += (ind.to_orig.size() + 1) / 2;
    words += ind.la->index_words();
  }
  return words;
}

std::size_t DenseIndex::induced_node_count(std::uint32_t c) const {
  check_arg(c < sigma_, "induced_node_count: color out of range");
  return induced_[c].to_orig.size();
}

// ---------------------------------------------------------------------------
// HeavySummaryIndex

HeavySummaryIndex::HeavySummaryIndex(const PackedColorTree& source) : ColorQueryEngine(source) {
  const Tree& tr = source.tree();
  const std::size_t t = tr.node_count();
  hpd_ = heavy_path_decompose(tr);
  stride_ = static_cast<std::uint32_t>(words_for_bits(source.sigma()));

  prefix_.assign(t * stride_, 0);
  for (const auto& path : hpd_.paths) {
    for (std::size_t i = 0; i < path.size(); ++i) {
      std::span<std::uint64_t> dst{prefix_.data() + static_cast<std::size_t>(path[i]) * stride_,
                                   stride_};
      if (i > 0) {
        std::span<const std::uint64_t> prev{
            prefix_.data() + static_cast<std::size_t>(path[i - 1]) * stride_, stride_};
        std::copy(prev.begin(), prev.end(), dst.begin());
      }
      wordops::or_into(dst, source.colors(path[i]).words());
    }
  }

  seg_base_.resize(hpd_.paths.size());
  seg_leaves_.resize(hpd_.paths.size());
  std::size_t total = 0;
  for (std::size_t p = 0; p < hpd_.paths.size(); ++p) {
    const auto leaves = std::bit_ceil(static_cast<std::uint32_t>(hpd_.paths[p].size()));
    seg_base_[p] = static_cast<std::uint32_t>(total);
    seg_leaves_[p] = leaves;
    total += 2 * static_cast<std::size_t>(leaves) - 1;
  }
  seg_.assign(total * stride_, 0);
  for (std::size_t p = 0; p < hpd_.paths.size(); ++p) {
    const auto& path = hpd_.paths[p];
    const std::uint32_t leaves = seg_leaves_[p];
    auto node_words = [&](std::uint32_t heap) {
      return std::span<std::uint64_t>{
          seg_.data() + (static_cast<std::size_t>(seg_base_[p]) + heap - 1) * stride_, stride_};
    };
    for (std::size_t i = 0; i < path.size(); ++i) {
      auto dst = node_words(static_cast<std::uint32_t>(leaves + i));
      wordops::or_into(dst, source.colors(path[i]).words());
    }
    for (std::uint32_t h = leaves - 1; h >= 1; --h) {
      auto dst = node_words(h);
      wordops::or_into(dst, node_words(2 * h));
      wordops::or_into(dst, node_words(2 * h + 1));
      if (h == 1) break;
    }
  }
}

std::span<const std::uint64_t> HeavySummaryIndex::seg_summary(std::uint32_t path,
                                                              std::uint32_t heap_node) const {
  return {seg_.data() + (static_cast<std::size_t>(seg_base_[path]) + heap_node - 1) * stride_,
          stride_};
}

bool HeavySummaryIndex::seg_has(std::uint32_t path, std::uint32_t heap_node,
                                std::uint32_t c) const {
  return wordops::test_bit(seg_summary(path, heap_node), c);
}

namespace {

/// Recursive range descent over an implicit heap-shaped summary tree.
/// `has` tests a heap node for the color, leaves sit at heap index p+i.
template <typename Has>
std::optional<std::uint32_t> descend_leftmost(const Has& has, std::uint32_t p, std::uint32_t h,
                                              std::uint32_t a, std::uint32_t b, std::uint32_t lo,
                                              std::uint32_t hi, std::uint64_t& steps) {
  if (a > hi || b < lo) return std::nullopt;
  ++steps;
  if (!has(h)) return std::nullopt;
  if (h >= p) return a;  // leaf; a == b and lo <= a <= hi holds here
  const std::uint32_t mid = a + (b - a) / 2;
  if (auto r = descend_leftmost(has, p, 2 * h, a, mid, lo, hi, steps)) return r;
  return descend_leftmost(has, p, 2 * h + 1, mid + 1, b, lo, hi, steps);
}

template <typename Has>
std::optional<std::uint32_t> descend_rightmost(const Has& has, std::uint32_t p, std::uint32_t h,
                                               std::uint32_t a, std::uint32_t b, std::uint32_t lo,
                                               std::uint32_t hi, std::uint64_t& steps) {
  if (a > hi || b < lo) return std::nullopt;
  ++steps;
  if (!has(h)) return std::nullopt;
  if (h >= p) return a;
  const std::uint32_t mid = a + (b - a) / 2;
  if (auto r = descend_rightmost(has, p, 2 * h + 1, mid + 1, b, lo, hi, steps)) return r;
  return descend_rightmost(has, p, 2 * h, a, mid, lo, hi, steps);
}

}  // namespace

std::optional<std::uint32_t> HeavySummaryIndex::leftmost_colored(std::uint32_t path,
                                                                 std::uint32_t lo,
                                                                 std::uint32_t hi, std::uint32_t c,
                                                                 std::uint64_t& steps) const {
  if (lo > hi) return std::nullopt;
  const std::uint32_t p = seg_leaves_[path];
  auto has = [&](std::uint32_t h) { return seg_has(path, h, c); };
  // Climb from the lo leaf, probing right siblings; the first hit holds the
  // leftmost candidate.
  ++steps;
  if (has(p + lo)) return lo;
  std::uint32_t h = p + lo;
  std::uint32_t a = lo, b = lo;
  while (h > 1) {
    const std::uint32_t size = b - a + 1;
    if ((h & 1u) == 0) {  // left child: sibling covers [b+1, b+size]
      if (b + 1 <= hi) {
        if (auto r = descend_leftmost(has, p, h + 1, b + 1, b + size, lo, hi, steps)) return r;
        if (b + size > hi) return std::nullopt;  // clipped miss: nothing left in range
      }
      b += size;
    } else {
      a -= size;
    }
    h >>= 1;
  }
  return std::nullopt;
}

std::optional<std::uint32_t> HeavySummaryIndex::rightmost_colored(std::uint32_t path,
                                                                  std::uint32_t lo,
                                                                  std::uint32_t hi,
                                                                  std::uint32_t c,
                                                                  std::uint64_t& steps) const {
  if (lo > hi) return std::nullopt;
  const std::uint32_t p = seg_leaves_[path];
  auto has = [&](std::uint32_t h) { return seg_has(path, h, c); };
  ++steps;
  if (has(p + hi)) return hi;
  std::uint32_t h = p + hi;
  std::uint32_t a = hi, b = hi;
  while (h > 1) {
    const std::uint32_t size = b - a + 1;
    if ((h & 1u) == 1) {  // right child: sibling covers [a-size, a-1]
      if (a >= 1 && a - 1 >= lo) {
        if (auto r = descend_rightmost(has, p, h - 1, a - size, a - 1, lo, hi, steps)) return r;
        if (a - size < lo) return std::nullopt;
      }
      a -= size;
    } else {
      b += size;
    }
    h >>= 1;
  }
  return std::nullopt;
}

std::optional<Tree::Node> HeavySummaryIndex::firstcolor_impl(Tree::Node v, std::uint32_t c,
                                                             ColorQueryStats* stats) const {
  const Tree& tr = source().tree();
  std::uint64_t steps = 0;
  std::optional<Tree::Node> result;
  Tree::Node cur = v;
  while (true) {
    if (stats) ++stats->path_hops;
    const std::uint32_t p = hpd_.path_id[cur];
    const std::uint32_t i = hpd_.path_pos[cur];
    std::span<const std::uint64_t> pref{prefix_.data() + static_cast<std::size_t>(cur) * stride_,
                                        stride_};
    if (wordops::test_bit(pref, c)) {
      const auto j = rightmost_colored(p, 0, i, c, steps);
      if (!j) inconsistent();
      result = hpd_.paths[p][*j];
      break;
    }
    const Tree::Node head = hpd_.paths[p][0];
    if (head == tr.root()) break;
    cur = tr.parent(head);  // hop to the previous heavy path
  }
  if (stats) {
    stats->balanced_steps += steps;
    stats->balanced_steps_max_call = std::max(stats->balanced_steps_max_call, steps);
  }
  return result;
}

std::optional<Tree::Node> HeavySummaryIndex::lastcolor_impl(Tree::Node u, Tree::Node v,
                                                            std::uint32_t c, bool include_u,
                                                            ColorQueryStats* stats) const {
  const Tree& tr = source().tree();
  std::uint64_t steps = 0;
  std::optional<Tree::Node> result;

  struct Segment {
    std::uint32_t path, lo, hi;
  };
  std::vector<Segment> below;  // segments under u's path, collected bottom-up
  Tree::Node cur = v;
  while (hpd_.path_id[cur] != hpd_.path_id[u]) {
    const std::uint32_t p = hpd_.path_id[cur];
    below.push_back({p, 0, hpd_.path_pos[cur]});
    cur = tr.parent(hpd_.paths[p][0]);
  }

  // Top segment on u's own path; only here can the prefix summary
  // over-approximate (it also covers nodes above u).
  const std::uint32_t pt = hpd_.path_id[u];
  const std::uint32_t lo = hpd_.path_pos[u] + (include_u ? 0 : 1);
  const std::uint32_t hi = hpd_.path_pos[cur];
  if (stats) ++stats->path_hops;
  if (lo <= hi) {
    std::span<const std::uint64_t> pref{
        prefix_.data() + static_cast<std::size_t>(hpd_.paths[pt][hi]) * stride_, stride_};
    if (wordops::test_bit(pref, c)) {
      if (auto j = leftmost_colored(pt, lo, hi, c, steps)) result = hpd_.paths[pt][*j];
    }
  }
  if (!result) {
    for (std::size_t i = below.size(); i-- > 0;) {
      const Segment& s = below[i];
      if (stats) ++stats->path_hops;
      std::span<const std::uint64_t> pref{
          prefix_.data() + static_cast<std::size_t>(hpd_.paths[s.path][s.hi]) * stride_, stride_};
      if (!wordops::test_bit(pref, c)) continue;
      const auto j = leftmost_colored(s.path, s.lo, s.hi, c, steps);
      if (!j) inconsistent();
      result = hpd_.paths[s.path][*j];
      break;
    }
  }
  if (stats) {
    stats->balanced_steps += steps;
    stats->balanced_steps_max_call = std::max(stats->balanced_steps_max_call, steps);
  }
  return result;
}

std::size_t HeavySummaryIndex::index_words() const {
  std::size_t words = prefix_.size() + seg_.size();
  words += (hpd_.is_heavy.size() + 7) / 8;
  words += (hpd_.heavy_child.size() + hpd_.path_id.size() + hpd_.path_pos.size() + 1) / 2;
  std::size_t path_nodes = 0;
  for (const auto& p : hpd_.paths) path_nodes += p.size();
  words += (path_nodes + 1) / 2;
  words += (seg_base_.size() + seg_leaves_.size() + 1) / 2;
  return words;
}

// ---------------------------------------------------------------------------
// MatrixIndex

MatrixIndex::MatrixIndex(const PackedColorTree& source) : ColorQueryEngine(source) {
  const Tree& tr = source.tree();
  t_ = static_cast<std::uint32_t>(tr.node_count());
  words_ = static_cast<std::uint32_t>(words_for_bits(t_));
  order_ = tr.preorder();
  rank_.resize(t_);
  for (std::uint32_t r = 0; r < t_; ++r) rank_[order_[r]] = r;

  // Color rows come from transposing the pre-order (node x color) matrix.
  BitMatrix by_node(t_, source.sigma());
  for (std::uint32_t r = 0; r < t_; ++r) by_node.set_row(r, source.colors(order_[r]));
  const BitMatrix by_color = transpose(by_node);
  color_rows_.assign(static_cast<std::size_t>(source.sigma()) * words_, 0);
  for (std::uint32_t c = 0; c < source.sigma(); ++c) {
    const auto src = by_color.row_words(c);
    std::copy(src.begin(), src.end(), color_rows_.begin() + static_cast<std::size_t>(c) * words_);
  }

  anc_rows_.assign(static_cast<std::size_t>(t_) * words_, 0);
  for (Tree::Node v : order_) {
    if (v == tr.root()) continue;
    const std::uint32_t rv = rank_[v];
    const std::uint32_t rp = rank_[tr.parent(v)];
    std::uint64_t* row = anc_rows_.data() + static_cast<std::size_t>(rv) * words_;
    const std::uint64_t* parent_row = anc_rows_.data() + static_cast<std::size_t>(rp) * words_;
    std::memcpy(row, parent_row, sizeof(std::uint64_t) * words_);
    row[rp / kWordBits] |= std::uint64_t{1} << (rp % kWordBits);
  }
}

void MatrixIndex::colored_ancestors(Tree::Node v, std::uint32_t c,
                                    std::vector<std::uint64_t>& out) const {
  out.assign(words_, 0);
  const std::uint64_t* a = anc_rows_.data() + static_cast<std::size_t>(rank_[v]) * words_;
  const std::uint64_t* m = color_rows_.data() + static_cast<std::size_t>(c) * words_;
  for (std::uint32_t i = 0; i < words_; ++i) out[i] = a[i] & m[i];
  if (source().has_color(v, c)) {
    const std::uint32_t rv = rank_[v];
    out[rv / kWordBits] |= std::uint64_t{1} << (rv % kWordBits);
  }
}

std::optional<Tree::Node> MatrixIndex::firstcolor_impl(Tree::Node v, std::uint32_t c,
                                                       ColorQueryStats*) const {
  std::vector<std::uint64_t> r;
  colored_ancestors(v, c, r);
  // Deepest on the chain = largest pre-order rank.
  const auto idx = wordops::last_set(r);
  if (!idx) return std::nullopt;
  return order_[*idx];
}

std::optional<Tree::Node> MatrixIndex::lastcolor_impl(Tree::Node u, Tree::Node v, std::uint32_t c,
                                                      bool include_u, ColorQueryStats*) const {
  std::vector<std::uint64_t> r;
  colored_ancestors(v, c, r);
  // Shallowest at-or-below u = smallest rank once ranks above u are cleared.
  const std::size_t k = rank_[u] + (include_u ? 0 : 1);
  const auto idx = wordops::first_set_at_or_after(r, k);
  if (!idx) return std::nullopt;
  return order_[*idx];
}

BitString MatrixIndex::ancestors(Tree::Node v) const {
  check_arg(v < t_, "ancestors: node out of range");
  BitString out(t_);
  const std::uint64_t* a = anc_rows_.data() + static_cast<std::size_t>(rank_[v]) * words_;
  for (std::uint32_t i = 0; i < t_; ++i) {
    if ((a[i / kWordBits] >> (i % kWordBits)) & 1u) out.set(i);
  }
  return out;
}

std::size_t MatrixIndex::index_words() const {
  return color_rows_.size() + anc_rows_.size() + (order_.size() + rank_.size() + 1) / 2;
}

// ---------------------------------------------------------------------------
// ClusteredIndex

ClusteredIndex::ClusteredIndex(const PackedColorTree& source, ClusteredFlavor flavor,
                               std::uint32_t cluster_size)
    : ColorQueryEngine(source),
      flavor_(flavor),
      bin_(binarize(source.tree())),
      part_(cluster_partition(
          bin_.tree, std::min<std::uint32_t>(std::max<std::uint32_t>(cluster_size, 1),
                                             static_cast<std::uint32_t>(bin_.tree.node_count())))) {
  const std::uint32_t sigma = source.sigma();
  const BitString empty(sigma);
  auto bin_colors = [&](Tree::Node b) -> const BitString& {
    const Tree::Node orig = bin_.bin_to_orig[b];
    return orig == kNoNode ? empty : source.colors(orig);
  };

  local_id_.assign(bin_.tree.node_count(), kNoNode);
  clusters_.resize(part_.clusters.size());
  for (std::uint32_t ci = 0; ci < part_.clusters.size(); ++ci) {
    Cluster& cl = clusters_[ci];
    cl.to_bin = part_.clusters[ci];
    std::unordered_map<Tree::Node, NodeId> local_of;
    local_of.reserve(cl.to_bin.size());
    for (NodeId j = 0; j < cl.to_bin.size(); ++j) local_of.emplace(cl.to_bin[j], j);

    std::vector<Tree::Node> parents(cl.to_bin.size());
    std::vector<BitString> colors(cl.to_bin.size());
    const Tree::Node root = part_.cluster_root[ci];
    for (NodeId j = 0; j < cl.to_bin.size(); ++j) {
      const Tree::Node b = cl.to_bin[j];
      parents[j] = b == root ? kNoNode : local_of.at(bin_.tree.parent(b));
      colors[j] = bin_colors(b);
      if (part_.home_cluster[b] == ci) local_id_[b] = j;
    }
    cl.root_local = local_of.at(root);
    if (part_.cluster_leaf_boundary[ci] != kNoNode)
      cl.leaf_local = local_of.at(part_.cluster_leaf_boundary[ci]);
    cl.pct = std::make_unique<PackedColorTree>(Tree(std::move(parents)), sigma, std::move(colors));
    if (flavor_ == ClusteredFlavor::LogQuery) {
      cl.engine = std::make_unique<HeavySummaryIndex>(*cl.pct);
    } else {
      cl.engine = std::make_unique<MatrixIndex>(*cl.pct);
    }
  }

  // Macro node colors: summary of the path from the home cluster's root
  // down to the boundary node, endpoints included.
  std::vector<BitString> macro_colors(part_.macro_tree.node_count(), BitString(sigma));
  for (std::size_t m = 1; m < part_.macro_to_node.size(); ++m) {
    const Tree::Node b = part_.macro_to_node[m];
    const std::uint32_t ci = part_.home_cluster[b];
    const Tree::Node top = part_.cluster_root[ci];
    Tree::Node z = b;
    while (true) {
      macro_colors[m] |= bin_colors(z);
      if (z == top) break;
      z = bin_.tree.parent(z);
    }
  }
  macro_pct_ =
      std::make_unique<PackedColorTree>(Tree(part_.macro_tree), sigma, std::move(macro_colors));
  macro_engine_ = std::make_unique<DenseIndex>(*macro_pct_);
  macro_la_ = std::make_unique<LevelAncestorIndex>(part_.macro_tree);
}

std::optional<Tree::Node> ClusteredIndex::cluster_first(std::uint32_t ci, NodeId local,
                                                        std::uint32_t c,
                                                        ColorQueryStats* stats) const {
  if (stats) ++stats->cluster_calls;
  return clusters_[ci].engine->firstcolor(local, c, stats);
}

std::optional<Tree::Node> ClusteredIndex::cluster_last(std::uint32_t ci, NodeId lu, NodeId lv,
                                                       std::uint32_t c, bool include_u,
                                                       ColorQueryStats* stats) const {
  if (stats) ++stats->cluster_calls;
  return clusters_[ci].engine->lastcolor(lu, lv, c, include_u, stats);
}

std::optional<Tree::Node> ClusteredIndex::to_orig(std::uint32_t ci, Tree::Node local) const {
  const Tree::Node b = clusters_[ci].to_bin[local];
  const Tree::Node orig = bin_.bin_to_orig[b];
  if (orig == kNoNode) inconsistent();  // helper nodes carry no colors
  return orig;
}

std::optional<Tree::Node> ClusteredIndex::firstcolor_impl(Tree::Node v, std::uint32_t c,
                                                          ColorQueryStats* stats) const {
  // Original nodes keep their ids in the binarized tree.
  const std::uint32_t ci = part_.home_cluster[v];
  if (auto z = cluster_first(ci, local_id_[v], c, stats)) return to_orig(ci, *z);

  const Tree::Node rho = part_.cluster_root[ci];
  const NodeId m = part_.node_to_macro[rho];
  if (m == kNoNode) return std::nullopt;  // rho is the tree root
  if (stats) ++stats->macro_calls;
  const auto mz = macro_engine_->firstcolor(m, c);
  if (!mz) return std::nullopt;

  const Tree::Node b = part_.macro_to_node[*mz];
  const std::uint32_t cb = part_.home_cluster[b];
  const auto z = cluster_first(cb, local_id_[b], c, stats);
  if (!z) inconsistent();
  return to_orig(cb, *z);
}

std::optional<Tree::Node> ClusteredIndex::lastcolor_impl(Tree::Node u, Tree::Node v,
                                                         std::uint32_t c, bool include_u,
                                                         ColorQueryStats* stats) const {
  const std::uint32_t civ = part_.home_cluster[v];
  const Tree::Node rho1 = part_.cluster_root[civ];

  if (bin_.tree.depth(u) >= bin_.tree.depth(rho1)) {
    // The whole query path lies inside v's home cluster.
    const NodeId lu = u == rho1 ? clusters_[civ].root_local : local_id_[u];
    const auto z = cluster_last(civ, lu, local_id_[v], c, include_u, stats);
    if (!z) return std::nullopt;
    return to_orig(civ, *z);
  }

  // Stage 1: the cluster holding the top segment [u .. its leaf boundary].
  std::uint32_t ca;
  NodeId top_local;
  if (part_.node_to_macro[u] != kNoNode) {
    // u is a boundary node: enter the child cluster towards v.
    const NodeId mu = part_.node_to_macro[u];
    const NodeId m1 = part_.node_to_macro[rho1];
    const Tree::Node mnext = macro_la_->la(m1, macro_la_->depth(mu) + 1);
    const Tree::Node b = part_.macro_to_node[mnext];
    ca = part_.home_cluster[b];
    if (part_.cluster_root[ca] != u) inconsistent();
    top_local = clusters_[ca].root_local;
  } else {
    ca = part_.home_cluster[u];
    top_local = local_id_[u];
  }
  const NodeId leaf_local = clusters_[ca].leaf_local;
  if (leaf_local == kNoNode) inconsistent();
  if (auto z = cluster_last(ca, top_local, leaf_local, c, include_u, stats))
    return to_orig(ca, *z);

  // Stage 2: macro search strictly below the stage-1 cluster's leaf.
  const NodeId ma = part_.node_to_macro[part_.cluster_leaf_boundary[ca]];
  const NodeId mb = part_.node_to_macro[rho1];
  if (stats) ++stats->macro_calls;
  if (auto mz = macro_engine_->lastcolor(ma, mb, c, /*include_u=*/false)) {
    const Tree::Node b = part_.macro_to_node[*mz];
    const std::uint32_t cb = part_.home_cluster[b];
    const auto z = cluster_last(cb, clusters_[cb].root_local, local_id_[b], c, true, stats);
    if (!z) inconsistent();
    return to_orig(cb, *z);
  }

  // Stage 3: v's own cluster.
  const auto z = cluster_last(civ, clusters_[civ].root_local, local_id_[v], c, true, stats);
  if (!z) return std::nullopt;
  return to_orig(civ, *z);
}

std::size_t ClusteredIndex::index_words() const {
  std::size_t words = (local_id_.size() + bin_.bin_to_orig.size() + 1) / 2;
  for (const Cluster& cl : clusters_) {
    words += (cl.to_bin.size() + 1) / 2;
    words += cl.pct->color_words();
    words += cl.engine->index_words();
  }
  std::size_t part_nodes = 0;
  for (const auto& cl : part_.clusters) part_nodes += cl.size();
  words += (part_nodes + 3 * part_.home_cluster.size() + 1) / 2;
  words += macro_pct_->color_words();
  words += macro_engine_->index_words();
  words += macro_la_->index_words();
  words += (part_.macro_to_node.size() + part_.node_to_macro.size() + 1) / 2;
  return words;
}

std::unique_ptr<ColorQueryEngine> make_engine(const PackedColorTree& source, EngineKind kind) {
  switch (kind) {
    case EngineKind::Dense:
      return std::make_unique<DenseIndex>(source);
    case EngineKind::HeavySummary:
      return std::make_unique<HeavySummaryIndex>(source);
    case EngineKind::Matrix:
      return std::make_unique<MatrixIndex>(source);
    case EngineKind::ClusteredLog:
      return std::make_unique<ClusteredIndex>(source, ClusteredFlavor::LogQuery);
    case EngineKind::ClusteredConst:
      return std::make_unique<ClusteredIndex>(source, ClusteredFlavor::ConstQuery);
  }
  check_arg(false, "make_engine: unknown kind");
  return nullptr;
}

}  // namespace slpmatch
