#include "slpmatch/tree.hpp"

#include <algorithm>
#include <bit>

namespace slpmatch {

Tree::Tree(std::vector<Node> parent) : parent_(std::move(parent)) {
  const std::size_t t = parent_.size();
  check_arg(t >= 1, "Tree: empty node set");
  check_arg(t < kNoNode, "Tree: too many nodes");

  std::vector<std::uint32_t> child_count(t, 0);
  for (std::size_t v = 0; v < t; ++v) {
    if (parent_[v] == kNoNode) {
      check_arg(root_ == kNoNode, "Tree: more than one root");
      root_ = static_cast<Node>(v);
    } else {
      check_arg(parent_[v] < t, "Tree: parent id out of range");
      check_arg(parent_[v] != v, "Tree: self loop");
      ++child_count[parent_[v]];
    }
  }
  check_arg(root_ != kNoNode, "Tree: no root");

  child_begin_.assign(t + 1, 0);
  for (std::size_t v = 0; v < t; ++v) child_begin_[v + 1] = child_begin_[v] + child_count[v];
  child_flat_.resize(child_begin_[t]);
  std::vector<std::uint32_t> fill(child_begin_.begin(), child_begin_.end() - 1);
  for (std::size_t v = 0; v < t; ++v) {
    if (parent_[v] != kNoNode) child_flat_[fill[parent_[v]]++] = static_cast<Node>(v);
  }

  // Iterative preorder; visiting exactly t nodes also proves acyclicity.
  depth_.assign(t, 0);
  preorder_.reserve(t);
  pre_rank_.assign(t, 0);
  std::vector<Node> stack{root_};
  while (!stack.empty()) {
    const Node v = stack.back();
    stack.pop_back();
    if (v != root_) depth_[v] = depth_[parent_[v]] + 1;
    max_depth_ = std::max(max_depth_, depth_[v]);
    pre_rank_[v] = static_cast<std::uint32_t>(preorder_.size());
    preorder_.push_back(v);
    const auto kids = children(v);
    for (std::size_t i = kids.size(); i-- > 0;) stack.push_back(kids[i]);
  }
  check_arg(preorder_.size() == t, "Tree: disconnected nodes or a cycle");

  pre_out_ = pre_rank_;
  for (std::size_t i = t; i-- > 0;) {
    const Node v = preorder_[i];
    if (v != root_) pre_out_[parent_[v]] = std::max(pre_out_[parent_[v]], pre_out_[v]);
  }
}

std::vector<std::uint64_t> Tree::subtree_sizes() const {
  std::vector<std::uint64_t> size(node_count(), 1);
  for (std::size_t i = node_count(); i-- > 0;) {
    const Node v = preorder_[i];
    if (v != root_) size[parent_[v]] += size[v];
  }
  return size;
}

namespace {

HeavyPathDecomposition decompose_with(const Tree& t, std::span<const std::uint64_t> weight) {
  const std::size_t n = t.node_count();
  HeavyPathDecomposition out;
  out.is_heavy.assign(n, 0);
  out.heavy_child.assign(n, kNoNode);
  out.path_id.assign(n, 0);
  out.path_pos.assign(n, 0);

  for (std::size_t v = 0; v < n; ++v) {
    Tree::Node best = kNoNode;
    std::uint64_t best_w = 0;
    for (Tree::Node c : t.children(static_cast<Tree::Node>(v))) {
      if (best == kNoNode || weight[c] > best_w) {
        best = c;
        best_w = weight[c];
      }
    }
    out.heavy_child[v] = best;
    if (best != kNoNode) out.is_heavy[best] = 1;
  }

  for (Tree::Node v : t.preorder()) {
    if (v != t.root() && out.is_heavy[v]) continue;  // path heads only
    const auto p = static_cast<std::uint32_t>(out.paths.size());
    out.paths.emplace_back();
    Tree::Node w = v;
    while (w != kNoNode) {
      out.path_id[w] = p;
      out.path_pos[w] = static_cast<std::uint32_t>(out.paths[p].size());
      out.paths[p].push_back(w);
      w = out.heavy_child[w];
    }
  }
  return out;
}

}  // namespace

HeavyPathDecomposition heavy_path_decompose(const Tree& t) {
  return decompose_with(t, t.subtree_sizes());
}

HeavyPathDecomposition heavy_path_decompose(const Tree& t,
                                            std::span<const std::uint64_t> subtree_weight) {
  check_arg(subtree_weight.size() == t.node_count(),
            "heavy_path_decompose: weight size mismatch");
  return decompose_with(t, subtree_weight);
}

BinarizedTree binarize(const Tree& t) {
  const std::size_t n = t.node_count();
  std::vector<Tree::Node> parent(n);
  for (std::size_t v = 0; v < n; ++v) parent[v] = t.parent(static_cast<Tree::Node>(v));

  for (std::size_t v = 0; v < n; ++v) {
    const auto kids = t.children(static_cast<Tree::Node>(v));
    if (kids.size() <= 2) continue;
    // v keeps kids[0]; a chain of helper nodes carries the rest.
    Tree::Node chain = static_cast<Tree::Node>(v);
    for (std::size_t i = 1; i + 1 < kids.size(); ++i) {
      const auto helper = static_cast<Tree::Node>(parent.size());
      parent.push_back(chain);
      parent[kids[i]] = helper;
      chain = helper;
    }
    parent[kids.back()] = chain;
  }

  BinarizedTree out{Tree(std::move(parent)), {}, n};
  out.bin_to_orig.assign(out.tree.node_count(), kNoNode);
  for (std::size_t v = 0; v < n; ++v) out.bin_to_orig[v] = static_cast<Tree::Node>(v);
  return out;
}

namespace {

/// Open cluster being grown bottom-up. It is rooted at the node currently
/// being processed; at most one member is a shared leaf boundary, and once
/// the root itself is shared the cluster can only be closed, not merged.
struct OpenCluster {
  std::vector<Tree::Node> nodes;
  Tree::Node bottom = kNoNode;
  bool root_shared = false;
};

}  // namespace

ClusterPartition cluster_partition(const Tree& t, std::uint32_t x) {
  const std::size_t n = t.node_count();
  check_arg(x >= 1 && x <= n, "cluster_partition: x out of range");

  ClusterPartition out;
  out.x = x;
  out.home_cluster.assign(n, kNoNode);

  std::vector<OpenCluster> open(n);
  auto close = [&](Tree::Node root, OpenCluster&& oc) -> std::uint32_t {
    const auto id = static_cast<std::uint32_t>(out.clusters.size());
    out.clusters.push_back(std::move(oc.nodes));
    out.cluster_root.push_back(root);
    out.cluster_leaf_boundary.push_back(oc.bottom);
    return id;
  };

  for (std::size_t i = n; i-- > 0;) {  // reverse preorder: children first
    const Tree::Node v = t.preorder()[i];
    const auto kids = t.children(v);
    check_arg(kids.size() <= 2, "cluster_partition: tree is not binary");

    OpenCluster cur;
    cur.nodes.push_back(v);

    if (kids.size() == 1) {
      const Tree::Node u = kids[0];
      OpenCluster& cu = open[u];
      if (!cu.root_shared && cu.nodes.size() + 1 <= x) {
        cur.nodes.insert(cur.nodes.end(), cu.nodes.begin(), cu.nodes.end());
        cur.bottom = cu.bottom;
      } else {
        close(u, std::move(cu));
        cur.nodes.push_back(u);
        cur.bottom = u;
      }
      open[u] = OpenCluster{};
    } else if (kids.size() == 2) {
      const Tree::Node u1 = kids[0];
      const Tree::Node u2 = kids[1];
      OpenCluster& c1 = open[u1];
      OpenCluster& c2 = open[u2];
      const bool both_fit = !c1.root_shared && !c2.root_shared &&
                            1 + c1.nodes.size() + c2.nodes.size() <= x &&
                            !(c1.bottom != kNoNode && c2.bottom != kNoNode);
      if (both_fit) {
        cur.nodes.insert(cur.nodes.end(), c1.nodes.begin(), c1.nodes.end());
        cur.nodes.insert(cur.nodes.end(), c2.nodes.begin(), c2.nodes.end());
        cur.bottom = c1.bottom != kNoNode ? c1.bottom : c2.bottom;
      } else if (!c1.root_shared && c1.bottom == kNoNode && 2 + c1.nodes.size() <= x) {
        // Merge the left subtree, take u2 in as a leaf boundary.
        close(u2, std::move(c2));
        cur.nodes.insert(cur.nodes.end(), c1.nodes.begin(), c1.nodes.end());
        cur.nodes.push_back(u2);
        cur.bottom = u2;
      } else if (!c2.root_shared && c2.bottom == kNoNode && 2 + c2.nodes.size() <= x) {
        close(u1, std::move(c1));
        cur.nodes.insert(cur.nodes.end(), c2.nodes.begin(), c2.nodes.end());
        cur.nodes.push_back(u1);
        cur.bottom = u1;
      } else {
        // Close both children; the left edge becomes its own cluster so the
        // open one keeps a single leaf boundary.
        close(u1, std::move(c1));
        close(u2, std::move(c2));
        OpenCluster salvage;
        salvage.nodes = {v, u1};
        salvage.bottom = u1;
        close(v, std::move(salvage));
        cur.nodes.push_back(u2);
        cur.bottom = u2;
        cur.root_shared = true;
      }
      open[u1] = OpenCluster{};
      open[u2] = OpenCluster{};
    }

    open[v] = std::move(cur);
  }
  const std::uint32_t top = close(t.root(), std::move(open[t.root()]));

  // Home clusters: the cluster in which a node is not the root.
  for (std::uint32_t ci = 0; ci < out.clusters.size(); ++ci) {
    for (Tree::Node z : out.clusters[ci]) {
      if (z != out.cluster_root[ci]) out.home_cluster[z] = ci;
    }
  }
  out.home_cluster[t.root()] = top;

  // Boundary nodes: members of more than one cluster.
  std::vector<std::uint32_t> membership(n, 0);
  for (const auto& cl : out.clusters)
    for (Tree::Node z : cl) ++membership[z];
  out.is_boundary.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) out.is_boundary[v] = membership[v] > 1 ? 1 : 0;

  // Macro tree: synthetic root (0) plus all boundary nodes; the parent of a
  // boundary node is its nearest boundary strict ancestor.
  out.node_to_macro.assign(n, kNoNode);
  out.macro_to_node.push_back(kNoNode);
  for (Tree::Node v : t.preorder()) {
    if (out.is_boundary[v]) {
      out.node_to_macro[v] = static_cast<NodeId>(out.macro_to_node.size());
      out.macro_to_node.push_back(v);
    }
  }
  std::vector<Tree::Node> macro_parent(out.macro_to_node.size(), kNoNode);
  std::vector<NodeId> nearest(n, 0);  // macro id of nearest boundary ancestor-or-self
  for (Tree::Node v : t.preorder()) {
    const NodeId above = v == t.root() ? 0 : nearest[t.parent(v)];
    if (out.is_boundary[v]) {
      macro_parent[out.node_to_macro[v]] = above;
      nearest[v] = out.node_to_macro[v];
    } else {
      nearest[v] = above;
    }
  }
  out.macro_tree = Tree(std::move(macro_parent));
  return out;
}

std::vector<std::string> check_cluster_partition(const Tree& t, const ClusterPartition& p,
                                                 std::uint32_t size_factor) {
  std::vector<std::string> bad;
  const std::size_t n = t.node_count();
  auto fail = [&](std::string msg) { bad.push_back(std::move(msg)); };

  const std::size_t max_size = static_cast<std::size_t>(size_factor) * p.x;
  const std::size_t max_count = (size_factor * n + p.x - 1) / p.x;
  if (p.clusters.size() > max_count) fail("too many clusters");

  std::vector<std::uint32_t> membership(n, 0);
  std::vector<std::vector<std::uint32_t>> clusters_of(n);
  for (std::uint32_t ci = 0; ci < p.clusters.size(); ++ci) {
    const auto& cl = p.clusters[ci];
    if (cl.empty()) fail("empty cluster");
    if (cl.size() > max_size) fail("cluster too large");
    std::vector<char> in(n, 0);
    for (Tree::Node z : cl) {
      if (in[z]) fail("node repeated inside a cluster");
      in[z] = 1;
      ++membership[z];
      clusters_of[z].push_back(ci);
    }
    const Tree::Node root = p.cluster_root[ci];
    if (!in[root]) fail("cluster root not a member");
    std::size_t boundary_count = 0;
    for (Tree::Node z : cl) {
      if (z != root && (t.parent(z) == kNoNode || !in[t.parent(z)]))
        fail("cluster is not connected");
      bool leaf_in_cluster = true;
      for (Tree::Node c : t.children(z))
        if (in[c]) leaf_in_cluster = false;
      if (p.is_boundary[z]) {
        ++boundary_count;
        if (z != root && !leaf_in_cluster)
          fail("boundary node is neither root nor leaf of its cluster");
      }
    }
    if (boundary_count > 2) fail("cluster has more than two boundary nodes");
    const Tree::Node lb = p.cluster_leaf_boundary[ci];
    if (lb != kNoNode && !in[lb]) fail("leaf boundary not a member");
  }

  for (std::size_t v = 0; v < n; ++v) {
    if (membership[v] == 0) fail("node not covered by any cluster");
    if ((membership[v] > 1) != (p.is_boundary[v] != 0)) fail("boundary flag wrong");
    const std::uint32_t home = p.home_cluster[v];
    if (home == kNoNode || home >= p.clusters.size()) {
      fail("missing home cluster");
    } else {
      bool found = false;
      for (std::uint32_t ci : clusters_of[v])
        if (ci == home) found = true;
      if (!found) fail("home cluster does not contain the node");
      if (v != t.root() && p.cluster_root[home] == v) fail("home cluster has node as root");
    }
  }

  // Pairwise overlap <= 1 node: no pair of clusters may share two nodes.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& cs = clusters_of[v];
    for (std::size_t a = 0; a < cs.size(); ++a)
      for (std::size_t b = a + 1; b < cs.size(); ++b)
        pairs.emplace_back(std::min(cs[a], cs[b]), std::max(cs[a], cs[b]));
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    fail("two clusters overlap in more than one node");

  if (p.macro_tree.node_count() > 2 * p.clusters.size() + 1) fail("macro tree too large");
  if (p.macro_to_node.size() != p.macro_tree.node_count()) fail("macro mapping size");
  for (std::size_t m = 1; m < p.macro_to_node.size(); ++m) {
    const Tree::Node v = p.macro_to_node[m];
    if (v == kNoNode || !p.is_boundary[v]) {
      fail("macro node does not map to a boundary node");
      continue;
    }
    // Parent must be the nearest boundary strict ancestor.
    Tree::Node a = t.parent(v);
    while (a != kNoNode && !p.is_boundary[a]) a = t.parent(a);
    const Tree::Node mp = p.macro_tree.parent(static_cast<Tree::Node>(m));
    if (a == kNoNode) {
      if (mp != 0) fail("macro parent should be the synthetic root");
    } else if (mp == kNoNode || p.macro_to_node[mp] != a) {
      fail("macro parent mismatch");
    }
  }
  return bad;
}

LevelAncestorIndex::LevelAncestorIndex(const Tree& t) {
  const std::size_t n = t.node_count();
  depth_.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) depth_[v] = t.depth(static_cast<Tree::Node>(v));

  const std::uint32_t levels =
      std::max<std::uint32_t>(1, std::bit_width(std::uint32_t{t.max_depth()}));
  up_.assign(levels, std::vector<Tree::Node>(n));
  for (std::size_t v = 0; v < n; ++v) {
    const Tree::Node p = t.parent(static_cast<Tree::Node>(v));
    up_[0][v] = p == kNoNode ? static_cast<Tree::Node>(v) : p;
  }
  for (std::uint32_t k = 1; k < levels; ++k)
    for (std::size_t v = 0; v < n; ++v) up_[k][v] = up_[k - 1][up_[k - 1][v]];
}

Tree::Node LevelAncestorIndex::la(Tree::Node v, std::uint32_t d) const {
  check_arg(v < depth_.size(), "la: node out of range");
  check_arg(d <= depth_[v], "la: depth below the node's depth");
  std::uint32_t delta = depth_[v] - d;
  for (std::uint32_t k = 0; delta != 0; ++k, delta >>= 1) {
    if (delta & 1) v = up_[k][v];
  }
  return v;
}

std::size_t LevelAncestorIndex::index_words() const {
  std::size_t words = (depth_.size() + 1) / 2;
  for (const auto& level : up_) words += (level.size() + 1) / 2;
  return words;
}

}  // namespace slpmatch
