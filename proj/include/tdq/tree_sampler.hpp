#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tdq/contour.hpp"
#include "tdq/error.hpp"
#include "tdq/rng.hpp"

namespace tdq {

// Incremental plane-tree builder with stable node handles; finalize()
// renumbers to the preorder convention of PlaneTree.
class TreeBuilder {
 public:
  std::int32_t add_root() {
    children_.emplace_back();
    parent_.push_back(-1);
    return 0;
  }
  std::int32_t add_child(std::int32_t p) {
    std::int32_t v = static_cast<std::int32_t>(children_.size());
    children_.emplace_back();
    parent_.push_back(p);
    children_[p].push_back(v);
    return v;
  }
  // Inserts at a given slot instead of appending.
  std::int32_t add_child_at(std::int32_t p, std::int32_t slot) {
    std::int32_t v = static_cast<std::int32_t>(children_.size());
    children_.emplace_back();
    parent_.push_back(p);
    children_[p].insert(children_[p].begin() + slot, v);
    return v;
  }

  // Grafts `sub` (all of it, including its root) as the last child of `p`.
  // Returns handle of the grafted subtree root.
  std::int32_t graft(std::int32_t p, const PlaneTree& sub) {
    std::int32_t r = add_child(p);
    graft_children(r, sub, 0);
    return r;
  }
  // Grafts only the children subtrees of sub's root under `p` (used when the
  // hanging tree shares its root with the spine vertex).
  void graft_children(std::int32_t p, const PlaneTree& sub, std::int32_t sub_root) {
    for (std::int32_t c : sub.children[sub_root]) {
      std::int32_t h = add_child(p);
      graft_children(h, sub, c);
    }
  }

  // Preorder renumbering; `handle_to_vertex` maps builder handles to final ids.
  PlaneTree finalize(std::vector<std::int32_t>* handle_to_vertex = nullptr) const {
    PlaneTree t;
    std::vector<std::int32_t> map(children_.size(), -1);
    struct Frame {
      std::int32_t h, slot;
    };
    t.children.emplace_back();
    t.parent.push_back(-1);
    map[0] = 0;
    std::vector<Frame> stack{{0, 0}};
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.slot < static_cast<std::int32_t>(children_[f.h].size())) {
        std::int32_t ch = children_[f.h][f.slot++];
        std::int32_t v = static_cast<std::int32_t>(t.children.size());
        t.children.emplace_back();
        t.parent.push_back(map[f.h]);
        t.children[map[f.h]].push_back(v);
        map[ch] = v;
        stack.push_back({ch, 0});
      } else {
        stack.pop_back();
      }
    }
    if (handle_to_vertex) *handle_to_vertex = map;
    return t;
  }

 private:
  std::vector<std::vector<std::int32_t>> children_;
  std::vector<std::int32_t> parent_;
};

// Uniform Dyck path of length 2k by the cycle lemma: shuffle k up-steps and
// k+1 down-steps, rotate to the unique cyclic shift whose proper prefix sums
// stay above -1, drop the final down-step.
inline ContourFunction sample_uniform_dyck_path(std::int32_t k, Rng& rng) {
  std::vector<std::int8_t> steps(2 * k + 1, -1);
  // Reservoir-free sampling of the k positions holding +1.
  for (std::int32_t i = 0, placed = 0; i < 2 * k + 1 && placed < k; ++i) {
    std::int32_t remaining = 2 * k + 1 - i;
    if (uniform_below(rng, remaining) < static_cast<std::uint64_t>(k - placed)) {
      steps[i] = 1;
      ++placed;
    }
  }
  // First position attaining the minimum prefix sum.
  std::int32_t sum = 0, best = 1, best_pos = -1;
  for (std::int32_t i = 0; i < 2 * k + 1; ++i) {
    sum += steps[i];
    if (sum < best) {
      best = sum;
      best_pos = i;
    }
  }
  ContourFunction c;
  c.values.reserve(2 * k + 1);
  c.values.push_back(0);
  for (std::int32_t i = 0; i < 2 * k; ++i) {
    std::int8_t s = steps[(best_pos + 1 + i) % (2 * k + 1)];
    c.values.push_back(c.values.back() + s);
  }
  return c;
}

// Uniform over the C_k = binom(2k,k)/(k+1) plane trees with k edges.
inline PlaneTree sample_uniform_tree(std::int32_t k, Rng& rng) {
  return tree_of(sample_uniform_dyck_path(k, rng));
}

// Critical geometric Galton-Watson tree (offspring P(j) = 2^-(j+1)) via the
// contour coding: a simple random walk from 0 read until it first hits -1 is
// the contour of the tree, and P(size = n edges) = C_n / 2^(2n+1).
//
// The size has infinite mean; callers that cannot absorb arbitrarily large
// trees pass max_edges >= 0 and handle TooLarge.
inline PlaneTree sample_critical_geometric_gw_tree(Rng& rng, std::int64_t max_edges = -1) {
  ContourFunction c;
  c.values.push_back(0);
  std::int32_t x = 0;
  for (;;) {
    x += coin(rng) ? 1 : -1;
    if (x < 0) break;
    c.values.push_back(x);
    if (max_edges >= 0 && static_cast<std::int64_t>(c.values.size()) > 2 * max_edges + 1)
      throw TooLarge("GW tree exceeded the size cap");
  }
  return tree_of(c);
}

// One step of the Doob h-transform (h(x) = x + 1) of the simple random walk,
// i.e. the walk conditioned to never hit -1. From x: up with probability
// (x+2)/(2(x+1)).
inline std::int32_t h_transform_step(std::int32_t x, Rng& rng) {
  double p_up = static_cast<double>(x + 2) / (2.0 * (x + 1));
  return uniform01(rng) < p_up ? x + 1 : x - 1;
}

// Truncation t_inf(m) of the infinite critical geometric tree: spine
// tau_0..tau_{-m} (m+1 vertices), two independent GW trees hung at each
// spine vertex. spine[i] is the vertex at spine distance i from the root;
// spine_attach[v] is the spine position whose hanging trees contain v.
struct SpineTruncation {
  SpineTree spine_tree;
  std::vector<std::int32_t> spine_attach;
};

inline SpineTruncation sample_infinite_tree_truncation(std::int32_t m, Rng& rng,
                                                       std::int64_t max_hanging_edges = -1) {
  TreeBuilder b;
  std::vector<std::int32_t> spine_handles;
  spine_handles.push_back(b.add_root());
  // Root edge tau_0 -> tau_{-1}: the spine child is the first child of the root.
  for (std::int32_t i = 1; i <= m; ++i) spine_handles.push_back(b.add_child(spine_handles[i - 1]));
  for (std::int32_t i = 0; i <= m; ++i) {
    for (int side = 0; side < 2; ++side) {
      PlaneTree gw = sample_critical_geometric_gw_tree(rng, max_hanging_edges);
      b.graft_children(spine_handles[i], gw, 0);
    }
  }
  std::vector<std::int32_t> handle_to_vertex;
  SpineTruncation out;
  out.spine_tree.tree = b.finalize(&handle_to_vertex);
  out.spine_tree.truncation_depth = m;
  for (std::int32_t i = 0; i <= m; ++i)
    out.spine_tree.spine.push_back(handle_to_vertex[spine_handles[i]]);
  // Attachment positions: every vertex belongs to the hanging trees of the
  // nearest spine ancestor.
  const PlaneTree& t = out.spine_tree.tree;
  out.spine_attach.assign(t.vertex_count(), -1);
  for (std::int32_t i = 0; i <= m; ++i) out.spine_attach[out.spine_tree.spine[i]] = i;
  for (std::int32_t v = 1; v < t.vertex_count(); ++v) {
    if (out.spine_attach[v] >= 0) continue;
    // parent chain is already resolved for preorder-smaller ids except along
    // the spine; walk up until a resolved vertex.
    std::int32_t u = v;
    std::vector<std::int32_t> chain;
    while (out.spine_attach[u] < 0) {
      chain.push_back(u);
      u = t.parent[u];
    }
    for (std::int32_t w : chain) out.spine_attach[w] = out.spine_attach[u];
  }
  return out;
}

// Truncation of the bi-infinite critical geometric tree: two-sided spine
// tau_m..tau_0..tau_{-m} with one GW tree hung at each spine vertex.
// spine[i] holds tau_{m-i}, so the root tau_0 sits at index m.
inline SpineTruncation sample_bi_infinite_tree_truncation(std::int32_t m, Rng& rng,
                                                          std::int64_t max_hanging_edges = -1) {
  TreeBuilder b;
  std::int32_t root = b.add_root();
  std::vector<std::int32_t> neg(m + 1), pos(m + 1);  // neg[i] = tau_{-i}, pos[i] = tau_i
  neg[0] = pos[0] = root;
  for (std::int32_t i = 1; i <= m; ++i) neg[i] = b.add_child(neg[i - 1]);
  for (std::int32_t i = 1; i <= m; ++i)
    pos[i] = (i == 1) ? b.add_child(root) : b.add_child(pos[i - 1]);
  std::vector<std::int32_t> order;  // handles tau_m .. tau_{-m}
  for (std::int32_t i = m; i >= 1; --i) order.push_back(pos[i]);
  for (std::int32_t i = 0; i <= m; ++i) order.push_back(neg[i]);
  for (std::int32_t h : order) {
    PlaneTree gw = sample_critical_geometric_gw_tree(rng, max_hanging_edges);
    b.graft_children(h, gw, 0);
  }
  std::vector<std::int32_t> handle_to_vertex;
  SpineTruncation out;
  out.spine_tree.tree = b.finalize(&handle_to_vertex);
  out.spine_tree.truncation_depth = m;
  for (std::int32_t h : order) out.spine_tree.spine.push_back(handle_to_vertex[h]);
  const PlaneTree& t = out.spine_tree.tree;
  out.spine_attach.assign(t.vertex_count(), -1);
  for (std::size_t i = 0; i < out.spine_tree.spine.size(); ++i)
    out.spine_attach[out.spine_tree.spine[i]] = static_cast<std::int32_t>(i);
  for (std::int32_t v = 1; v < t.vertex_count(); ++v) {
    if (out.spine_attach[v] >= 0) continue;
    std::int32_t u = v;
    std::vector<std::int32_t> chain;
    while (out.spine_attach[u] < 0) {
      chain.push_back(u);
      u = t.parent[u];
    }
    for (std::int32_t w : chain) out.spine_attach[w] = out.spine_attach[u];
  }
  return out;
}

// Lattice-path samplers standing in for the paper-level Brownian objects.
inline ContourProcess sample_contour_process(ContourKind kind, std::int32_t n, Rng& rng) {
  ContourProcess p;
  p.kind = kind;
  switch (kind) {
    case ContourKind::excursion:
      p.values = sample_uniform_dyck_path(n, rng).values;
      break;
    case ContourKind::two_sided: {
      // values[n + t] = X(t) for t in [-n, n], X(0) = 0.
      std::vector<std::int32_t> fwd(n + 1, 0), bwd(n + 1, 0);
      for (std::int32_t i = 1; i <= n; ++i) fwd[i] = fwd[i - 1] + (coin(rng) ? 1 : -1);
      for (std::int32_t i = 1; i <= n; ++i) bwd[i] = bwd[i - 1] + (coin(rng) ? 1 : -1);
      p.values.resize(2 * n + 1);
      for (std::int32_t i = 0; i <= n; ++i) p.values[n - i] = bwd[i];
      for (std::int32_t i = 0; i <= n; ++i) p.values[n + i] = fwd[i];
      break;
    }
    case ContourKind::bessel_like: {
      p.values.resize(n + 1);
      p.values[0] = 0;
      for (std::int32_t i = 1; i <= n; ++i) p.values[i] = h_transform_step(p.values[i - 1], rng);
      break;
    }
  }
  return p;
}

}  // namespace tdq
