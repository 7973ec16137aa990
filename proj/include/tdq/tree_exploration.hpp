#pragma once

#include <cstdint>
#include <gmpxx.h>

#include <vector>

#include "tdq/contour.hpp"
#include "tdq/error.hpp"

namespace tdq {

inline mpz_class catalan(std::int32_t n) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), 2 * static_cast<unsigned long>(n), static_cast<unsigned long>(n));
  return c / (n + 1);
}

// Removes the strict descendants of v, leaving v as a leaf (preorder ids
// keep subtrees contiguous, so the removed range is (v, v + size)).
inline PlaneTree prune_below(const PlaneTree& t, std::int32_t v) {
  if (v < 0 || v >= t.vertex_count()) throw IndexOutOfRange("prune_below vertex");
  const std::int32_t sz = t.subtree_vertex_count(v) - 1;
  auto remap = [&](std::int32_t u) { return u <= v ? u : u - sz; };
  PlaneTree out;
  for (std::int32_t u = 0; u < t.vertex_count(); ++u) {
    if (u > v && u <= v + sz) continue;
    out.parent.push_back(t.parent[u] < 0 ? -1 : remap(t.parent[u]));
    out.children.emplace_back();
    if (u != v)
      for (std::int32_t c : t.children[u]) out.children.back().push_back(remap(c));
  }
  return out;
}

// Contour time of the corner (vertex, slot): the slot-th visit of the contour
// to that vertex.
inline std::int32_t corner_contour_time(const PlaneTree& t, std::int32_t vertex,
                                        std::int32_t slot) {
  std::vector<std::int32_t> cv = contour_vertices(t);
  std::int32_t seen = 0;
  for (std::size_t i = 0; i < cv.size(); ++i) {
    if (cv[i] == vertex) {
      if (seen == slot) return static_cast<std::int32_t>(i);
      ++seen;
    }
  }
  throw IndexOutOfRange("corner slot");
}

// Ball-growth exploration toward the vertex visited at contour time k,
// stopped at the first radius m where the retained part t^(m) has at least j
// edges. The component of the target vertex above the ball B(m) is removed
// together with everything below its root, but its attachment edge stays:
// the retained tree keeps that root as a marked leaf, and the unexplored
// part re-inserts there as a Dyck excursion of k - r_j edges. When the
// target vertex falls inside the stopping ball the whole tree is returned
// with a dummy mark.
inline MarkedTree explore_tree(const PlaneTree& t, std::int32_t j) {
  const std::int32_t k = t.edge_count();
  if (j < 1 || j > k) throw IndexOutOfRange("explore_tree target size");
  const std::int32_t vbar = contour_vertices(t)[k];
  // Ancestor chain root = chain[0], ..., chain[depth] = vbar.
  std::vector<std::int32_t> chain;
  for (std::int32_t u = vbar; u >= 0; u = t.parent[u]) chain.push_back(u);
  std::reverse(chain.begin(), chain.end());
  const std::int32_t depth = static_cast<std::int32_t>(chain.size()) - 1;
  for (std::int32_t m = 0;; ++m) {
    if (depth <= m) return MarkedTree{t, -1, 0};
    const std::int32_t bud = chain[m + 1];  // root of the component of vbar
    const std::int32_t retained = k - (t.subtree_vertex_count(bud) - 1);
    if (retained >= j) {
      // bud keeps its id: only strictly larger ids are removed.
      return MarkedTree{prune_below(t, bud), bud, 0};
    }
  }
}

// Structural admissibility of a claimed exploration outcome at total size k.
// The mark must sit on a leaf (the attachment point of the unexplored
// excursion) whose corner time p allows the time-k contour vertex of the
// recomposed tree to land in the inserted part: 2 r_j - k <= p <= k. A dummy
// mark is only possible when re-exploring the tree itself retains it whole.
inline bool marked_tree_admissible(const MarkedTree& tj, std::int32_t k) {
  const std::int32_t r = tj.size();
  if (r > k || r < 1) return false;
  if (tj.marked_vertex < 0)
    return r == k && explore_tree(tj.tree, k).marked_vertex < 0;
  if (tj.marked_vertex <= 0 || tj.marked_vertex >= tj.tree.vertex_count()) return false;
  if (!tj.tree.children[tj.marked_vertex].empty() || tj.marked_slot != 0) return false;
  const std::int32_t p = corner_contour_time(tj.tree, tj.marked_vertex, 0);
  return p >= 2 * r - k && p <= k;
}

// P(t_j = tj) for a uniform tree of k edges: C_{k - r_j} / C_k. Exact.
inline mpq_class exploration_probability(const MarkedTree& tj, std::int32_t k) {
  if (!marked_tree_admissible(tj, k))
    throw InadmissibleMarkedTree("not a valid exploration outcome at this size");
  mpq_class q(catalan(k - tj.size()), catalan(k));
  q.canonicalize();
  return q;
}

}  // namespace tdq
