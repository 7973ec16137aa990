#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tdq/error.hpp"

namespace tdq {

// Dyck path C[0..2k] coding a rooted plane tree with k edges:
// C(0)=C(2k)=0, steps +-1, C >= 0.
struct ContourFunction {
  std::vector<std::int32_t> values;
  std::int32_t edge_count() const { return static_cast<std::int32_t>(values.size() - 1) / 2; }

  void validate() const {
    if (values.empty() || values.size() % 2 == 0)
      throw InvalidDyckPath("contour must have odd length 2k+1");
    if (values.front() != 0 || values.back() != 0)
      throw InvalidDyckPath("contour must start and end at 0");
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      if (std::abs(values[i + 1] - values[i]) != 1) throw InvalidDyckPath("steps must be +-1");
      if (values[i] < 0) throw InvalidDyckPath("contour must stay nonnegative");
    }
  }
};

// Rooted plane tree with k edges. Vertices are numbered in preorder (first
// visit by the contour), root = 0; children lists are in contour order.
struct PlaneTree {
  std::vector<std::vector<std::int32_t>> children;
  std::vector<std::int32_t> parent;  // parent[0] = -1

  std::int32_t vertex_count() const { return static_cast<std::int32_t>(children.size()); }
  std::int32_t edge_count() const { return vertex_count() - 1; }

  bool operator==(const PlaneTree& o) const { return children == o.children; }

  std::int32_t depth(std::int32_t v) const {
    std::int32_t d = 0;
    while (parent[v] >= 0) {
      v = parent[v];
      ++d;
    }
    return d;
  }

  // Number of vertices in the subtree rooted at v (preorder numbering makes
  // subtrees contiguous, but we walk explicitly to stay robust).
  std::int32_t subtree_vertex_count(std::int32_t v) const {
    std::int32_t n = 0;
    std::vector<std::int32_t> stack{v};
    while (!stack.empty()) {
      std::int32_t u = stack.back();
      stack.pop_back();
      ++n;
      for (std::int32_t c : children[u]) stack.push_back(c);
    }
    return n;
  }
};

// Contour function of a plane tree: height of the vertex visited at each
// step of the walk around the tree (children taken in list order).
inline ContourFunction contour_of(const PlaneTree& t) {
  ContourFunction c;
  c.values.reserve(2 * t.edge_count() + 1);
  c.values.push_back(0);
  // Iterative contour: (vertex, next child slot, depth).
  struct Frame {
    std::int32_t v, slot, depth;
  };
  std::vector<Frame> stack{{0, 0, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.slot < static_cast<std::int32_t>(t.children[f.v].size())) {
      std::int32_t child = t.children[f.v][f.slot++];
      c.values.push_back(f.depth + 1);
      stack.push_back({child, 0, f.depth + 1});
    } else {
      std::int32_t d = f.depth;
      stack.pop_back();
      if (!stack.empty()) c.values.push_back(d - 1);
    }
  }
  return c;
}

// Inverse bijection. Throws InvalidDyckPath.
inline PlaneTree tree_of(const ContourFunction& c) {
  c.validate();
  PlaneTree t;
  t.children.emplace_back();
  t.parent.push_back(-1);
  std::vector<std::int32_t> stack{0};  // path from root to current vertex
  for (std::size_t i = 0; i + 1 < c.values.size(); ++i) {
    if (c.values[i + 1] > c.values[i]) {
      std::int32_t v = static_cast<std::int32_t>(t.children.size());
      t.children.emplace_back();
      t.parent.push_back(stack.back());
      t.children[stack.back()].push_back(v);
      stack.push_back(v);
    } else {
      stack.pop_back();
    }
  }
  return t;
}

// Vertex visited by the contour at each time 0..2k.
inline std::vector<std::int32_t> contour_vertices(const PlaneTree& t) {
  std::vector<std::int32_t> out;
  out.reserve(2 * t.edge_count() + 1);
  out.push_back(0);
  struct Frame {
    std::int32_t v, slot;
  };
  std::vector<Frame> stack{{0, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.slot < static_cast<std::int32_t>(t.children[f.v].size())) {
      std::int32_t child = t.children[f.v][f.slot++];
      out.push_back(child);
      stack.push_back({child, 0});
    } else {
      stack.pop_back();
      if (!stack.empty()) out.push_back(stack.back().v);
    }
  }
  return out;
}

// d_C(i,j) = C(i) + C(j) - 2 min_{l in [i,j]} C(l); equals the tree distance
// between the vertices visited at times i and j.
inline std::int32_t contour_distance(const ContourFunction& c, std::int32_t i, std::int32_t j) {
  const std::int32_t n = static_cast<std::int32_t>(c.values.size());
  if (i < 0 || j < 0 || i >= n || j >= n) throw IndexOutOfRange("contour_distance index");
  if (i > j) std::swap(i, j);
  std::int32_t lo = c.values[i];
  for (std::int32_t l = i; l <= j; ++l) lo = std::min(lo, c.values[l]);
  return c.values[i] + c.values[j] - 2 * lo;
}

// ---- balanced-parenthesis serialization ----

inline std::string to_parens(const PlaneTree& t) {
  ContourFunction c = contour_of(t);
  std::string s;
  s.reserve(c.values.size() - 1);
  for (std::size_t i = 0; i + 1 < c.values.size(); ++i)
    s.push_back(c.values[i + 1] > c.values[i] ? '(' : ')');
  return s;
}

inline PlaneTree tree_from_parens(const std::string& s) {
  ContourFunction c;
  c.values.push_back(0);
  for (char ch : s) {
    if (ch == '(')
      c.values.push_back(c.values.back() + 1);
    else if (ch == ')')
      c.values.push_back(c.values.back() - 1);
    else if (ch != ' ' && ch != '\n')
      throw ParseError("unexpected character in tree string");
  }
  return tree_of(c);
}

// Tree with a marked corner: the unexplored part of a filled-in exploration
// reattaches as the `slot`-th child of `vertex`.
struct MarkedTree {
  PlaneTree tree;
  std::int32_t marked_vertex = -1;  // -1: dummy mark (whole tree retained)
  std::int32_t marked_slot = 0;
  std::int32_t size() const { return tree.edge_count(); }

  bool operator==(const MarkedTree& o) const {
    return tree == o.tree && marked_vertex == o.marked_vertex && marked_slot == o.marked_slot;
  }
};

// Finite truncation of an infinite (or bi-infinite) tree: a plane tree whose
// spine vertices are listed root-first along the unique long branch.
struct SpineTree {
  PlaneTree tree;
  std::vector<std::int32_t> spine;  // spine[i] = vertex at spine position i
  std::int32_t truncation_depth = 0;
};

enum class ContourKind { excursion, two_sided, bessel_like };

// A +-1 lattice path. `excursion` is pinned at 0 on both ends and
// nonnegative; `two_sided` has values[i] = X(i - n) for two walks glued at
// time 0 (index n); `bessel_like` is strictly positive after time 0.
struct ContourProcess {
  std::vector<std::int32_t> values;
  ContourKind kind = ContourKind::excursion;
};

}  // namespace tdq
