#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "tdq/contour.hpp"
#include "tdq/error.hpp"
#include "tdq/half_edge_map.hpp"
#include "tdq/simple_core.hpp"

namespace tdq {

// A quadrangulation together with a distinguished tree submap containing the
// root edge. The map is stored canonically, so tree_half_edges (sorted,
// closed under twin) and the contour curve are reproducible ids.
struct TreeDecoratedQuad {
  HalfEdgeMap map;
  std::vector<std::int32_t> tree_half_edges;
  std::vector<std::int32_t> contour_curve;  // vertex visited at contour time n, length 2k

  std::int32_t tree_edge_count() const {
    return static_cast<std::int32_t>(tree_half_edges.size()) / 2;
  }
};

// Records how the boundary was identified: every boundary label is mapped to
// its glued vertex; for a full gluing of a 2k-boundary the labels fall into
// exactly k+1 classes, the zero-sets of the contour pseudo-distance.
struct GluingCertificate {
  std::vector<std::int32_t> vertex_class_map;
  std::int32_t class_count = 0;
};

namespace detail {

// Partner of each contour step: the other traversal of the same tree edge.
inline std::vector<std::int32_t> dyck_matching(const ContourFunction& c) {
  const std::int32_t n = static_cast<std::int32_t>(c.values.size()) - 1;
  std::vector<std::int32_t> match(n, -1), stack;
  for (std::int32_t s = 0; s < n; ++s) {
    if (c.values[s + 1] > c.values[s]) {
      stack.push_back(s);
    } else {
      if (stack.empty()) throw InvalidDyckPath("unmatched down-step");
      match[s] = stack.back();
      match[stack.back()] = s;
      stack.pop_back();
    }
  }
  if (!stack.empty()) throw InvalidDyckPath("unmatched up-step");
  return match;
}

// Shared surgery behind glue and glue_extended. The contour is zipped onto
// the boundary from the root edge in both directions: step s < T lands on
// boundary edge s, step s >= T on boundary edge 2L-2k+s, so the two fronts
// meet at contour time T. With 2L = 2k every T gives the same (full) gluing;
// with 2L > 2k the middle stretch of the boundary stays unglued and hangs at
// the image of the meeting corner.
//
// Per glued class, the rotation is the splice of the member corners' fans in
// decreasing contour-time order; each tree edge keeps the two interior
// twins of its boundary edges as its half-edge pair. The decreasing order is
// forced by planarity: each corner must sit between the tree edge it arrives
// by and the one it leaves by, and the fans keep the host's orientation.
inline std::pair<TreeDecoratedQuad, GluingCertificate> splice_gluing(const SimpleBoundaryQuad& q,
                                                                     const ContourFunction& c,
                                                                     std::int32_t T) {
  const HalfEdgeMap& m = q.map;
  const std::int32_t two_l = static_cast<std::int32_t>(q.boundary.size());
  const std::int32_t k = c.edge_count();
  const std::int32_t two_k = 2 * k;
  if (k < 1) throw InadmissibleParameters("the decoration needs at least the root edge");
  if (!q.simple) throw InadmissibleParameters("gluing needs a simple boundary");

  PlaneTree t = tree_of(c);
  std::vector<std::int32_t> cv = contour_vertices(t);  // vertex at contour time, length 2k+1
  std::vector<std::int32_t> match = dyck_matching(c);
  auto blab = [&](std::int32_t s) { return s < T ? s : two_l - two_k + s; };

  // Corner entries per tree vertex: (contour time, boundary label). The
  // meeting corner T owns the two ends of the unglued stretch.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> corners(t.vertex_count());
  for (std::int32_t n = 0; n < two_k; ++n) corners[cv[n]].push_back({n, blab(n)});
  if (two_l > two_k && T < two_k) corners[cv[T]].push_back({T, T});

  const std::int32_t n_he = m.half_edge_count();
  std::vector<std::int32_t> nxt(n_he), twn(n_he);
  for (std::int32_t e = 0; e < n_he; ++e) {
    nxt[e] = m.next_at_vertex(e);
    twn[e] = m.twin(e);
  }
  std::vector<char> removed(n_he, 0);
  auto edge_glued = [&](std::int32_t lab) { return lab < T || lab >= two_l - two_k + T; };
  for (std::int32_t lab = 0; lab < two_l; ++lab)
    if (edge_glued(lab)) removed[q.boundary[lab]] = 1;

  for (std::int32_t s = 0; s < two_k; ++s) {
    if (s > match[s]) continue;
    std::int32_t a = m.twin(q.boundary[blab(s)]);
    std::int32_t b = m.twin(q.boundary[blab(match[s])]);
    twn[a] = b;
    twn[b] = a;
  }

  for (std::int32_t v = 0; v < t.vertex_count(); ++v) {
    auto& cs = corners[v];
    std::sort(cs.begin(), cs.end());
    std::reverse(cs.begin(), cs.end());
    std::vector<std::pair<std::int32_t, std::int32_t>> blocks;  // (first, last) of each fan
    for (auto [time, lab] : cs) {
      std::int32_t e = q.boundary[lab];
      std::int32_t first = removed[e] ? m.next_at_vertex(e) : e;
      std::int32_t last = m.twin(q.boundary[(lab + two_l - 1) % two_l]);
      blocks.push_back({first, last});
    }
    for (std::size_t i = 0; i < blocks.size(); ++i)
      nxt[blocks[i].second] = blocks[(i + 1) % blocks.size()].first;
  }

  // New vertex ids: tree vertices first, untouched host vertices after.
  std::vector<std::int32_t> vclass(m.vertex_count(), -1);
  for (std::int32_t v = 0; v < t.vertex_count(); ++v)
    for (auto [time, lab] : corners[v]) vclass[q.boundary_vertices[lab]] = v;
  std::vector<std::int32_t> new_vx(m.vertex_count(), -1);
  std::int32_t nv = t.vertex_count();
  for (std::int32_t v = 0; v < m.vertex_count(); ++v)
    new_vx[v] = vclass[v] >= 0 ? vclass[v] : nv++;

  std::vector<std::int32_t> idx(n_he, -1);
  std::int32_t hn = 0;
  for (std::int32_t e = 0; e < n_he; ++e)
    if (!removed[e]) idx[e] = hn++;
  std::vector<std::int32_t> twin2(hn), next2(hn), origin2(hn);
  for (std::int32_t e = 0; e < n_he; ++e) {
    if (removed[e]) continue;
    twin2[idx[e]] = idx[twn[e]];
    next2[idx[e]] = idx[nxt[e]];
    origin2[idx[e]] = new_vx[m.origin(e)];
  }
  std::int32_t root = idx[m.twin(q.boundary[blab(match[0])])];
  BuildResult br = build_map(std::move(twin2), std::move(next2), std::move(origin2), root, nv);

  TreeDecoratedQuad out;
  out.tree_half_edges.reserve(two_k);
  for (std::int32_t s = 0; s < two_k; ++s)
    out.tree_half_edges.push_back(br.he_perm[idx[m.twin(q.boundary[blab(s)])]]);
  std::sort(out.tree_half_edges.begin(), out.tree_half_edges.end());
  out.contour_curve.reserve(two_k);
  for (std::int32_t n = 0; n < two_k; ++n) out.contour_curve.push_back(br.vx_perm[cv[n]]);
  out.map = std::move(br.map);

  GluingCertificate cert;
  cert.vertex_class_map.reserve(two_l);
  for (std::int32_t lab = 0; lab < two_l; ++lab)
    cert.vertex_class_map.push_back(br.vx_perm[new_vx[q.boundary_vertices[lab]]]);
  cert.class_count = k + 1;
  return {std::move(out), std::move(cert)};
}

// Key that separates rooted isomorphism classes of decorated quads: the map
// is canonically labeled, so the decoration ids are comparable directly.
inline std::string decorated_key(const TreeDecoratedQuad& d) {
  std::string s = canonical_key(d.map) + '#';
  for (std::int32_t e : d.tree_half_edges) s += std::to_string(e) + ',';
  return s;
}

}  // namespace detail

// Gluing bijection: identify the boundary vertices of q through the contour
// pseudo-distance of t (labels at zero pseudo-distance collapse), folding the
// 2k boundary edges pairwise into the k edges of a copy of t. The output is
// rooted at the image of the tree's root edge.
inline std::pair<TreeDecoratedQuad, GluingCertificate> glue(const SimpleBoundaryQuad& q,
                                                            const PlaneTree& t) {
  if (q.half_perimeter() != t.edge_count())
    throw SizeMismatch("boundary half-perimeter " + std::to_string(q.half_perimeter()) +
                       " vs tree size " + std::to_string(t.edge_count()));
  if (q.map.edge_count() == 1) {
    // Face-free host: the boundary edge is its own interior, and folding it
    // onto the one-edge tree returns the host itself, fully decorated.
    TreeDecoratedQuad d;
    d.map = q.map;
    d.tree_half_edges = {0, 1};
    d.contour_curve = {q.map.root_vertex(), q.map.target(q.map.root())};
    GluingCertificate cert;
    cert.vertex_class_map = {q.boundary_vertices[0], q.boundary_vertices[1]};
    cert.class_count = 2;
    return {std::move(d), std::move(cert)};
  }
  ContourFunction c = contour_of(t);
  return detail::splice_gluing(q, c, 2 * t.edge_count());
}

// Inverse of glue: walk the decoration's contour and unfold every tree edge
// into a pair of boundary edges.
inline std::pair<SimpleBoundaryQuad, PlaneTree> cut(const TreeDecoratedQuad& d) {
  const HalfEdgeMap& m = d.map;
  const std::int32_t n_he = m.half_edge_count();
  std::vector<char> is_tree(n_he, 0);
  for (std::int32_t e : d.tree_half_edges) {
    if (e < 0 || e >= n_he || is_tree[e]) throw DecorationNotATree("bad decoration half-edge");
    is_tree[e] = 1;
  }
  for (std::int32_t e : d.tree_half_edges)
    if (!is_tree[m.twin(e)]) throw DecorationNotATree("decoration not closed under twin");
  const std::int32_t k = d.tree_edge_count();
  if (k < 1 || static_cast<std::int32_t>(d.tree_half_edges.size()) != 2 * k)
    throw DecorationNotATree("decoration must carry at least the root edge");
  if (!is_tree[m.root()]) throw DecorationNotATree("decoration must contain the root edge");
  if (m.edge_count() == 1) {
    ContourFunction c1;
    c1.values = {0, 1, 0};
    return {detail::make_simple(m), tree_of(c1)};
  }

  std::vector<std::int32_t> prev(n_he);
  for (std::int32_t e = 0; e < n_he; ++e) prev[m.next_at_vertex(e)] = e;

  // Contour walk: traverse the root half-edge, then repeatedly scan the
  // rotation backwards from the arrival twin until the next decoration
  // half-edge; the scanned interior half-edges form the corner's fan
  // (collected here in reverse of their unfolded rotation order).
  const std::int32_t two_k = 2 * k;
  std::vector<std::int32_t> walk(two_k, -1);
  std::vector<std::vector<std::int32_t>> fan(two_k);
  std::vector<char> traversed(n_he, 0);
  ContourFunction c;
  c.values.assign(two_k + 1, 0);
  std::int32_t h = m.root();
  for (std::int32_t s = 0; s < two_k; ++s) {
    if (traversed[h]) throw DecorationNotATree("decoration contains a cycle");
    walk[s] = h;
    traversed[h] = 1;
    c.values[s + 1] = c.values[s] + (traversed[m.twin(h)] ? -1 : 1);
    std::int32_t x = prev[m.twin(h)];
    while (!is_tree[x]) {
      fan[(s + 1) % two_k].push_back(x);
      x = prev[x];
    }
    h = x;
  }
  if (h != m.root() || c.values[two_k] != 0)
    throw DecorationNotATree("decoration is not a connected tree submap");

  // Unfold: new outer half-edges e_s (ids n_he + s); the interior twin of
  // boundary edge s is the decoration half-edge traversed at the partner
  // step, its twin in d.
  std::vector<std::int32_t> twin2(n_he + two_k), next2(n_he + two_k), origin2(n_he + two_k, -1);
  for (std::int32_t e = 0; e < n_he; ++e) {
    twin2[e] = m.twin(e);
    next2[e] = m.next_at_vertex(e);
  }
  auto outer = [&](std::int32_t s) { return n_he + ((s % two_k) + two_k) % two_k; };
  for (std::int32_t s = 0; s < two_k; ++s) {
    std::int32_t inner = m.twin(walk[s]);
    twin2[outer(s)] = inner;
    twin2[inner] = outer(s);
  }
  // Rotation at boundary label s: outer(s), fan(s) in unfolded order, then
  // the arrival half twin2[outer(s-1)].
  for (std::int32_t s = 0; s < two_k; ++s) {
    std::int32_t arrival = twin2[outer(s - 1)];
    std::int32_t at = outer(s);
    for (auto it = fan[s].rbegin(); it != fan[s].rend(); ++it) {
      next2[at] = *it;
      at = *it;
    }
    next2[at] = arrival;
    next2[arrival] = outer(s);
    origin2[outer(s)] = s;
    for (std::int32_t x : fan[s]) origin2[x] = s;
    origin2[arrival] = s;
  }
  std::int32_t nv = two_k;
  for (std::int32_t e = 0; e < n_he; ++e) {
    if (origin2[e] >= 0) continue;
    std::int32_t x = e;
    do {
      origin2[x] = nv;
      x = next2[x];
    } while (x != e);
    ++nv;
  }
  std::int32_t root = twin2[outer(two_k - 1)];
  BuildResult br = build_map(std::move(twin2), std::move(next2), std::move(origin2), root, nv);
  SimpleBoundaryQuad q = detail::make_simple(std::move(br.map));
  if (!q.simple) throw DecorationNotATree("unfolded boundary is not simple");
  return {std::move(q), tree_of(c)};
}

// Window produced by the two-sided extended gluing of a spine tree onto a
// long simple boundary: the decoration carries the whole (truncated) tree,
// and the unconsumed middle of the boundary survives as the window's edge.
struct GluedWindow {
  TreeDecoratedQuad window;
  GluingCertificate certificate;
  std::vector<std::int32_t> spine_images;  // glued vertex id per spine position
};

// Extended gluing: zip the tree contour onto the boundary from the root edge
// in both directions at once; the fronts meet at the first visit of the
// spine tip. On a boundary of exactly matching size this reproduces glue.
inline GluedWindow glue_extended(const SimpleBoundaryQuad& q, const SpineTree& t) {
  const std::int32_t k = t.tree.edge_count();
  if (t.spine.empty()) throw InadmissibleParameters("spine tree without a spine");
  if (q.half_perimeter() < k)
    throw WindowTooShort("boundary half-perimeter " + std::to_string(q.half_perimeter()) +
                         " cannot host a tree of size " + std::to_string(k));
  ContourFunction c = contour_of(t.tree);
  std::vector<std::int32_t> cv = contour_vertices(t.tree);
  std::int32_t T = -1;
  for (std::int32_t n = 0; n <= 2 * k; ++n)
    if (cv[n] == t.spine.back()) {
      T = n;
      break;
    }
  if (T < 0) throw InadmissibleParameters("spine tip not in the tree");
  auto [win, cert] = detail::splice_gluing(q, c, T);
  GluedWindow out;
  for (std::int32_t v : t.spine) {
    std::int32_t time = -1;
    for (std::int32_t n = 0; n <= 2 * k && time < 0; ++n)
      if (cv[n] == v) time = n;
    out.spine_images.push_back(win.contour_curve[time % (2 * k)]);
  }
  out.window = std::move(win);
  out.certificate = std::move(cert);
  return out;
}

// Chain pseudo-distance on the pre-gluing quad: shortest paths that may jump
// for free between identified boundary vertices. Computed as 0/1-weight BFS;
// equals the graph distance on the glued map between the images of x and y.
inline std::int32_t quotient_chain_distance(const SimpleBoundaryQuad& q,
                                            const GluingCertificate& cert, std::int32_t x,
                                            std::int32_t y) {
  const HalfEdgeMap& m = q.map;
  if (x < 0 || x >= m.vertex_count() || y < 0 || y >= m.vertex_count())
    throw IndexOutOfRange("vertex out of range");
  // Chain identified vertices with zero-cost links through their class.
  std::vector<std::vector<std::int32_t>> buckets;
  std::vector<std::int32_t> bucket_id;
  for (std::size_t lab = 0; lab < cert.vertex_class_map.size(); ++lab) {
    std::int32_t cls = cert.vertex_class_map[lab];
    auto it = std::find(bucket_id.begin(), bucket_id.end(), cls);
    std::size_t b;
    if (it == bucket_id.end()) {
      b = bucket_id.size();
      bucket_id.push_back(cls);
      buckets.emplace_back();
    } else {
      b = static_cast<std::size_t>(it - bucket_id.begin());
    }
    std::int32_t v = q.boundary_vertices[lab];
    if (buckets[b].empty() || buckets[b].back() != v) buckets[b].push_back(v);
  }
  std::vector<std::vector<std::int32_t>> zero_links(m.vertex_count());
  for (const auto& b : buckets)
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      zero_links[b[i]].push_back(b[i + 1]);
      zero_links[b[i + 1]].push_back(b[i]);
    }
  std::vector<std::int32_t> dist(m.vertex_count(), -1);
  std::deque<std::int32_t> dq{x};
  dist[x] = 0;
  while (!dq.empty()) {
    std::int32_t v = dq.front();
    dq.pop_front();
    for (std::int32_t u : zero_links[v])
      if (dist[u] < 0 || dist[u] > dist[v]) {
        dist[u] = dist[v];
        dq.push_front(u);
      }
    m.for_half_edges_at(v, [&](std::int32_t e) {
      std::int32_t u = m.target(e);
      if (dist[u] < 0 || dist[u] > dist[v] + 1) {
        dist[u] = dist[v] + 1;
        dq.push_back(u);
      }
    });
  }
  return dist[y];
}

}  // namespace tdq
