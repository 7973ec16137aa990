#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "tdq/contour.hpp"
#include "tdq/error.hpp"
#include "tdq/half_edge_map.hpp"
#include "tdq/rng.hpp"
#include "tdq/tree_sampler.hpp"

namespace tdq {

// Quadrangulation with a (possibly non-simple) boundary: the root face has
// degree 2p, every other face degree 4, V = f + p + 1. The boundary cycle is
// listed in face order starting at twin(root).
struct GeneralBoundaryQuad {
  HalfEdgeMap map;
  std::vector<std::int32_t> boundary;
  std::int32_t internal_faces = 0;

  std::int32_t half_perimeter() const { return static_cast<std::int32_t>(boundary.size()) / 2; }
};

// Same data with the boundary walk guaranteed to visit 2l distinct vertices.
// boundary_vertices[i] is the vertex carrying boundary label i, walking the
// root face from the root; simple is re-checked at construction.
struct SimpleBoundaryQuad {
  HalfEdgeMap map;
  std::vector<std::int32_t> boundary;
  std::vector<std::int32_t> boundary_vertices;
  std::int32_t internal_faces = 0;
  bool simple = false;

  std::int32_t half_perimeter() const { return static_cast<std::int32_t>(boundary.size()) / 2; }
};

// Does the root-face walk visit as many distinct vertices as it has sides?
inline bool boundary_is_simple(const HalfEdgeMap& m, const std::vector<std::int32_t>& boundary) {
  std::vector<std::int32_t> seen;
  seen.reserve(boundary.size());
  for (std::int32_t e : boundary) seen.push_back(m.origin(e));
  std::sort(seen.begin(), seen.end());
  return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

// Number of quadrangulations with general boundary 2p and f internal faces:
//   3^f (2p)! (2f+p-1)! / (p! (p-1)! f! (f+p+1)!).
inline mpz_class q_count_general(std::int32_t f, std::int32_t p) {
  if (f < 0 || p < 1) throw InadmissibleParameters("need f >= 0 and p >= 1");
  mpz_class num = 1;
  mpz_pow_ui(num.get_mpz_t(), mpz_class(3).get_mpz_t(), f);
  mpz_class fac;
  mpz_fac_ui(fac.get_mpz_t(), 2 * p);
  num *= fac;
  mpz_fac_ui(fac.get_mpz_t(), 2 * f + p - 1);
  num *= fac;
  mpz_class den;
  mpz_fac_ui(den.get_mpz_t(), p);
  mpz_fac_ui(fac.get_mpz_t(), p - 1);
  den *= fac;
  mpz_fac_ui(fac.get_mpz_t(), f);
  den *= fac;
  mpz_fac_ui(fac.get_mpz_t(), f + p + 1);
  den *= fac;
  return num / den;
}

namespace detail {

// Input of the arc construction: p planted plane trees with f edges in
// total, one label increment in {-1,0,+1} per tree edge, and a bridge of p
// up-steps and p down-steps fixing the relative root labels and the root
// position on the boundary.
struct LabeledForest {
  std::vector<PlaneTree> trees;
  std::vector<std::vector<std::int8_t>> deltas;  // deltas[i][v-1]: increment on edge to v
  std::vector<std::int8_t> bridge;               // +-1 steps, length 2p
};

// Uniform forest of p planted plane trees with f total edges by the cycle
// lemma: a cyclic word of f up-steps and f+p down-steps has exactly p
// rotations whose walk stays above -p before the last step; each of those
// decodes into a forest by cutting at the first-passage times.
inline std::vector<PlaneTree> sample_uniform_forest(std::int32_t f, std::int32_t p, Rng& rng) {
  const std::int32_t n = 2 * f + p;
  std::vector<std::int8_t> steps(n, -1);
  for (std::int32_t i = 0, placed = 0; i < n && placed < f; ++i) {
    if (uniform_below(rng, n - i) < static_cast<std::uint64_t>(f - placed)) {
      steps[i] = 1;
      ++placed;
    }
  }
  std::vector<std::int32_t> prefix(n + 1, 0);
  for (std::int32_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + steps[i];
  // Rotation r is good iff its walk stays above -p strictly before its final
  // step. For r = 0 that is min prefix[1..n-1] > -p. For r >= 1 the walk
  // covers prefix[r+1..n] - prefix[r] (including the original endpoint, so
  // prefix[r] < 0 is forced) and, wrapped past the end with an extra -p,
  // prefix[1..r-1] - p - prefix[r].
  const std::int32_t inf = std::numeric_limits<std::int32_t>::max();
  std::vector<std::int32_t> suffix_min(n + 1, inf);  // min prefix[i..n-1]
  for (std::int32_t i = n - 1; i >= 1; --i) suffix_min[i] = std::min(suffix_min[i + 1], prefix[i]);
  std::vector<std::int32_t> good;
  std::int32_t head_min = inf;  // min prefix[1..r-1]
  for (std::int32_t r = 0; r < n; ++r) {
    if (r >= 2) head_min = std::min(head_min, prefix[r - 1]);
    bool ok;
    if (r == 0) {
      ok = suffix_min[1] > -p;
    } else {
      ok = prefix[r] < 0 && (r + 1 > n - 1 || suffix_min[r + 1] > prefix[r] - p) &&
           head_min > prefix[r];
    }
    if (ok) good.push_back(r);
  }
  if (static_cast<std::int32_t>(good.size()) != p)
    throw Error("cycle lemma: expected " + std::to_string(p) + " rotations, found " +
                std::to_string(good.size()));
  std::int32_t r = good[uniform_below(rng, good.size())];
  std::vector<PlaneTree> trees;
  ContourFunction c;
  c.values.push_back(0);
  std::int32_t s = 0, base = 0;
  for (std::int32_t t = 0; t < n; ++t) {
    s += steps[(r + t) % n];
    if (s == base - 1) {  // stem of the current planted tree closes
      trees.push_back(tree_of(c));
      c.values.assign(1, 0);
      base = s;
    } else {
      c.values.push_back(s - base);
    }
  }
  return trees;
}

// Orientation conventions of the arc construction. The defaults are fixed by
// the calibration sweep in the quad sampler tests: with them every built map
// is planar with face degrees {4,...,4, 2p} and the output matches
// exhaustive enumeration.
struct ArcToggles {
  bool delta_ascending = true;    // chords at a corner sorted by cyclic endpoint distance
  bool corners_forward = false;   // corners of a vertex concatenated in reverse contour order
  bool star_first = true;         // the chord to v* sorts before all others at its corner
  bool star_ascending = true;     // rotation at v*: sources by ascending corner index
  bool boundary_via_twin = false;  // boundary face lies through the out-arcs themselves
  bool walk_forward = true;        // boundary face cycle runs along increasing bridge time
};

// Arc construction. Corners of the labeled forest sit on a circle in contour
// order; every corner sends one arc to the next corner (cyclically) carrying
// label one less, corners of minimal label send theirs to an extra vertex
// v*. The arcs form a quadrangulation with boundary 2p and f internal
// faces; the root boundary edge is read off the bridge, whose down-steps
// match the out-arcs of the tree root corners along the boundary face.
inline GeneralBoundaryQuad build_from_labeled_forest(const LabeledForest& lf,
                                                     const ArcToggles& tg = {}) {
  const std::int32_t p = static_cast<std::int32_t>(lf.trees.size());
  std::int32_t f = 0;
  for (const PlaneTree& t : lf.trees) f += t.edge_count();
  const std::int32_t n_corners = 2 * f + p;

  // Root labels: bridge level at each down-step.
  std::vector<std::int32_t> root_labels, descent_pos;
  {
    std::int32_t level = 0;
    for (std::int32_t i = 0; i < 2 * p; ++i) {
      if (lf.bridge[i] < 0) {
        root_labels.push_back(level);
        descent_pos.push_back(i);
      }
      level += lf.bridge[i];
    }
    if (static_cast<std::int32_t>(root_labels.size()) != p)
      throw InadmissibleParameters("bridge must hold p down-steps");
  }

  // Vertex ids: forest vertices tree by tree, v* last.
  std::vector<std::int32_t> vertex_base(p + 1, 0);
  for (std::int32_t i = 0; i < p; ++i)
    vertex_base[i + 1] = vertex_base[i] + lf.trees[i].vertex_count();
  const std::int32_t star = vertex_base[p];

  // Corner sequence: all contour visits of each planted tree (2e+1 corners).
  std::vector<std::int32_t> corner_vertex(n_corners), corner_label(n_corners);
  std::vector<std::vector<std::int32_t>> corners_of_vertex(star);
  std::vector<std::int32_t> first_corner(p);
  std::int32_t idx = 0;
  for (std::int32_t i = 0; i < p; ++i) {
    first_corner[i] = idx;
    std::vector<std::int32_t> vlabel(lf.trees[i].vertex_count());
    vlabel[0] = root_labels[i];
    for (std::int32_t v = 1; v < lf.trees[i].vertex_count(); ++v)
      vlabel[v] = vlabel[lf.trees[i].parent[v]] + lf.deltas[i][v - 1];
    for (std::int32_t v : contour_vertices(lf.trees[i])) {
      corner_vertex[idx] = vertex_base[i] + v;
      corner_label[idx] = vlabel[v];
      corners_of_vertex[corner_vertex[idx]].push_back(idx);
      ++idx;
    }
  }

  const auto [lo_it, hi_it] = std::minmax_element(corner_label.begin(), corner_label.end());
  const std::int32_t min_label = *lo_it;

  // succ[j]: next corner cyclically with label one less; -1 at minimal label.
  std::vector<std::int32_t> succ(n_corners, -1);
  {
    std::vector<std::int32_t> nearest(*hi_it - min_label + 1, -1);
    for (std::int32_t j = 2 * n_corners - 1; j >= 0; --j) {
      std::int32_t jj = j % n_corners;
      std::int32_t rel = corner_label[jj] - min_label;
      if (j < n_corners && rel > 0) succ[jj] = nearest[rel - 1];
      nearest[rel] = jj;
    }
  }

  // Arc j: half-edges 2j (at corner j) and 2j+1 (at succ[j] or v*).
  const std::int32_t n_he = 2 * n_corners;
  std::vector<std::int32_t> twin(n_he), origin(n_he), next(n_he, -1);
  std::vector<std::vector<std::int32_t>> incoming(n_corners);
  for (std::int32_t j = 0; j < n_corners; ++j) {
    twin[2 * j] = 2 * j + 1;
    twin[2 * j + 1] = 2 * j;
    origin[2 * j] = corner_vertex[j];
    origin[2 * j + 1] = succ[j] < 0 ? star : corner_vertex[succ[j]];
    if (succ[j] >= 0) incoming[succ[j]].push_back(j);
  }

  // Rotation at forest vertices: per corner, chord ends sorted by the cyclic
  // distance of the chord's far endpoint (the non-crossing embedding order);
  // the chord to v* pins to one end of its corner. Corners of a vertex
  // concatenate in contour order.
  auto corner_list = [&](std::int32_t j) {
    std::vector<std::pair<std::int64_t, std::int32_t>> keyed;
    if (succ[j] >= 0)
      keyed.push_back({(succ[j] - j + n_corners) % n_corners, 2 * j});
    else
      keyed.push_back({tg.star_first ? 0 : n_corners, 2 * j});
    for (std::int32_t q : incoming[j])
      keyed.push_back({(q - j + n_corners) % n_corners, 2 * q + 1});
    std::sort(keyed.begin(), keyed.end());
    if (!tg.delta_ascending) std::reverse(keyed.begin(), keyed.end());
    std::vector<std::int32_t> ends;
    ends.reserve(keyed.size());
    for (auto& [key, e] : keyed) ends.push_back(e);
    return ends;
  };
  for (std::int32_t v = 0; v < star; ++v) {
    std::vector<std::int32_t> rot;
    std::vector<std::int32_t> cs = corners_of_vertex[v];
    if (!tg.corners_forward) std::reverse(cs.begin(), cs.end());
    for (std::int32_t j : cs)
      for (std::int32_t e : corner_list(j)) rot.push_back(e);
    for (std::size_t i = 0; i < rot.size(); ++i) next[rot[i]] = rot[(i + 1) % rot.size()];
  }
  {
    std::vector<std::int32_t> rot;
    for (std::int32_t j = 0; j < n_corners; ++j)
      if (succ[j] < 0) rot.push_back(2 * j + 1);
    if (!tg.star_ascending) std::reverse(rot.begin(), rot.end());
    for (std::size_t i = 0; i < rot.size(); ++i) next[rot[i]] = rot[(i + 1) % rot.size()];
  }

  // Locate the boundary face: its down-step side for tree i is the out-arc
  // of the last root corner of tree i (the corner carrying the plant). Check
  // the sides align with the bridge's down-steps, then read off the root.
  auto side = [&](std::int32_t i) {
    std::int32_t last = first_corner[i] + 2 * lf.trees[i].edge_count();
    std::int32_t h = 2 * last;
    return tg.boundary_via_twin ? twin[h] : h;
  };
  std::vector<std::int32_t> cycle;
  {
    std::int32_t e = side(0);
    do {
      cycle.push_back(e);
      e = next[twin[e]];
    } while (e != side(0));
  }
  if (static_cast<std::int32_t>(cycle.size()) != 2 * p)
    throw Error("arc construction: boundary cycle of degree " + std::to_string(cycle.size()) +
                ", expected " + std::to_string(2 * p));
  std::vector<std::int32_t> pos_in_cycle(n_he, -1);
  for (std::int32_t i = 0; i < 2 * p; ++i) pos_in_cycle[cycle[i]] = i;
  const std::int32_t dir = tg.walk_forward ? 1 : -1;
  auto mod2p = [&](std::int32_t x) { return ((x % (2 * p)) + 2 * p) % (2 * p); };
  for (std::int32_t i = 0; i < p; ++i)
    if (pos_in_cycle[side(i)] != mod2p(dir * (descent_pos[i] - descent_pos[0])))
      throw Error("arc construction: boundary sides out of alignment with the bridge");
  std::int32_t root_side = cycle[mod2p(dir * (0 - descent_pos[0]))];
  std::int32_t root = twin[root_side];

  BuildResult br = build_map(std::move(twin), std::move(next), std::move(origin), root, star + 1);
  FaceDecomposition fd = faces(br.map);
  if (fd.degrees[fd.root_face] != 2 * p)
    throw Error("arc construction: root face degree " + std::to_string(fd.degrees[fd.root_face]));
  for (std::size_t i = 0; i < fd.degrees.size(); ++i)
    if (static_cast<std::int32_t>(i) != fd.root_face && fd.degrees[i] != 4)
      throw Error("arc construction: internal face of degree " + std::to_string(fd.degrees[i]));

  GeneralBoundaryQuad q;
  q.internal_faces = f;
  q.boundary = fd.faces[fd.root_face];
  auto at = std::find(q.boundary.begin(), q.boundary.end(), br.map.twin(br.map.root()));
  std::rotate(q.boundary.begin(), at, q.boundary.end());
  q.map = std::move(br.map);
  return q;
}

inline LabeledForest sample_labeled_forest(std::int32_t f, std::int32_t p, Rng& rng) {
  LabeledForest lf;
  lf.trees = sample_uniform_forest(f, p, rng);
  lf.bridge.resize(2 * p);
  for (std::int32_t i = 0, placed = 0; i < 2 * p; ++i) {
    bool up = uniform_below(rng, 2 * p - i) < static_cast<std::uint64_t>(p - placed);
    lf.bridge[i] = up ? 1 : -1;
    if (up) ++placed;
  }
  for (const PlaneTree& t : lf.trees) {
    std::vector<std::int8_t> d(t.edge_count());
    for (auto& x : d) x = static_cast<std::int8_t>(uniform_below(rng, 3)) - 1;
    lf.deltas.push_back(std::move(d));
  }
  return lf;
}

// Serialized canonical tables; equal strings iff rooted-isomorphic maps.
inline std::string canonical_key(const HalfEdgeMap& m) {
  std::string s;
  for (std::int32_t e = 0; e < m.half_edge_count(); ++e)
    s += std::to_string(m.twin(e)) + ',' + std::to_string(m.next_at_vertex(e)) + ',' +
         std::to_string(m.origin(e)) + ';';
  return s;
}

inline void enumerate_dyck(std::int32_t k, std::vector<ContourFunction>& out) {
  ContourFunction c;
  c.values.push_back(0);
  auto rec = [&](auto&& self) -> void {
    std::int32_t v = c.values.back();
    std::int32_t left = 2 * k + 1 - static_cast<std::int32_t>(c.values.size());
    if (left == 0) {
      if (v == 0) out.push_back(c);
      return;
    }
    if (v + 1 <= left - 1) {
      c.values.push_back(v + 1);
      self(self);
      c.values.pop_back();
    }
    if (v >= 1) {
      c.values.push_back(v - 1);
      self(self);
      c.values.pop_back();
    }
  };
  rec(rec);
}

}  // namespace detail

// Uniform quadrangulation with general boundary 2p and f internal faces via
// the labeled-forest construction: uniform forest (p planted trees, f
// edges), iid edge increments in {-1,0,+1}, uniform bridge (p up and p down
// steps). The construction also points a vertex v*, which is forgotten;
// V = f + p + 1 is constant across the family, so the marginal stays uniform.
inline GeneralBoundaryQuad sample_general_boundary_quad(std::int32_t f, std::int32_t p, Rng& rng) {
  if (f < 0 || p < 1) throw InadmissibleParameters("need f >= 0 and p >= 1");
  return detail::build_from_labeled_forest(detail::sample_labeled_forest(f, p, rng));
}

// Exhaustive list of the quadrangulations with general boundary 2p and f
// internal faces, one representative per rooted isomorphism class, built by
// pushing every (forest, labels, bridge) triple through the arc
// construction. Each class must arise exactly f+p+1 times (once per choice
// of v*) and the class count must match the closed form; anything else
// throws.
inline std::vector<GeneralBoundaryQuad> enumerate_general_boundary_quads(std::int32_t f,
                                                                         std::int32_t p) {
  if (f < 0 || p < 1) throw InadmissibleParameters("need f >= 0 and p >= 1");
  if (2 * f + p > 12) throw TooLarge("enumeration limited to 2f + p <= 12 edges");

  std::vector<std::vector<PlaneTree>> tree_lists(f + 1);
  for (std::int32_t k = 0; k <= f; ++k) {
    std::vector<ContourFunction> dyck;
    detail::enumerate_dyck(k, dyck);
    for (const ContourFunction& c : dyck) tree_lists[k].push_back(tree_of(c));
  }
  std::vector<detail::LabeledForest> forests;
  std::vector<PlaneTree> cur;
  auto rec_forest = [&](auto&& self, std::int32_t remaining) -> void {
    if (static_cast<std::int32_t>(cur.size()) == p) {
      if (remaining == 0) {
        detail::LabeledForest lf;
        lf.trees = cur;
        forests.push_back(std::move(lf));
      }
      return;
    }
    bool last_slot = static_cast<std::int32_t>(cur.size()) == p - 1;
    for (std::int32_t k = last_slot ? remaining : 0; k <= remaining; ++k) {
      for (const PlaneTree& t : tree_lists[k]) {
        cur.push_back(t);
        self(self, remaining - k);
        cur.pop_back();
      }
    }
  };
  rec_forest(rec_forest, f);

  std::vector<std::vector<std::int8_t>> bridges;
  std::vector<std::int8_t> bsteps;
  auto rec_bridge = [&](auto&& self, std::int32_t ups, std::int32_t downs) -> void {
    if (ups + downs == 0) {
      bridges.push_back(bsteps);
      return;
    }
    for (std::int8_t s : {std::int8_t{1}, std::int8_t{-1}}) {
      if (s > 0 ? ups == 0 : downs == 0) continue;
      bsteps.push_back(s);
      self(self, ups - (s > 0), downs - (s < 0));
      bsteps.pop_back();
    }
  };
  rec_bridge(rec_bridge, p, p);

  std::map<std::string, std::pair<GeneralBoundaryQuad, std::int64_t>> classes;
  for (detail::LabeledForest& lf : forests) {
    lf.deltas.clear();
    for (const PlaneTree& t : lf.trees) lf.deltas.emplace_back(t.edge_count(), -1);
    auto rec_delta = [&](auto&& self, std::int32_t ti, std::int32_t ei) -> void {
      while (ti < p && ei >= static_cast<std::int32_t>(lf.deltas[ti].size())) {
        ++ti;
        ei = 0;
      }
      if (ti == p) {
        for (const auto& b : bridges) {
          lf.bridge = b;
          GeneralBoundaryQuad q = detail::build_from_labeled_forest(lf);
          auto [it, fresh] = classes.try_emplace(detail::canonical_key(q.map), q, 0);
          it->second.second++;
        }
        return;
      }
      for (std::int8_t d : {-1, 0, 1}) {
        lf.deltas[ti][ei] = d;
        self(self, ti, ei + 1);
      }
    };
    rec_delta(rec_delta, 0, 0);
  }

  std::vector<GeneralBoundaryQuad> out;
  for (auto& [key, entry] : classes) {
    if (entry.second != f + p + 1)
      throw Error("enumeration: class multiplicity " + std::to_string(entry.second) +
                  ", expected " + std::to_string(f + p + 1));
    out.push_back(std::move(entry.first));
  }
  if (mpz_class(static_cast<long>(out.size())) != q_count_general(f, p))
    throw Error("enumeration: " + std::to_string(out.size()) + " classes, expected " +
                q_count_general(f, p).get_str());
  return out;
}

// Independent oracle for tiny sizes: glue f quadrilaterals and one 2p-gon
// along all side pairings, keep the planar connected outcomes, root on the
// 2p-gon, deduplicate up to rooted isomorphism. Shares nothing with the arc
// construction beyond the map validator.
inline std::vector<GeneralBoundaryQuad> enumerate_boundary_quads_by_gluing(std::int32_t f,
                                                                           std::int32_t p) {
  if (f < 0 || p < 1) throw InadmissibleParameters("need f >= 0 and p >= 1");
  const std::int32_t n_sides = 4 * f + 2 * p;
  if (n_sides > 16) throw TooLarge("polygon gluing limited to 4f + 2p <= 16 sides");

  std::vector<std::int32_t> polygon_next(n_sides);
  for (std::int32_t i = 0; i < 2 * p; ++i) polygon_next[i] = (i + 1) % (2 * p);
  for (std::int32_t q = 0; q < f; ++q) {
    std::int32_t base = 2 * p + 4 * q;
    for (std::int32_t i = 0; i < 4; ++i) polygon_next[base + i] = base + (i + 1) % 4;
  }

  std::map<std::string, GeneralBoundaryQuad> classes;
  std::vector<std::int32_t> match(n_sides, -1);
  auto process = [&]() {
    std::vector<std::int32_t> twin = match, next(n_sides), origin(n_sides, -1);
    for (std::int32_t e = 0; e < n_sides; ++e) next[e] = polygon_next[match[e]];
    std::int32_t vx = 0;
    for (std::int32_t e = 0; e < n_sides; ++e) {
      if (origin[e] >= 0) continue;
      std::int32_t x = e;
      do {
        origin[x] = vx;
        x = next[x];
      } while (x != e);
      ++vx;
    }
    for (std::int32_t s = 0; s < 2 * p; ++s) {
      try {
        BuildResult br = build_map(twin, next, origin, match[s], vx);
        FaceDecomposition fd = faces(br.map);
        if (fd.degrees[fd.root_face] != 2 * p) continue;
        GeneralBoundaryQuad q;
        q.internal_faces = f;
        q.boundary = fd.faces[fd.root_face];
        auto at = std::find(q.boundary.begin(), q.boundary.end(), br.map.twin(br.map.root()));
        std::rotate(q.boundary.begin(), at, q.boundary.end());
        q.map = std::move(br.map);
        classes.try_emplace(detail::canonical_key(q.map), std::move(q));
      } catch (const Disconnected&) {
      } catch (const NonPlanar&) {
      }
    }
  };
  auto rec = [&](auto&& self, std::int32_t first) -> void {
    while (first < n_sides && match[first] >= 0) ++first;
    if (first == n_sides) {
      process();
      return;
    }
    for (std::int32_t t = first + 1; t < n_sides; ++t) {
      if (match[t] >= 0) continue;
      match[first] = t;
      match[t] = first;
      self(self, first + 1);
      match[t] = -1;
    }
    match[first] = -1;
  };
  rec(rec, 0);

  std::vector<GeneralBoundaryQuad> out;
  out.reserve(classes.size());
  for (auto& [key, q] : classes) out.push_back(std::move(q));
  return out;
}

}  // namespace tdq
