#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tdq/boundary_quad.hpp"
#include "tdq/error.hpp"
#include "tdq/half_edge_map.hpp"
#include "tdq/rng.hpp"

namespace tdq {

namespace detail {

// Wraps a canonical map whose root face is known to be simple. The boundary
// is rotated so that label 0 is the root vertex: the cycle starts at the
// boundary edge leaving the root vertex, which follows twin(root) in the
// root face walk.
inline SimpleBoundaryQuad make_simple(HalfEdgeMap m) {
  FaceDecomposition fd = faces(m);
  SimpleBoundaryQuad s;
  s.boundary = fd.faces[fd.root_face];
  auto at = std::find(s.boundary.begin(), s.boundary.end(), m.next_at_vertex(m.root()));
  std::rotate(s.boundary.begin(), at, s.boundary.end());
  s.internal_faces = static_cast<std::int32_t>(fd.faces.size()) - 1;
  s.simple = boundary_is_simple(m, s.boundary);
  s.boundary_vertices.reserve(s.boundary.size());
  for (std::int32_t e : s.boundary) s.boundary_vertices.push_back(m.origin(e));
  s.map = std::move(m);
  return s;
}

}  // namespace detail

// A component cut off at a boundary pinch point. he_to_parent carries its
// half-edges back to ids of the decomposed map.
struct PrunedPart {
  HalfEdgeMap map;
  std::vector<std::int32_t> he_to_parent;
  std::int32_t attach_vertex = -1;  // pinch vertex, parent map id
};

// Lossless decomposition of a general-boundary quad: the simple-boundary
// component holding the root edge plus the pruned pieces and the splice data
// needed to sew everything back (pinch_merges: for each split vertex, the
// (first, last) half-edges of each rotation interval in original order).
struct CoreDecomposition {
  SimpleBoundaryQuad core;
  std::vector<std::int32_t> core_he_to_parent;
  std::vector<PrunedPart> pruned;
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pinch_merges;
};

namespace detail {

// Vertex-splitting tables shared by the core decomposition and the fast
// parameter probe.
struct SplitData {
  std::vector<std::int32_t> visit_count;  // boundary visits per vertex
  std::vector<std::int32_t> new_origin;   // half-edge -> split vertex id
  std::vector<std::int32_t> next_new;     // split rotation successor
  std::vector<std::int32_t> vx_parent;    // split vertex -> original vertex
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pinch_merges;
  std::vector<std::int32_t> comp;  // half-edge -> component
  std::int32_t n_comp = 0;
};

// Split rotations at each departure half-edge. Every arrival immediately
// precedes its visit's departure in the rotation, so cutting before the
// departures separates the lobes even when the boundary walks both sides
// of an edge (where one half-edge is an arrival and a departure at once).
inline SplitData split_boundary(const GeneralBoundaryQuad& q) {
  const HalfEdgeMap& m = q.map;
  const std::int32_t n = m.half_edge_count();
  SplitData s;
  s.visit_count.assign(m.vertex_count(), 0);
  std::vector<char> is_departure(n, 0);
  for (std::int32_t e : q.boundary) {
    s.visit_count[m.origin(e)]++;
    is_departure[e] = 1;
  }
  s.new_origin.assign(n, -1);
  s.next_new.resize(n);
  for (std::int32_t e = 0; e < n; ++e) s.next_new[e] = m.next_at_vertex(e);
  for (std::int32_t v = 0; v < m.vertex_count(); ++v) {
    if (s.visit_count[v] <= 1) {
      std::int32_t id = static_cast<std::int32_t>(s.vx_parent.size());
      s.vx_parent.push_back(v);
      m.for_half_edges_at(v, [&](std::int32_t e) { s.new_origin[e] = id; });
      continue;
    }
    std::int32_t a0 = -1;
    m.for_half_edges_at(v, [&](std::int32_t e) {
      if (a0 < 0 && is_departure[e]) a0 = e;
    });
    std::vector<std::pair<std::int32_t, std::int32_t>> intervals;
    std::int32_t e = a0, id = -1, last = -1;
    do {
      if (is_departure[e]) {
        if (id >= 0) {
          s.next_new[last] = intervals.back().first;
          intervals.back().second = last;
        }
        id = static_cast<std::int32_t>(s.vx_parent.size());
        s.vx_parent.push_back(v);
        intervals.push_back({e, e});
      }
      s.new_origin[e] = id;
      last = e;
      e = m.next_at_vertex(e);
    } while (e != a0);
    s.next_new[last] = intervals.back().first;
    intervals.back().second = last;
    s.pinch_merges.push_back(std::move(intervals));
  }
  // Connected components over (twin, split next).
  s.comp.assign(n, -1);
  for (std::int32_t e0 = 0; e0 < n; ++e0) {
    if (s.comp[e0] >= 0) continue;
    std::vector<std::int32_t> stack{e0};
    s.comp[e0] = s.n_comp;
    while (!stack.empty()) {
      std::int32_t e = stack.back();
      stack.pop_back();
      for (std::int32_t g : {m.twin(e), s.next_new[e]}) {
        if (s.comp[g] < 0) {
          s.comp[g] = s.n_comp;
          stack.push_back(g);
        }
      }
    }
    ++s.n_comp;
  }
  return s;
}

}  // namespace detail

// Core (internal faces, half-perimeter) without building any map: used by
// the rejection sampler to cheaply discard attempts outside the window.
inline std::pair<std::int32_t, std::int32_t> core_parameters(const GeneralBoundaryQuad& q) {
  if (q.map.half_edge_count() == 0) throw DegenerateCore("map without edges");
  if (boundary_is_simple(q.map, q.boundary))
    return {q.internal_faces, static_cast<std::int32_t>(q.boundary.size()) / 2};
  detail::SplitData s = detail::split_boundary(q);
  const std::int32_t core = s.comp[q.map.root()];
  std::int32_t he = 0, perim = 0;
  std::vector<char> seen(s.vx_parent.size(), 0);
  std::int32_t vx = 0;
  for (std::int32_t e = 0; e < q.map.half_edge_count(); ++e) {
    if (s.comp[e] != core) continue;
    ++he;
    if (!seen[s.new_origin[e]]) {
      seen[s.new_origin[e]] = 1;
      ++vx;
    }
  }
  for (std::int32_t e : q.boundary)
    if (s.comp[e] == core) ++perim;
  // Internal faces F - 1 with F = E - V + 2.
  return {he / 2 - vx + 1, perim / 2};
}

// Splits every multiply-visited boundary vertex into one vertex per visit;
// the map falls apart into components with simple boundaries, and the one
// containing the root edge is the core.
inline CoreDecomposition extract_simple_core(const GeneralBoundaryQuad& q) {
  const HalfEdgeMap& m = q.map;
  const std::int32_t n = m.half_edge_count();
  if (n == 0) throw DegenerateCore("map without edges");

  CoreDecomposition out;
  if (boundary_is_simple(m, q.boundary)) {
    out.core = detail::make_simple(m);
    out.core_he_to_parent.resize(n);
    std::iota(out.core_he_to_parent.begin(), out.core_he_to_parent.end(), 0);
    return out;
  }

  detail::SplitData sd = detail::split_boundary(q);
  out.pinch_merges = std::move(sd.pinch_merges);
  const std::vector<std::int32_t>& visit_count = sd.visit_count;
  const std::vector<std::int32_t>& new_origin = sd.new_origin;
  const std::vector<std::int32_t>& next_new = sd.next_new;
  const std::vector<std::int32_t>& vx_parent = sd.vx_parent;
  const std::vector<std::int32_t>& comp = sd.comp;
  const std::int32_t n_comp = sd.n_comp;

  const std::int32_t core_comp = comp[m.root()];
  for (std::int32_t c = 0; c < n_comp; ++c) {
    std::vector<std::int32_t> hes;
    for (std::int32_t e = 0; e < n; ++e)
      if (comp[e] == c) hes.push_back(e);
    std::vector<std::int32_t> he_new(n, -1);
    for (std::size_t i = 0; i < hes.size(); ++i) he_new[hes[i]] = static_cast<std::int32_t>(i);
    std::vector<std::int32_t> twin(hes.size()), next(hes.size()), origin(hes.size());
    std::vector<std::int32_t> vx_new(vx_parent.size(), -1);
    std::int32_t nv = 0;
    for (std::size_t i = 0; i < hes.size(); ++i) {
      twin[i] = he_new[m.twin(hes[i])];
      next[i] = he_new[next_new[hes[i]]];
      if (vx_new[new_origin[hes[i]]] < 0) vx_new[new_origin[hes[i]]] = nv++;
      origin[i] = vx_new[new_origin[hes[i]]];
    }
    std::int32_t root = he_new[c == core_comp ? m.root() : hes[0]];
    BuildResult br = build_map(std::move(twin), std::move(next), std::move(origin), root, nv);
    std::vector<std::int32_t> he_to_parent(hes.size());
    for (std::size_t i = 0; i < hes.size(); ++i) he_to_parent[br.he_perm[i]] = hes[i];
    if (c == core_comp) {
      out.core = detail::make_simple(std::move(br.map));
      if (!out.core.simple) throw Error("core boundary still non-simple after splitting");
      out.core_he_to_parent = std::move(he_to_parent);
    } else {
      PrunedPart part;
      part.map = std::move(br.map);
      part.he_to_parent = std::move(he_to_parent);
      // Some split vertex of the component marks where it was pinched off.
      for (std::int32_t e : hes)
        if (visit_count[vx_parent[new_origin[e]]] > 1) {
          part.attach_vertex = vx_parent[new_origin[e]];
          break;
        }
      out.pruned.push_back(std::move(part));
    }
  }
  return out;
}

// Sews a decomposition back together; the result is canonically equal to the
// decomposed map. Uses only the parts and the splice data.
inline GeneralBoundaryQuad reassemble_core(const CoreDecomposition& d) {
  std::int32_t n = 0;
  for (std::int32_t e : d.core_he_to_parent) n = std::max(n, e + 1);
  for (const PrunedPart& part : d.pruned)
    for (std::int32_t e : part.he_to_parent) n = std::max(n, e + 1);
  std::vector<std::int32_t> twin(n, -1), next(n, -1), origin(n, -1);
  auto absorb = [&](const HalfEdgeMap& m, const std::vector<std::int32_t>& he_to_parent) {
    for (std::int32_t e = 0; e < m.half_edge_count(); ++e) {
      twin[he_to_parent[e]] = he_to_parent[m.twin(e)];
      next[he_to_parent[e]] = he_to_parent[m.next_at_vertex(e)];
    }
  };
  absorb(d.core.map, d.core_he_to_parent);
  for (const PrunedPart& part : d.pruned) absorb(part.map, part.he_to_parent);
  for (const auto& intervals : d.pinch_merges)
    for (std::size_t k = 0; k < intervals.size(); ++k)
      next[intervals[k].second] = intervals[(k + 1) % intervals.size()].first;
  std::int32_t nv = 0;
  for (std::int32_t e = 0; e < n; ++e) {
    if (origin[e] >= 0) continue;
    std::int32_t x = e;
    do {
      origin[x] = nv;
      x = next[x];
    } while (x != e);
    ++nv;
  }
  std::int32_t root = d.core_he_to_parent[d.core.map.root()];
  BuildResult br = build_map(std::move(twin), std::move(next), std::move(origin), root, nv);
  FaceDecomposition fd = faces(br.map);
  GeneralBoundaryQuad q;
  q.internal_faces = br.map.edge_count() - br.map.vertex_count() + 1;
  q.boundary = fd.faces[fd.root_face];
  auto at = std::find(q.boundary.begin(), q.boundary.end(), br.map.twin(br.map.root()));
  std::rotate(q.boundary.begin(), at, q.boundary.end());
  q.map = std::move(br.map);
  return q;
}

struct SimpleSampleResult {
  SimpleBoundaryQuad quad;
  std::int64_t attempts = 0;
  std::int32_t f_gen = 0, p_gen = 0;  // generator parameters of the accepted attempt
};

namespace detail {

// Measured response of the core to the generator parameters. With
// rho = p_gen / sqrt(f_gen), the median of sigma_core = core_l / sqrt(core_f)
// grows with rho but saturates near 1.8; larger targets are only reachable
// through the (heavy) upper tail of the core perimeter.
inline double rho_for_sigma(double sigma) {
  const double xs[] = {0.0, 0.35, 1.03, 1.53, 1.81};
  const double ys[] = {0.3, 1.0, 3.2, 6.3, 9.5};
  if (sigma >= xs[4]) return std::min(12.0, ys[4] + 2.0 * (sigma - xs[4]));
  for (int i = 3; i >= 0; --i)
    if (sigma >= xs[i])
      return ys[i] + (ys[i + 1] - ys[i]) * (sigma - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[0];
}

}  // namespace detail

// Uniform simple-boundary quad near (f, l) by rejection: draw general
// boundary quads at inflated parameters, probe the core cheaply, and build
// it once its (faces, half-perimeter) land within the window. Given the
// realized core parameters the law is exactly uniform: the number of pruned
// configurations over a simple core depends only on those parameters, so
// conditioning on acceptance cannot distinguish cores of equal size. The
// generator parameters self-adjust from the running mean of probed cores;
// that adaptation also preserves uniformity because each attempt is uniform
// on every (core f, core l) slice regardless of its generator parameters.
inline SimpleSampleResult sample_simple_boundary_quad(std::int32_t f, std::int32_t l,
                                                      double window, Rng& rng,
                                                      std::int64_t max_attempts = 100000) {
  if (f < 0 || l < 1 || window < 0) throw InadmissibleParameters("need f >= 0, l >= 1, window >= 0");
  const std::int32_t f_lo = static_cast<std::int32_t>(std::ceil(f * (1.0 - window)));
  const std::int32_t f_hi = static_cast<std::int32_t>(std::floor(f * (1.0 + window)));
  const std::int32_t l_lo = static_cast<std::int32_t>(std::ceil(l * (1.0 - window)));
  const std::int32_t l_hi = static_cast<std::int32_t>(std::floor(l * (1.0 + window)));
  // Initial inflation from the measured response; the core keeps roughly a
  // third of the generator's faces in the useful rho range.
  const double sigma = l / std::sqrt(std::max<std::int32_t>(1, f));
  const double rho = detail::rho_for_sigma(sigma);
  double f_gen = std::max<double>(f, 1) / 0.35;
  double mean_cf = -1;
  SimpleSampleResult res;
  while (res.attempts < max_attempts) {
    ++res.attempts;
    std::int32_t fg = std::max<std::int32_t>(f, static_cast<std::int32_t>(std::lround(f_gen)));
    std::int32_t pg = std::max<std::int32_t>(
        l, static_cast<std::int32_t>(std::lround(rho * std::sqrt(f_gen))));
    GeneralBoundaryQuad g = sample_general_boundary_quad(fg, pg, rng);
    auto [cf, cl] = core_parameters(g);
    if (cf >= f_lo && cf <= f_hi && cl >= l_lo && cl <= l_hi) {
      CoreDecomposition d = extract_simple_core(g);
      res.quad = std::move(d.core);
      res.f_gen = fg;
      res.p_gen = pg;
      return res;
    }
    // Gently steer the generator's face count so that cores of roughly the
    // target size (the overall core law is dominated by tiny cores) average
    // out at f; rho stays fixed to keep the feedback stable.
    if (cf >= f / 6.0) mean_cf = mean_cf < 0 ? cf : 0.9 * mean_cf + 0.1 * cf;
    if (res.attempts % 16 == 0) {
      double mult = mean_cf < 0 ? 1.2 : std::clamp(f / std::max(mean_cf, 1.0), 0.8, 1.25);
      f_gen = std::clamp<double>(f_gen * mult, f, 6.0 * std::max<std::int32_t>(f, 1));
    }
  }
  throw AcceptanceTooLow("no core hit the window in " + std::to_string(max_attempts) +
                         " attempts");
}

// All simple-boundary quads with f internal faces and half-perimeter l, one
// representative per rooted isomorphism class.
inline std::vector<SimpleBoundaryQuad> enumerate_simple_boundary_quads(std::int32_t f,
                                                                       std::int32_t l) {
  if (2 * f + l > 12) throw TooLarge("enumeration limited to 2f + l <= 12 edges");
  std::vector<SimpleBoundaryQuad> out;
  for (GeneralBoundaryQuad& g : enumerate_general_boundary_quads(f, l)) {
    if (!boundary_is_simple(g.map, g.boundary)) continue;
    out.push_back(detail::make_simple(std::move(g.map)));
  }
  return out;
}

// log of the counting asymptotics for quadrangulations with a simple
// boundary: q_{f,l} ~ (sqrt(3)/(2 pi)) 12^f (9/2)^l f^{-5/2} l^{1/2}
// exp(-9 l^2 / (4 f)).
inline double q_asymptotic_log(double f, double l) {
  if (f < 1 || l < 1) throw InadmissibleParameters("need f, l >= 1");
  return 0.5 * std::log(3.0) - std::log(2.0 * M_PI) + f * std::log(12.0) +
         l * std::log(4.5) - 2.5 * std::log(f) + 0.5 * std::log(l) - 9.0 * l * l / (4.0 * f);
}

inline double q_asymptotic(double f, double l) { return std::exp(q_asymptotic_log(f, l)); }

// Result of the filled-in boundary exploration around the root arc. The
// retained map's own boundary splits at the marked vertices v1, v2 into the
// segment [v1, v2] containing the arc (boundary_out edges) and the
// complementary segment (v2, v1) (boundary_in edges); the leftover
// accounting is l(q) = boundary_in + l - boundary_out and m(q) = original
// faces minus intact inner faces of the retained map.
struct BoundaryExploration {
  HalfEdgeMap retained;
  std::vector<std::int32_t> retained_to_parent;     // retained vertex -> parent vertex
  std::vector<std::int32_t> retained_he_to_parent;  // retained half-edge -> parent id
  std::int32_t v1 = -1, v2 = -1;                    // marked segment endpoints, retained ids
  std::int32_t r0 = 0;                              // smallest covering filled-in radius
  std::int32_t leftover_perimeter = 0;              // l(q)
  std::int64_t leftover_area = 0;                   // m(q)
  bool empty_leftover = false;
  std::int32_t boundary_in = 0;   // edges of the segment (v2, v1)
  std::int32_t boundary_out = 0;  // edges of the segment [v1, v2] containing the arc
};

namespace detail {

// Component of `target` within vertices at distance > r; empty when the
// target itself lies in the ball.
inline std::vector<char> far_component(const HalfEdgeMap& m, const std::vector<std::int32_t>& dist,
                                       std::int32_t target, std::int32_t r) {
  std::vector<char> in(m.vertex_count(), 0);
  if (dist[target] <= r) return in;
  std::vector<std::int32_t> stack{target};
  in[target] = 1;
  while (!stack.empty()) {
    std::int32_t v = stack.back();
    stack.pop_back();
    m.for_half_edges_at(v, [&](std::int32_t e) {
      std::int32_t u = m.target(e);
      if (!in[u] && dist[u] > r) {
        in[u] = 1;
        stack.push_back(u);
      }
    });
  }
  return in;
}

struct InducedSubmap {
  HalfEdgeMap map;
  std::vector<std::int32_t> vx_to_parent;
  std::vector<std::int32_t> he_to_parent;
};

// Induced submap on the kept vertices, rooted at the original root if it
// survives. Returns the single-vertex map when no edge survives.
inline InducedSubmap induced_submap(const HalfEdgeMap& m, const std::vector<char>& keep) {
  std::vector<std::int32_t> new_vx(m.vertex_count(), -1);
  std::int32_t vxn = 0;
  for (std::int32_t v = 0; v < m.vertex_count(); ++v)
    if (keep[v]) new_vx[v] = vxn++;
  std::vector<std::int32_t> new_he(m.half_edge_count(), -1);
  std::int32_t hen = 0;
  for (std::int32_t e = 0; e < m.half_edge_count(); ++e)
    if (keep[m.origin(e)] && keep[m.target(e)]) new_he[e] = hen++;
  if (hen == 0) return {HalfEdgeMap({}, {}, {}, -1, 1), {m.root_vertex()}, {}};
  std::vector<std::int32_t> twin(hen), next(hen), origin(hen);
  for (std::int32_t e = 0; e < m.half_edge_count(); ++e) {
    if (new_he[e] < 0) continue;
    twin[new_he[e]] = new_he[m.twin(e)];
    origin[new_he[e]] = new_vx[m.origin(e)];
    std::int32_t g = m.next_at_vertex(e);
    while (new_he[g] < 0) g = m.next_at_vertex(g);
    next[new_he[e]] = new_he[g];
  }
  std::int32_t root = (m.root() >= 0 && new_he[m.root()] >= 0) ? new_he[m.root()] : 0;
  BuildResult br = build_map(std::move(twin), std::move(next), std::move(origin), root, vxn);
  InducedSubmap out;
  out.vx_to_parent.assign(vxn, -1);
  for (std::int32_t v = 0; v < m.vertex_count(); ++v)
    if (new_vx[v] >= 0) out.vx_to_parent[br.vx_perm[new_vx[v]]] = v;
  out.he_to_parent.assign(hen, -1);
  for (std::int32_t e = 0; e < m.half_edge_count(); ++e)
    if (new_he[e] >= 0) out.he_to_parent[br.he_perm[new_he[e]]] = e;
  out.map = std::move(br.map);
  return out;
}

}  // namespace detail

// Filled-in exploration of a simple-boundary quad around the boundary arc of
// labels [-a, b] (mod 2l) from the root: finds the smallest radius r0 whose
// filled-in ball covers the arc, removes the component of the antipodal
// boundary vertex (label l) outside radius r0 + r, and reports the
// leftover's accounting. The filled-in ball of radius s is everything except
// the antipode's component among vertices at distance > s.
inline BoundaryExploration explore_boundary(const SimpleBoundaryQuad& q, std::int32_t a,
                                            std::int32_t b, std::int32_t r) {
  const std::int32_t two_l = static_cast<std::int32_t>(q.boundary.size());
  const std::int32_t l = two_l / 2;
  if (a < 0 || b < 0 || r < 0) throw InadmissibleParameters("need a, b, r >= 0");
  if (a + b >= two_l) throw ArcTooLarge("arc of " + std::to_string(a + b + 1) +
                                        " boundary vertices on a boundary of " +
                                        std::to_string(two_l));
  const HalfEdgeMap& m = q.map;
  std::vector<std::int32_t> dist = bfs_distances(m, {m.root_vertex()});
  const std::int32_t antipode = q.boundary_vertices[l % two_l];

  std::vector<std::int32_t> arc;
  for (std::int32_t i = -a; i <= b; ++i)
    arc.push_back(q.boundary_vertices[((i % two_l) + two_l) % two_l]);

  BoundaryExploration out;
  std::int32_t max_d = *std::max_element(dist.begin(), dist.end());
  for (out.r0 = 0; out.r0 <= max_d; ++out.r0) {
    std::vector<char> far = detail::far_component(m, dist, antipode, out.r0);
    bool covered = true;
    for (std::int32_t v : arc) covered = covered && !far[v];
    if (covered) break;
  }

  std::vector<char> leftover = detail::far_component(m, dist, antipode, out.r0 + r);
  out.empty_leftover = std::none_of(leftover.begin(), leftover.end(), [](char c) { return c; });

  std::vector<char> keep(m.vertex_count(), 1);
  for (std::int32_t v = 0; v < m.vertex_count(); ++v)
    if (leftover[v]) keep[v] = 0;
  detail::InducedSubmap sub = detail::induced_submap(m, keep);
  out.retained = std::move(sub.map);
  out.retained_to_parent = std::move(sub.vx_to_parent);
  out.retained_he_to_parent = std::move(sub.he_to_parent);

  if (out.empty_leftover) {
    out.boundary_out = two_l;
    out.leftover_perimeter = 0;
    out.leftover_area = 0;
    return out;
  }

  // v1 and v2 bracket the leftover's footprint on the original boundary:
  // scanning outward from the arc, the last retained vertex before the
  // first leftover vertex on each side. The segment [v1, v2] through the
  // arc has boundary_out edges; boundary_in is the rest of the retained
  // map's own boundary (the exploration scar plus any surviving original
  // stretches inside the footprint).
  auto far_at = [&](std::int32_t pos) {
    return leftover[q.boundary_vertices[((pos % two_l) + two_l) % two_l]] != 0;
  };
  std::int32_t h1 = b + 1;
  while (!far_at(h1)) ++h1;  // hits the antipode at the latest
  std::int32_t h2 = -a - 1;
  while (!far_at(h2)) --h2;
  std::vector<std::int32_t> parent_to_retained(m.vertex_count(), -1);
  for (std::size_t v = 0; v < out.retained_to_parent.size(); ++v)
    parent_to_retained[out.retained_to_parent[v]] = static_cast<std::int32_t>(v);
  out.v1 = parent_to_retained[q.boundary_vertices[(((h1 - 1) % two_l) + two_l) % two_l]];
  out.v2 = parent_to_retained[q.boundary_vertices[(((h2 + 1) % two_l) + two_l) % two_l]];
  out.boundary_out = (h1 - 1) - (h2 + 1);
  FaceDecomposition rfd = faces(out.retained);
  out.boundary_in =
      static_cast<std::int32_t>(rfd.faces[rfd.root_face].size()) - out.boundary_out;
  out.leftover_perimeter = out.boundary_in + l - out.boundary_out;

  // m(q): original faces that did not survive intact (some corner lost).
  FaceDecomposition fd = faces(m);
  for (std::int32_t fi = 0; fi < static_cast<std::int32_t>(fd.faces.size()); ++fi) {
    if (fi == fd.root_face) continue;
    bool touches = false;
    for (std::int32_t e : fd.faces[fi]) touches = touches || leftover[m.origin(e)];
    if (touches) out.leftover_area++;
  }
  return out;
}

}  // namespace tdq
