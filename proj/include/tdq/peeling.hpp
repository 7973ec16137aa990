#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "tdq/error.hpp"
#include "tdq/gluing.hpp"
#include "tdq/rng.hpp"
#include "tdq/tree_sampler.hpp"

namespace tdq {

// A finite host for the layered exploration: a glued window together with the
// spine parametrization. Index n of the spine owns the glued images of the
// whole hanging tree attached at n; the spine tip stands in for the target at
// infinity, and the single non-quadrangular face (the surviving stretch of
// host boundary) is never peeled.
struct PeelingHost {
  TreeDecoratedQuad window;
  std::vector<std::int32_t> spine_images;               // glued vertex of spine index n
  std::vector<std::vector<std::int32_t>> tree_images;   // per n: glued hanging-tree vertices
  std::vector<std::int32_t> vertex_spine;               // glued vertex -> spine index or -1
  std::int32_t target_vertex = -1;                      // glued image of the spine tip
};

inline PeelingHost make_peeling_host(const SimpleBoundaryQuad& q, const SpineTruncation& st) {
  PeelingHost h;
  GluedWindow w = glue_extended(q, st.spine_tree);
  h.window = std::move(w.window);
  h.spine_images = std::move(w.spine_images);
  h.target_vertex = h.spine_images.back();

  const PlaneTree& t = st.spine_tree.tree;
  std::vector<std::int32_t> first_time(t.vertex_count(), -1);
  std::vector<std::int32_t> cv = contour_vertices(t);
  for (std::int32_t n = 0; n < static_cast<std::int32_t>(cv.size()); ++n)
    if (first_time[cv[n]] < 0) first_time[cv[n]] = n;

  h.tree_images.resize(h.spine_images.size());
  h.vertex_spine.assign(h.window.map.vertex_count(), -1);
  for (std::int32_t v = 0; v < t.vertex_count(); ++v) {
    std::int32_t img = h.window.contour_curve[first_time[v]];
    std::int32_t n = st.spine_attach[v];
    h.tree_images[n].push_back(img);
    h.vertex_spine[img] = n;
  }
  return h;
}

// p^(l) as a vertex set plus the frontier b^(l) (filled vertices that still
// have an unexplored neighbor). The host and its face incidence are shared
// between successive states.
struct PeelingState {
  std::shared_ptr<const PeelingHost> host;
  std::shared_ptr<const std::vector<std::vector<std::int32_t>>> vertex_faces;
  std::shared_ptr<const std::vector<std::vector<std::int32_t>>> face_vertices;
  std::shared_ptr<const std::vector<std::vector<std::int32_t>>> adjacency;
  std::int32_t layer = 0;
  std::int32_t spine_reach = 0;  // r^(l)
  std::vector<char> filled;      // p^(l) indicator over glued vertices
  std::vector<std::int32_t> frontier;
};

namespace detail {

inline void recompute_frontier(PeelingState& s) {
  s.frontier.clear();
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(s.filled.size()); ++v) {
    if (!s.filled[v]) continue;
    for (std::int32_t u : (*s.adjacency)[v])
      if (!s.filled[u]) {
        s.frontier.push_back(v);
        break;
      }
  }
}

// Fills every unexplored component that does not contain the target, so the
// unexplored part stays connected (the filled-in exploration).
inline void fill_finite_components(PeelingState& s) {
  std::int32_t n = static_cast<std::int32_t>(s.filled.size());
  std::vector<char> reach(n, 0);
  std::vector<std::int32_t> stack;
  if (!s.filled[s.host->target_vertex]) {
    reach[s.host->target_vertex] = 1;
    stack.push_back(s.host->target_vertex);
  }
  while (!stack.empty()) {
    std::int32_t v = stack.back();
    stack.pop_back();
    for (std::int32_t u : (*s.adjacency)[v])
      if (!s.filled[u] && !reach[u]) {
        reach[u] = 1;
        stack.push_back(u);
      }
  }
  for (std::int32_t v = 0; v < n; ++v)
    if (!s.filled[v] && !reach[v]) s.filled[v] = 1;
}

}  // namespace detail

inline PeelingState init_peeling(std::shared_ptr<const PeelingHost> host, std::int32_t r) {
  if (r < 0 || r + 1 >= static_cast<std::int32_t>(host->spine_images.size()))
    throw SpineTooShort("initial extent must leave the spine tip unexplored");
  PeelingState s;
  s.host = host;

  const HalfEdgeMap& m = host->window.map;
  FaceDecomposition fd = faces(m);
  std::int32_t skip = -1;  // the outer face: the unique non-quadrangular one
  for (std::size_t i = 0; i < fd.faces.size(); ++i)
    if (fd.degrees[i] != 4) skip = static_cast<std::int32_t>(i);
  auto fv = std::make_shared<std::vector<std::vector<std::int32_t>>>();
  auto vf = std::make_shared<std::vector<std::vector<std::int32_t>>>(m.vertex_count());
  for (std::size_t i = 0; i < fd.faces.size(); ++i) {
    if (static_cast<std::int32_t>(i) == skip) continue;
    std::vector<std::int32_t> vs;
    for (std::int32_t e : fd.faces[i]) vs.push_back(m.origin(e));
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    std::int32_t id = static_cast<std::int32_t>(fv->size());
    for (std::int32_t v : vs) (*vf)[v].push_back(id);
    fv->push_back(std::move(vs));
  }
  s.face_vertices = std::move(fv);
  s.vertex_faces = std::move(vf);

  auto adj = std::make_shared<std::vector<std::vector<std::int32_t>>>(m.vertex_count());
  for (std::int32_t e = 0; e < 2 * m.edge_count(); ++e)
    (*adj)[m.origin(e)].push_back(m.target(e));
  s.adjacency = std::move(adj);

  s.layer = 0;
  s.spine_reach = r;
  s.filled.assign(m.vertex_count(), 0);
  for (std::int32_t n = 0; n <= r; ++n)
    for (std::int32_t v : host->tree_images[n]) s.filled[v] = 1;
  detail::fill_finite_components(s);
  detail::recompute_frontier(s);
  return s;
}

inline PeelingState peel_step(const PeelingState& prev) {
  if (prev.filled[prev.host->target_vertex] || prev.frontier.empty())
    throw Exhausted("host fully explored");
  PeelingState s = prev;
  // Reveal every face meeting the frontier; this covers the whole radius-1
  // neighborhood of b^(l-1) because each edge borders an internal face.
  std::vector<char> newly(s.filled.size(), 0);
  for (std::int32_t v : prev.frontier)
    for (std::int32_t f : (*s.vertex_faces)[v])
      for (std::int32_t u : (*s.face_vertices)[f])
        if (!s.filled[u]) newly[u] = 1;
  std::int32_t r = s.spine_reach;
  for (std::int32_t u = 0; u < static_cast<std::int32_t>(newly.size()); ++u) {
    if (!newly[u]) continue;
    s.filled[u] = 1;
    r = std::max(r, s.host->vertex_spine[u]);
  }
  // Take in the whole hanging forest up to the furthest touched spine index.
  for (std::int32_t n = s.spine_reach + 1; n <= r; ++n)
    for (std::int32_t v : s.host->tree_images[n]) s.filled[v] = 1;
  s.spine_reach = r;
  detail::fill_finite_components(s);
  detail::recompute_frontier(s);
  s.layer = prev.layer + 1;
  return s;
}

// Pooled r^(l) - r^(l-1) increments across instances; merging is associative.
struct IncrementSeries {
  std::vector<std::int32_t> increments;
  std::int64_t layers = 0;
  void record(const PeelingState& before, const PeelingState& after) {
    increments.push_back(after.spine_reach - before.spine_reach);
    ++layers;
  }
  void merge(const IncrementSeries& o) {
    increments.insert(increments.end(), o.increments.begin(), o.increments.end());
    layers += o.layers;
  }
};

struct CcdfRow {
  std::int64_t a = 0;
  double ccdf = 0.0;
  double a_times_ccdf = 0.0;
};

inline std::vector<CcdfRow> increment_tail_ccdf(const IncrementSeries& series,
                                                std::int64_t min_samples = 1000) {
  if (static_cast<std::int64_t>(series.increments.size()) < min_samples)
    throw TooFewSamples("need at least 1000 pooled increments");
  std::int32_t max_inc = 0;
  for (std::int32_t x : series.increments) max_inc = std::max(max_inc, x);
  std::vector<std::int64_t> at_least(static_cast<std::size_t>(max_inc) + 2, 0);
  for (std::int32_t x : series.increments) ++at_least[x];
  for (std::int32_t a = max_inc; a >= 0; --a) at_least[a] += at_least[a + 1];
  double n = static_cast<double>(series.increments.size());
  std::vector<CcdfRow> out;
  for (std::int64_t a = 1; a <= max_inc; ++a) {
    CcdfRow row;
    row.a = a;
    row.ccdf = static_cast<double>(at_least[a]) / n;
    row.a_times_ccdf = static_cast<double>(a) * row.ccdf;
    out.push_back(row);
  }
  return out;
}

namespace detail {

// Heavy-tailed integer with P(X >= k) = min(1, (scale/k)^exponent), k >= 1.
inline std::int64_t pareto_integer(Rng& rng, double exponent, double scale = 1.0) {
  double u = uniform01(rng);
  double x = scale * std::pow(u, -1.0 / exponent);
  if (x >= 9.0e18) return static_cast<std::int64_t>(9.0e18);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(x)));
}

}  // namespace detail

// Monte-Carlo estimate of P(O >= tau_1 + ... + tau_a) where O is the
// heavy-tailed overshoot proxy with P(O >= k) = k^{-tail_exponent} and the
// tau_i are i.i.d. first hitting times of -1 by a simple random walk. The sum
// event is evaluated through the coupling {sum tau_i <= j} = {the walk
// reaches -a within j steps}.
inline double overshoot_vs_tau_oracle(std::int64_t a, std::int64_t samples,
                                      double tail_exponent, Rng& rng) {
  if (a < 1 || samples < 1 || tail_exponent <= 1.0)
    throw InadmissibleParameters("need a >= 1, samples >= 1, tail exponent > 1");
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    std::int64_t j = detail::pareto_integer(rng, tail_exponent);
    if (j < a) continue;  // the walk needs at least a steps to reach -a
    std::int64_t pos = 0;
    for (std::int64_t step = 0; step < j; ++step) {
      pos += (uniform_below(rng, 2) == 0) ? 1 : -1;
      if (pos <= -a) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

// Series value of the a=1 case: E[tau^{-e}] = sum_n P(tau = 2n+1) (2n+1)^{-e}
// with P(tau = 2n+1) = Catalan(n) / 2^{2n+1}.
inline double overshoot_vs_tau_series(double tail_exponent, std::int32_t terms = 4000) {
  double sum = 0.0, log_prob = -std::numbers::ln2;  // n = 0: C_0 / 2
  for (std::int32_t n = 0; n < terms; ++n) {
    sum += std::exp(log_prob) * std::pow(2.0 * n + 1.0, -tail_exponent);
    // C_{n+1}/C_n = 2(2n+1)/(n+2); the 4^{-1} absorbs the extra 2^{-2}.
    log_prob += std::log(2.0 * (2.0 * n + 1.0) / (n + 2.0)) - 2.0 * std::numbers::ln2;
  }
  return sum;
}

// Centered normalized sums l^{-1} sum_{j<=l} s^(j) - c_hat log(l) with
// P(s >= k) = min(1, (c_hat/k)^tail_exponent); exponent 1 is the Cauchy-domain
// case, larger exponents serve as a concentration contrast.
inline std::vector<double> cauchy_sum_probe(std::int64_t l, std::int64_t samples, Rng& rng,
                                            double c_hat = 1.0, double tail_exponent = 1.0) {
  if (l < 10 || samples < 1 || c_hat <= 0.0)
    throw InadmissibleParameters("need l >= 10, samples >= 1, c_hat > 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(samples));
  double center = c_hat * std::log(static_cast<double>(l));
  for (std::int64_t i = 0; i < samples; ++i) {
    double sum = 0.0;
    for (std::int64_t j = 0; j < l; ++j)
      sum += static_cast<double>(detail::pareto_integer(rng, tail_exponent, c_hat));
    out.push_back(sum / static_cast<double>(l) - center);
  }
  return out;
}

}  // namespace tdq
