#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <gmpxx.h>

#include "tdq/gluing.hpp"
#include "tdq/peeling.hpp"
#include "tdq/simple_core.hpp"
#include "tdq/stats.hpp"
#include "tdq/tree_exploration.hpp"
#include "tdq/tree_sampler.hpp"

namespace tdq {

// ---- replicate runner -----------------------------------------------------
//
// Results are keyed by replicate index and merged in index order, so the
// output is independent of the thread count and of scheduling.
template <typename T, typename Fn>
std::vector<T> run_replicates(std::int64_t count, std::int32_t threads, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::int64_t i; (i = next.fetch_add(1)) < count;) {
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::int32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// ---- tail fitting ---------------------------------------------------------

struct TailFit {
  double exponent = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string method;
  std::int64_t sample_count = 0;
};

namespace detail {

// Log-log least squares of the empirical CCDF over a geometric grid anchored
// at the smallest positive sample, so the slope is exactly invariant under
// positive scaling of the samples.
inline double ccdf_slope(const std::vector<double>& sorted) {
  double n = static_cast<double>(sorted.size());
  double anchor = 0.0;
  for (double v : sorted)
    if (v > 0.0) {
      anchor = v;
      break;
    }
  if (anchor <= 0.0) return 0.0;
  std::vector<double> xs, ys;
  for (double a = anchor;; a *= 2.0) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), a);
    double ccdf = static_cast<double>(sorted.end() - it) / n;
    if (ccdf * n < 8.0) break;  // grid point too deep in the tail
    xs.push_back(std::log(a));
    ys.push_back(std::log(ccdf));
  }
  if (xs.size() < 2) return 0.0;
  return least_squares(xs, ys).slope;
}

inline double hill_exponent(const std::vector<double>& sorted) {
  std::int64_t n = static_cast<std::int64_t>(sorted.size());
  std::int64_t k = std::max<std::int64_t>(10, n / 20);
  if (k >= n) k = n - 1;
  double x_k = sorted[static_cast<std::size_t>(n - 1 - k)];
  if (x_k <= 0.0) return 0.0;
  double sum = 0.0;
  for (std::int64_t i = n - k; i < n; ++i) sum += std::log(sorted[static_cast<std::size_t>(i)] / x_k);
  if (sum <= 0.0) return 0.0;
  return -static_cast<double>(k) / sum;  // negative tail exponent convention
}

}  // namespace detail

inline TailFit fit_tail_exponent(const std::vector<double>& samples, const std::string& method,
                                 std::int32_t bootstrap, Rng& rng) {
  if (samples.size() < 200) throw TooFewSamples("tail fit needs at least 200 samples");
  if (method != "ccdf_regression" && method != "hill")
    throw InadmissibleParameters("unknown tail fit method: " + method);
  bool all_equal = std::all_of(samples.begin(), samples.end(),
                               [&](double v) { return v == samples.front(); });
  if (all_equal) throw DegenerateSamples("all samples equal; no tail to fit");
  auto stat = [&](const std::vector<double>& s) {
    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    return method == "hill" ? detail::hill_exponent(sorted) : detail::ccdf_slope(sorted);
  };
  TailFit fit;
  fit.method = method;
  fit.sample_count = static_cast<std::int64_t>(samples.size());
  fit.exponent = stat(samples);
  auto [lo, hi] = bootstrap_ci(samples, stat, bootstrap, 0.95, rng);
  fit.ci_low = std::min(lo, fit.exponent);
  fit.ci_high = std::max(hi, fit.exponent);
  return fit;
}

// ---- series types ---------------------------------------------------------

struct ScalingPoint {
  double f = 0.0;
  double sigma_realized = 0.0;
  double value = 0.0;
  std::int64_t replicates = 0;
};

struct ScalingSeries {
  std::vector<ScalingPoint> points;
  std::string normalization;
};

// ---- overshoot experiment -------------------------------------------------

struct OvershootProbe {
  std::int32_t simple_overshoot = 0;
  std::int32_t infinite_overshoot = 0;
};

// Overshoots at boundary label `base` of a simple-boundary quad, with the
// boundary cycle read as a window of Z around base: labels base+1.. on the
// positive side, base-1.. on the negative side, split at the antipode. The
// simple overshoot scans edges at the base vertex; the infinite one scans
// every face touching the negative side for the largest positive label it
// contains. Both values are capped at `window` so probes on the same cycle
// stay comparable.
inline OvershootProbe boundary_overshoots(const SimpleBoundaryQuad& q,
                                          const FaceDecomposition& fd,
                                          const std::vector<std::int32_t>& label_of,
                                          std::int32_t base, std::int32_t window) {
  const HalfEdgeMap& m = q.map;
  std::int32_t l = q.half_perimeter();
  std::int32_t two_l = 2 * l;
  auto rel = [&](std::int32_t v) -> std::int32_t {
    std::int32_t lab = label_of[v];
    if (lab < 0) return -1;  // interior vertex
    return (lab - base + two_l) % two_l;
  };
  OvershootProbe probe;
  m.for_half_edges_at(q.boundary_vertices[base], [&](std::int32_t e) {
    std::int32_t z = rel(m.target(e));
    if (z >= 1 && z <= window) probe.simple_overshoot = std::max(probe.simple_overshoot, z);
  });
  for (std::int32_t off = l + 1; off < two_l; ++off) {  // negative side: labels -1..-(l-1)
    std::int32_t v = q.boundary_vertices[(base + off) % two_l];
    m.for_half_edges_at(v, [&](std::int32_t e) {
      std::int32_t face = fd.face_of[e];
      if (face == fd.root_face) return;
      for (std::int32_t fe : fd.faces[face]) {
        std::int32_t z = rel(m.origin(fe));
        if (z >= 1 && z <= window)
          probe.infinite_overshoot = std::max(probe.infinite_overshoot, z);
      }
    });
  }
  probe.infinite_overshoot = std::max(probe.infinite_overshoot, probe.simple_overshoot);
  return probe;
}

struct OvershootExperiment {
  TailFit simple_fit;
  TailFit infinite_fit;
  std::vector<double> simple_samples;
  std::vector<double> infinite_samples;
  std::int32_t window = 0;
  std::int64_t quads = 0;
  bool dominance_ok = true;  // infinite >= simple on every probe
};

// Pools several well-separated boundary probes per sampled quad; each quad is
// one replicate keyed by its index.
inline OvershootExperiment overshoot_experiment(std::int64_t f, std::int32_t l,
                                                std::int64_t replicates, std::uint64_t seed,
                                                std::int32_t threads = 1,
                                                std::int32_t window_divisor = 10,
                                                double sampler_window = 0.25,
                                                bool dense_probes = false) {
  if (f < 1 || l < 10 || replicates < 1 || window_divisor < 2 || sampler_window <= 0.0 ||
      sampler_window >= 1.0)
    throw InadmissibleParameters("overshoot experiment needs f >= 1, l >= 10, replicates >= 1");
  std::int32_t window = std::max<std::int32_t>(8, l / window_divisor);
  std::int32_t spacing = dense_probes ? window + 2 : 2 * window + 2;
  std::int32_t per_quad = std::max<std::int32_t>(1, (2 * l) / spacing);
  std::int64_t quads = (replicates + per_quad - 1) / per_quad;
  auto one = [&](std::int64_t i) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(i));
    SimpleSampleResult s =
        sample_simple_boundary_quad(static_cast<std::int32_t>(f), l, sampler_window, rng, 200000);
    const SimpleBoundaryQuad& q = s.quad;
    std::int32_t two_l = 2 * q.half_perimeter();
    std::int32_t w = std::max<std::int32_t>(8, q.half_perimeter() / window_divisor);
    FaceDecomposition fd = faces(q.map);
    std::vector<std::int32_t> label_of(q.map.vertex_count(), -1);
    for (std::int32_t j = 0; j < two_l; ++j) label_of[q.boundary_vertices[j]] = j;
    std::vector<OvershootProbe> probes;
    for (std::int32_t p = 0; p < per_quad; ++p) {
      std::int32_t base = static_cast<std::int32_t>(
          (static_cast<std::int64_t>(p) * two_l) / per_quad);
      probes.push_back(boundary_overshoots(q, fd, label_of, base, w));
    }
    return probes;
  };
  std::vector<std::vector<OvershootProbe>> all =
      run_replicates<std::vector<OvershootProbe>>(quads, threads, one);
  OvershootExperiment out;
  out.window = window;
  out.quads = quads;
  for (const auto& probes : all)
    for (const OvershootProbe& p : probes) {
      out.simple_samples.push_back(static_cast<double>(p.simple_overshoot));
      out.infinite_samples.push_back(static_cast<double>(p.infinite_overshoot));
      if (p.infinite_overshoot < p.simple_overshoot) out.dominance_ok = false;
    }
  Rng fit_rng = substream(seed, 1u << 30);
  out.simple_fit = fit_tail_exponent(out.simple_samples, "ccdf_regression", 200, fit_rng);
  out.infinite_fit = fit_tail_exponent(out.infinite_samples, "ccdf_regression", 200, fit_rng);
  return out;
}

// ---- diameter experiment --------------------------------------------------

namespace detail {

// Exact diameter of the decoration (the k+1 glued tree classes) in the map
// metric: one BFS per tree vertex.
inline std::int32_t decoration_map_diameter(const TreeDecoratedQuad& d) {
  std::vector<std::int32_t> tree_vs = d.contour_curve;
  std::sort(tree_vs.begin(), tree_vs.end());
  tree_vs.erase(std::unique(tree_vs.begin(), tree_vs.end()), tree_vs.end());
  const HalfEdgeMap& m = d.map;
  // CSR adjacency for BFS speed.
  std::vector<std::int32_t> deg(m.vertex_count() + 1, 0), adj(m.half_edge_count());
  for (std::int32_t e = 0; e < m.half_edge_count(); ++e) ++deg[m.origin(e) + 1];
  for (std::int32_t v = 0; v < m.vertex_count(); ++v) deg[v + 1] += deg[v];
  {
    std::vector<std::int32_t> cur(deg.begin(), deg.end() - 1);
    for (std::int32_t e = 0; e < m.half_edge_count(); ++e) adj[cur[m.origin(e)]++] = m.target(e);
  }
  std::int32_t best = 0;
  std::vector<std::int32_t> dist(m.vertex_count());
  std::vector<std::int32_t> queue(m.vertex_count());
  for (std::int32_t src : tree_vs) {
    std::fill(dist.begin(), dist.end(), -1);
    std::int32_t head = 0, tail = 0;
    dist[src] = 0;
    queue[tail++] = src;
    while (head < tail) {
      std::int32_t v = queue[head++];
      for (std::int32_t j = deg[v]; j < deg[v + 1]; ++j) {
        std::int32_t u = adj[j];
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          queue[tail++] = u;
        }
      }
    }
    for (std::int32_t t : tree_vs) best = std::max(best, dist[t]);
  }
  return best;
}

// Diameter of a plane tree in its own metric (unit edges): two sweeps.
inline std::int32_t tree_metric_diameter(const PlaneTree& t) {
  auto far = [&](std::int32_t src) {
    std::vector<std::int32_t> dist(t.vertex_count(), -1);
    std::vector<std::int32_t> stack{src};
    dist[src] = 0;
    std::int32_t best = src;
    while (!stack.empty()) {
      std::int32_t v = stack.back();
      stack.pop_back();
      if (dist[v] > dist[best]) best = v;
      std::vector<std::int32_t> nb = t.children[v];
      if (t.parent[v] >= 0) nb.push_back(t.parent[v]);
      for (std::int32_t u : nb)
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          stack.push_back(u);
        }
    }
    return std::pair{best, dist[best]};
  };
  return far(far(0).first).second;
}

}  // namespace detail

struct DiameterExperiment {
  ScalingSeries median_normalized;       // median diam / f^{1/4}
  ScalingSeries log_adjusted;            // median diam (log f)^alpha / f^{1/4}
  ScalingSeries lower_bound_fraction;    // fraction with diam >= f^{1/4}/(log f)^2
  std::vector<std::vector<double>> raw;  // diameters per grid point
  bool monotone_decreasing = false;
  bool lower_bound_ok = false;  // >= 95% at every f
  bool tree_dominance_ok = true;
  double alpha = 2.0;
};

inline DiameterExperiment diameter_experiment(const std::vector<std::int64_t>& f_grid,
                                              double sigma, double alpha,
                                              std::int64_t replicates, std::uint64_t seed,
                                              std::int32_t threads = 1) {
  if (f_grid.empty() || sigma <= 0.0 || alpha <= 1.0 || replicates < 1)
    throw InadmissibleParameters("diameter experiment needs f grid, sigma > 0, alpha > 1");
  for (std::size_t i = 1; i < f_grid.size(); ++i)
    if (f_grid[i] <= f_grid[i - 1])
      throw InadmissibleParameters("f grid must be strictly increasing");
  DiameterExperiment out;
  out.alpha = alpha;
  out.median_normalized.normalization = "diam / f^{1/4}";
  out.log_adjusted.normalization = "diam (log f)^alpha / f^{1/4}";
  out.lower_bound_fraction.normalization = "P(diam >= f^{1/4} / (log f)^2)";
  struct Rep {
    double diam = 0.0, sigma = 0.0;
    bool dominance = true;
  };
  for (std::size_t gi = 0; gi < f_grid.size(); ++gi) {
    std::int64_t f = f_grid[gi];
    std::int32_t l = std::max<std::int32_t>(2, static_cast<std::int32_t>(
                                                   std::llround(sigma * std::sqrt(f))));
    auto one = [&](std::int64_t i) {
      Rng rng = substream(seed + 7919 * static_cast<std::uint64_t>(gi),
                          static_cast<std::uint64_t>(i));
      SimpleSampleResult s =
          sample_simple_boundary_quad(static_cast<std::int32_t>(f), l, 0.3, rng, 200000);
      PlaneTree t = sample_uniform_tree(s.quad.half_perimeter(), rng);
      TreeDecoratedQuad d = glue(s.quad, t).first;
      Rep rep;
      std::int32_t dm = detail::decoration_map_diameter(d);
      rep.diam = static_cast<double>(dm);
      rep.sigma = static_cast<double>(s.quad.half_perimeter()) /
                  std::sqrt(static_cast<double>(s.quad.internal_faces));
      rep.dominance = dm <= detail::tree_metric_diameter(t);
      return rep;
    };
    std::vector<Rep> reps = run_replicates<Rep>(replicates, threads, one);
    std::vector<double> diams;
    double sig = 0.0;
    std::int64_t good = 0;
    double ff = static_cast<double>(f);
    double scale = std::pow(ff, 0.25), logf = std::log(ff);
    for (const Rep& r : reps) {
      diams.push_back(r.diam);
      sig += r.sigma;
      if (!r.dominance) out.tree_dominance_ok = false;
      if (r.diam >= scale / (logf * logf)) ++good;
    }
    sig /= static_cast<double>(reps.size());
    double med = median(diams);
    out.raw.push_back(diams);
    out.median_normalized.points.push_back({ff, sig, med / scale, replicates});
    out.log_adjusted.points.push_back(
        {ff, sig, med * std::pow(logf, alpha) / scale, replicates});
    out.lower_bound_fraction.points.push_back(
        {ff, sig, static_cast<double>(good) / static_cast<double>(reps.size()), replicates});
  }
  out.monotone_decreasing = true;
  for (std::size_t i = 1; i < out.median_normalized.points.size(); ++i)
    if (out.median_normalized.points[i].value >= out.median_normalized.points[i - 1].value)
      out.monotone_decreasing = false;
  out.lower_bound_ok = true;
  for (const ScalingPoint& p : out.lower_bound_fraction.points)
    if (p.value < 0.95) out.lower_bound_ok = false;
  return out;
}

// ---- subadditive experiment -----------------------------------------------

struct SubadditiveExperiment {
  ScalingSeries median_normalized;  // median d(kappa_0, kappa_n) / n
  bool bounded_by_one = true;       // d/n <= 1 on every instance
  bool triangle_ok = true;          // exact subadditivity along the spine
  std::int64_t replicates = 0;
};

inline SubadditiveExperiment subadditive_experiment(const std::vector<std::int32_t>& n_grid,
                                                    std::int32_t spine_len,
                                                    std::int64_t replicates, std::uint64_t seed,
                                                    std::int32_t threads = 1) {
  if (n_grid.empty() || replicates < 1)
    throw InadmissibleParameters("subadditive experiment needs an n grid and replicates");
  for (std::int32_t n : n_grid)
    if (n < 0 || n >= spine_len)
      throw InadmissibleParameters("spine must be longer than every n in the grid");
  struct Rep {
    std::vector<std::int32_t> dists;  // d(kappa_0, kappa_n) per grid n
    bool bounded = true, triangle = true;
  };
  auto one = [&](std::int64_t i) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(i));
    for (std::int64_t tries = 0;; ++tries) {
      if (tries >= 100000) throw AcceptanceTooLow("subadditive host generation stalled");
      SpineTruncation st;
      try {
        st = sample_infinite_tree_truncation(spine_len, rng, 2 * spine_len);
      } catch (const TooLarge&) {
        continue;
      }
      std::int32_t k = st.spine_tree.tree.edge_count();
      std::int32_t l = k + std::max<std::int32_t>(8, k / 4);
      SimpleSampleResult s;
      try {
        s = sample_simple_boundary_quad(l * l, l, 0.4, rng, 20000);
      } catch (const AcceptanceTooLow&) {
        continue;
      }
      if (s.quad.half_perimeter() <= k) continue;
      GluedWindow w = glue_extended(s.quad, st.spine_tree);
      std::vector<std::int32_t> from0 = bfs_distances(w.window.map, {w.spine_images[0]});
      Rep rep;
      for (std::int32_t n : n_grid) {
        std::int32_t d = from0[w.spine_images[n]];
        rep.dists.push_back(d);
        if (d > n) rep.bounded = false;
      }
      // Exact triangle check d(0, n+m) <= d(0, n) + d(n, n+m) at a midpoint.
      std::int32_t n = n_grid[n_grid.size() / 2];
      std::int32_t mstep = std::min(n, spine_len - n);
      if (mstep >= 1) {
        std::vector<std::int32_t> fromn = bfs_distances(w.window.map, {w.spine_images[n]});
        if (from0[w.spine_images[n + mstep]] >
            from0[w.spine_images[n]] + fromn[w.spine_images[n + mstep]])
          rep.triangle = false;
      }
      return rep;
    }
  };
  std::vector<Rep> reps = run_replicates<Rep>(replicates, threads, one);
  SubadditiveExperiment out;
  out.replicates = replicates;
  out.median_normalized.normalization = "median d(kappa_0, kappa_n) / n";
  for (std::size_t j = 0; j < n_grid.size(); ++j) {
    std::vector<double> vals;
    for (const Rep& r : reps) {
      // n = 0 contributes d(kappa_0, kappa_0) = 0 un-normalized.
      vals.push_back(n_grid[j] == 0 ? 0.0
                                    : static_cast<double>(r.dists[j]) /
                                          static_cast<double>(n_grid[j]));
    }
    out.median_normalized.points.push_back(
        {static_cast<double>(n_grid[j]), 0.0, median(vals), replicates});
  }
  for (const Rep& r : reps) {
    if (!r.bounded) out.bounded_by_one = false;
    if (!r.triangle) out.triangle_ok = false;
  }
  return out;
}

// ---- Radon-Nikodym bounds -------------------------------------------------

struct RnReport {
  double tree_ratio = 0.0;
  double tree_bound = 0.0;  // gamma^{-3/2}
  double map_chain_max = 0.0;
  double map_bound = 0.0;  // log(alpha^{-3} sigma^{-1/2} exp(9 sigma^2 / 4))
  bool tree_ok = false;
  bool map_ok = false;
};

// Exact tree-side exploration-probability ratio at the extreme admissible
// leftover (gamma * k edges unexplored), against doubling the tree size:
//   [C_{k-r} / C_k] / [C_{2k-r} / C_{2k}],  r = (1 - gamma) k.
inline RnReport rn_bound_check(std::int32_t k, double gamma, double sigma, double alpha) {
  if (k < 2 || gamma <= 0.0 || gamma >= 1.0 || sigma <= 0.0 || alpha <= 0.0 || alpha >= 1.0)
    throw InadmissibleParameters("rn_bound_check needs k >= 2, gamma, alpha in (0,1), sigma > 0");
  RnReport out;
  std::int32_t r = static_cast<std::int32_t>(std::llround((1.0 - gamma) * k));
  mpq_class ratio(catalan(k - r) * catalan(2 * k), catalan(k) * catalan(2 * k - r));
  out.tree_ratio = ratio.get_d();
  out.tree_bound = std::pow(gamma, -1.5);
  out.tree_ok = out.tree_ratio <= 1.05 * out.tree_bound;

  out.map_bound = std::log(std::pow(alpha, -3.0) * std::pow(sigma, -0.5) *
                           std::exp(2.25 * sigma * sigma));
  out.map_chain_max = -1e300;
  for (double f : {1e6, 4e6}) {
    double fp = f;
    for (double l : {alpha * std::sqrt(f), 3.0 * std::sqrt(f), std::sqrt(f) / alpha}) {
      for (double m : {alpha * f, 0.5 * f, f}) {
        double chain = q_asymptotic_log(f + fp, sigma * std::sqrt(f + fp)) -
                       q_asymptotic_log(f, sigma * std::sqrt(f)) + q_asymptotic_log(m, l) -
                       q_asymptotic_log(m + fp, l + sigma * (std::sqrt(f + fp) - std::sqrt(f)));
        out.map_chain_max = std::max(out.map_chain_max, chain);
      }
    }
  }
  out.map_ok = out.map_chain_max <= out.map_bound + 1e-9;
  return out;
}

// ---- Donsker diagnostic ---------------------------------------------------

// KS distance between rescaled contour maxima max C_k / sqrt(2k) at two tree
// sizes; the Donsker regime makes the law scale-stable.
inline double donsker_diagnostic(std::int32_t k_small, std::int32_t k_large,
                                 std::int64_t samples, Rng& rng) {
  if (k_small < 1 || samples < 1 || (k_large != k_small && k_large < 4 * k_small))
    throw InadmissibleParameters("donsker diagnostic needs k_large >= 4 k_small");
  // Both scales are driven by forks of the same generator state, coupling the
  // two samples; equal scales then give KS distance exactly 0.
  auto draw = [&](std::int32_t k, Rng fork) {
    std::vector<double> out;
    for (std::int64_t i = 0; i < samples; ++i) {
      ContourFunction c = contour_of(sample_uniform_tree(k, fork));
      std::int32_t mx = 0;
      for (std::int32_t v : c.values) mx = std::max(mx, v);
      out.push_back(static_cast<double>(mx) / std::sqrt(2.0 * k));
    }
    return out;
  };
  Rng base = rng;
  rng.discard(2);  // advance the caller's stream past this diagnostic
  return ks_distance(draw(k_small, base), draw(k_large, base));
}

// ---- peel-tail experiment -------------------------------------------------

struct PeelTailExperiment {
  IncrementSeries pooled;
  std::vector<CcdfRow> table;
  double slope = 0.0;
  double sup_a_ccdf = 0.0;       // sup over a <= 100 of a * CCDF(a), full pool
  double sup_a_ccdf_half = 0.0;  // same on the first half of the pool
  bool ball_containment_ok = true;
  bool stable = false;  // sup stable within factor 2 under sample doubling
  std::int64_t hosts = 0;
};

// ITQ-proxy peeling host: a spine truncation glued into a critical
// simple-boundary quad with f internal faces. Rejects draws whose realized
// boundary would be too long for f or too short for the tree.
inline std::shared_ptr<const PeelingHost> sample_itq_proxy_host(std::int64_t f,
                                                                std::int32_t spine_len,
                                                                Rng& rng) {
  if (f < 100 || spine_len < 4)
    throw InadmissibleParameters("proxy host needs f >= 100 and spine >= 4");
  for (std::int64_t tries = 0;; ++tries) {
    if (tries >= 100000) throw AcceptanceTooLow("proxy host generation stalled");
    SpineTruncation st;
    try {
      st = sample_infinite_tree_truncation(spine_len, rng, 2 * spine_len);
    } catch (const TooLarge&) {
      continue;
    }
    std::int32_t k = st.spine_tree.tree.edge_count();
    std::int32_t l = k + std::max<std::int32_t>(16, k / 4);
    if (static_cast<double>(l) > 3.0 * std::sqrt(static_cast<double>(f)))
      continue;  // keep sigma moderate
    SimpleSampleResult s;
    try {
      s = sample_simple_boundary_quad(static_cast<std::int32_t>(f), l, 0.3, rng, 20000);
    } catch (const AcceptanceTooLow&) {
      continue;
    }
    if (s.quad.half_perimeter() <= k) continue;
    return std::make_shared<const PeelingHost>(make_peeling_host(s.quad, st));
  }
}

inline PeelTailExperiment peel_tail_experiment(std::int64_t f, std::int32_t spine_len,
                                               std::int64_t hosts, std::uint64_t seed,
                                               std::int32_t threads = 1) {
  if (f < 100 || spine_len < 4 || hosts < 1)
    throw InadmissibleParameters("peel-tail experiment needs f >= 100, spine >= 4, hosts >= 1");
  struct Rep {
    std::vector<std::int32_t> increments;
    bool containment = true;
  };
  auto one = [&](std::int64_t i) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(i));
    {
      std::shared_ptr<const PeelingHost> host = sample_itq_proxy_host(f, spine_len, rng);
      PeelingState state = init_peeling(host, 1);
      std::vector<std::int32_t> base;
      for (std::int32_t v = 0; v < static_cast<std::int32_t>(state.filled.size()); ++v)
        if (state.filled[v]) base.push_back(v);
      std::vector<std::int32_t> dists = bfs_distances(host->window.map, base);
      Rep rep;
      for (;;) {
        PeelingState prev = state;
        try {
          state = peel_step(state);
        } catch (const Exhausted&) {
          break;
        }
        rep.increments.push_back(state.spine_reach - prev.spine_reach);
        for (std::int32_t v = 0; v < static_cast<std::int32_t>(state.filled.size()); ++v)
          if (dists[v] <= state.layer && !state.filled[v]) rep.containment = false;
      }
      return rep;
    }
  };
  std::vector<Rep> reps = run_replicates<Rep>(hosts, threads, one);
  PeelTailExperiment out;
  out.hosts = hosts;
  for (const Rep& r : reps) {
    out.pooled.increments.insert(out.pooled.increments.end(), r.increments.begin(),
                                 r.increments.end());
    out.pooled.layers += static_cast<std::int64_t>(r.increments.size());
    if (!r.containment) out.ball_containment_ok = false;
  }
  out.table = increment_tail_ccdf(out.pooled, 1);
  auto sup_on = [&](const std::vector<std::int32_t>& incs) {
    IncrementSeries s;
    s.increments = incs;
    s.layers = static_cast<std::int64_t>(incs.size());
    std::vector<CcdfRow> t = increment_tail_ccdf(s, 1);
    double sup = 0.0;
    for (const CcdfRow& row : t)
      if (row.a <= 100) sup = std::max(sup, row.a_times_ccdf);
    return sup;
  };
  out.sup_a_ccdf = sup_on(out.pooled.increments);
  std::vector<std::int32_t> half(out.pooled.increments.begin(),
                                 out.pooled.increments.begin() +
                                     out.pooled.increments.size() / 2);
  out.sup_a_ccdf_half = sup_on(half);
  out.stable = out.sup_a_ccdf <= 2.0 * out.sup_a_ccdf_half &&
               out.sup_a_ccdf_half <= 2.0 * out.sup_a_ccdf;
  std::vector<double> samples;
  for (std::int32_t x : out.pooled.increments) samples.push_back(static_cast<double>(x));
  Rng fit_rng = substream(seed, 1u << 30);
  out.slope = fit_tail_exponent(samples, "ccdf_regression", 200, fit_rng).exponent;
  return out;
}

}  // namespace tdq
