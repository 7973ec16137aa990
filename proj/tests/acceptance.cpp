// Acceptance suite: ten end-to-end checks with pinned tolerances, one
// pass/fail line each. Exit status 0 iff every check passes.
//
// Usage: acceptance [criterion-number ...]   (default: run all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tdq/experiments.hpp"
#include "tdq/gluing.hpp"
#include "tdq/peeling.hpp"
#include "tdq/simple_core.hpp"
#include "tdq/stats.hpp"
#include "tdq/tree_exploration.hpp"
#include "tdq/tree_sampler.hpp"
#include "test_util.hpp"

using namespace tdq;

namespace {

// ---- pinned tolerances ----
constexpr double kChiSquarePMin = 0.001;        // tree sampler uniformity
constexpr double kExplorationTvMax = 0.02;      // exploration law TV distance
constexpr double kSimpleTailLo = -1.8;          // simple overshoot CCDF slope
constexpr double kSimpleTailHi = -1.2;
constexpr double kInfiniteTailLo = -0.75;       // infinite overshoot CCDF slope
constexpr double kInfiniteTailHi = -0.3;
constexpr double kPeelSlopeLo = -1.6;           // peeling increment CCDF slope
constexpr double kPeelSlopeHi = -0.8;
constexpr double kStabilityFactor = 2.0;        // sup a*CCDF under doubling
constexpr double kLowerBoundFraction = 0.95;    // diameter lower-bound rate
constexpr double kRnTreeSlack = 1.05;           // tree-side ratio slack

struct Result {
  bool ok = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---- 1: gluing bijection on every (f, k) with 2f + k <= 12 ----
Result criterion_bijection() {
  Result r;
  r.ok = true;
  std::int64_t pairs = 0;
  for (std::int32_t k = 1; k <= 12; ++k) {
    std::vector<PlaneTree> trees;
    testutil::enumerate_trees(k, trees);
    for (std::int32_t f = 0; 2 * f + k <= 12; ++f) {
      std::vector<SimpleBoundaryQuad> qs = enumerate_simple_boundary_quads(f, k);
      if (qs.empty()) continue;
      std::set<std::string> image;
      for (const SimpleBoundaryQuad& q : qs) {
        for (const PlaneTree& t : trees) {
          auto [d, cert] = glue(q, t);
          image.insert(detail::decorated_key(d));
          auto [q2, t2] = cut(d);
          if (!(t2 == t) || detail::canonical_key(q2.map) != detail::canonical_key(q.map))
            r.ok = false;
          ++pairs;
        }
      }
      // |image| = |Q^b_{f,k}| * C_k exactly: equality forces injectivity.
      if (image.size() != qs.size() * trees.size()) r.ok = false;
    }
  }
  r.detail = "glue/cut round trips checked on " + std::to_string(pairs) + " (quad, tree) pairs";
  return r;
}

// ---- 2: metric oracles against plain BFS ----
Result criterion_metric_oracles() {
  Result r;
  r.ok = true;
  Rng rng = substream(20250825, 2);
  // Contour distance == tree graph distance, 100 trees with k <= 500.
  for (int inst = 0; inst < 100; ++inst) {
    std::int32_t k = 1 + static_cast<std::int32_t>(uniform_below(rng, 500));
    PlaneTree t = sample_uniform_tree(k, rng);
    ContourFunction c = contour_of(t);
    std::vector<std::int32_t> cv = contour_vertices(t);
    for (int p = 0; p < 20; ++p) {
      std::int32_t i = static_cast<std::int32_t>(uniform_below(rng, 2 * k + 1));
      std::int32_t j = static_cast<std::int32_t>(uniform_below(rng, 2 * k + 1));
      std::vector<std::int32_t> dist(t.vertex_count(), -1);
      std::vector<std::int32_t> queue{cv[i]};
      dist[cv[i]] = 0;
      for (std::size_t h = 0; h < queue.size(); ++h) {
        std::int32_t v = queue[h];
        std::vector<std::int32_t> nb = t.children[v];
        if (t.parent[v] >= 0) nb.push_back(t.parent[v]);
        for (std::int32_t u : nb)
          if (dist[u] < 0) {
            dist[u] = dist[v] + 1;
            queue.push_back(u);
          }
      }
      if (contour_distance(c, i, j) != dist[cv[j]]) r.ok = false;
    }
  }
  // Quotient chain distance == BFS on the glued map, 100 glued instances with
  // boundary half-perimeter <= 30.
  for (int inst = 0; inst < 100;) {
    std::int32_t k = 2 + static_cast<std::int32_t>(uniform_below(rng, 29));
    std::int32_t f = k + static_cast<std::int32_t>(uniform_below(rng, 3 * k));
    SimpleSampleResult s;
    try {
      s = sample_simple_boundary_quad(f, k, 0.4, rng, 20000);
    } catch (const AcceptanceTooLow&) {
      continue;
    }
    const SimpleBoundaryQuad& q = s.quad;
    PlaneTree t = sample_uniform_tree(q.half_perimeter(), rng);
    auto [d, cert] = glue(q, t);
    std::int32_t two_l = 2 * q.half_perimeter();
    for (std::int32_t a = 0; a < two_l; ++a) {
      std::vector<std::int32_t> on_glued = bfs_distances(d.map, {cert.vertex_class_map[a]});
      for (std::int32_t b = 0; b < two_l; ++b)
        if (quotient_chain_distance(q, cert, q.boundary_vertices[a], q.boundary_vertices[b]) !=
            on_glued[cert.vertex_class_map[b]])
          r.ok = false;
    }
    ++inst;
  }
  r.detail = "contour vs tree BFS (k <= 500) and quotient chain vs glued-map BFS "
             "(half-perimeter <= 30), 100 instances each, exact";
  return r;
}

// ---- 3: tree sampler uniformity and exploration law ----
Result criterion_tree_sampler() {
  Result r;
  const std::int32_t n = 100000;
  Rng rng = substream(20250825, 3);
  // Chi-square over all 14 plane trees with 4 edges.
  std::map<std::string, std::int64_t> counts;
  for (std::int32_t i = 0; i < n; ++i) counts[to_parens(sample_uniform_tree(4, rng))]++;
  std::vector<std::int64_t> observed;
  for (auto& [key, c] : counts) observed.push_back(c);
  std::vector<double> expected(observed.size(), 1.0 / 14.0);
  double pvalue = counts.size() == 14
                      ? chi_square_pvalue(chi_square_statistic(observed, expected), 13.0)
                      : 0.0;
  // Exploration law at k = 6, j = 3 against the exact Catalan-ratio formula.
  const std::int32_t k = 6, j = 3;
  std::vector<PlaneTree> trees;
  testutil::enumerate_trees(k, trees);
  auto key_of = [](const MarkedTree& mt) {
    return to_parens(mt.tree) + "|" + std::to_string(mt.marked_vertex) + "," +
           std::to_string(mt.marked_slot);
  };
  std::map<std::string, mpq_class> exact;
  for (const PlaneTree& t : trees) {
    MarkedTree mt = explore_tree(t, j);
    exact[key_of(mt)] = exploration_probability(mt, k);
  }
  std::map<std::string, std::int64_t> mc;
  bool outcomes_ok = true;
  for (std::int32_t i = 0; i < n; ++i) {
    std::string key = key_of(explore_tree(sample_uniform_tree(k, rng), j));
    if (exact.count(key) == 0) outcomes_ok = false;
    mc[key]++;
  }
  double tv = 0.0;
  for (auto& [key, p] : exact) {
    double empirical = mc.count(key) ? static_cast<double>(mc[key]) / n : 0.0;
    tv += std::fabs(empirical - p.get_d());
  }
  tv /= 2.0;
  r.ok = pvalue > kChiSquarePMin && tv < kExplorationTvMax && outcomes_ok;
  r.detail = "chi-square p = " + fmt(pvalue) + " (need > " + fmt(kChiSquarePMin) +
             "), exploration TV = " + fmt(tv) + " (need < " + fmt(kExplorationTvMax) + ")";
  return r;
}

// ---- 4: boundary overshoot tail exponents ----
Result criterion_overshoot() {
  OvershootExperiment e = overshoot_experiment(100000, 949, 1026, 20250825, 1,
                                               /*window_divisor=*/20, /*sampler_window=*/0.35,
                                               /*dense_probes=*/true);
  Result r;
  double s = e.simple_fit.exponent, i = e.infinite_fit.exponent;
  bool s_ok = s >= kSimpleTailLo && s <= kSimpleTailHi;
  bool i_ok = i >= kInfiniteTailLo && i <= kInfiniteTailHi;
  r.ok = s_ok && i_ok && e.dominance_ok;
  r.detail = "simple slope " + fmt(s) + " in [" + fmt(kSimpleTailLo) + ", " +
             fmt(kSimpleTailHi) + "]: " + (s_ok ? "yes" : "NO") + "; infinite slope " + fmt(i) +
             " in [" + fmt(kInfiniteTailLo) + ", " + fmt(kInfiniteTailHi) +
             "]: " + (i_ok ? "yes" : "NO") + "; dominance " +
             (e.dominance_ok ? "ok" : "VIOLATED") + "; " +
             std::to_string(e.simple_fit.sample_count) + " probes on " +
             std::to_string(e.quads) + " quads (f = 1e5, l = 949)";
  return r;
}

// ---- 5: peeling ball containment and increment tail ----
Result criterion_peeling() {
  PeelTailExperiment e = peel_tail_experiment(20000, 10, 240, 20250825, 1);
  Result r;
  bool slope_ok = e.slope >= kPeelSlopeLo && e.slope <= kPeelSlopeHi;
  r.ok = e.ball_containment_ok && slope_ok && e.stable;
  r.detail = std::string("ball containment ") +
             (e.ball_containment_ok ? "exact" : "VIOLATED (hard failure)") +
             "; increment CCDF slope " + fmt(e.slope) + " in [" + fmt(kPeelSlopeLo) + ", " +
             fmt(kPeelSlopeHi) + "]: " + (slope_ok ? "yes" : "NO") + "; sup a*CCDF " +
             fmt(e.sup_a_ccdf) + " vs " + fmt(e.sup_a_ccdf_half) +
             " on half the pool (factor-2 stable: " + (e.stable ? "yes" : "NO") + "); " +
             std::to_string(e.pooled.increments.size()) + " increments from " +
             std::to_string(e.hosts) + " hosts";
  return r;
}

// ---- 6: overshoot-vs-tau claim oracle ----
Result criterion_claim_oracle() {
  Result r;
  auto sweep = [](std::int64_t samples, std::uint64_t salt) {
    Rng rng = substream(20250825, salt);
    double sup = 0.0;
    for (std::int64_t a = 1; a <= 1000; ++a)
      sup = std::max(sup, static_cast<double>(a) *
                              overshoot_vs_tau_oracle(a, samples, 1.5, rng));
    return sup;
  };
  double full = sweep(1000000, 6);
  double half = sweep(500000, 7);
  bool stable = full <= kStabilityFactor * half && half <= kStabilityFactor * full;
  r.ok = std::isfinite(full) && std::isfinite(half) && stable;
  r.detail = "sup_{a<=1000} a * P(O >= sum tau_i): " + fmt(full) + " at 1e6 samples, " +
             fmt(half) + " at 5e5 (factor-2 stable: " + (stable ? "yes" : "NO") + ")";
  return r;
}

// ---- 7: diameter scaling ----
Result criterion_diameter() {
  DiameterExperiment e = diameter_experiment({1000, 10000, 100000}, 1.0, 2.0, 50, 20250825, 1);
  Result r;
  r.ok = e.monotone_decreasing && e.lower_bound_ok && e.tree_dominance_ok;
  std::string meds;
  for (const ScalingPoint& p : e.median_normalized.points)
    meds += (meds.empty() ? "" : ", ") + fmt(p.value);
  std::string fracs;
  for (const ScalingPoint& p : e.lower_bound_fraction.points)
    fracs += (fracs.empty() ? "" : ", ") + fmt(p.value);
  r.detail = "median diam/f^{1/4} = [" + meds + "] strictly decreasing: " +
             (e.monotone_decreasing ? "yes" : "NO") + "; P(diam >= f^{1/4}/log^2 f) = [" + fracs +
             "] all >= " + fmt(kLowerBoundFraction) + ": " + (e.lower_bound_ok ? "yes" : "NO") +
             "; 50 replicates per f";
  return r;
}

// ---- 8: subadditivity along the spine ----
Result criterion_subadditive() {
  SubadditiveExperiment e = subadditive_experiment({5, 10, 20, 40}, 44, 12, 20250825, 1);
  Result r;
  bool monotone = true;
  for (std::size_t i = 1; i < e.median_normalized.points.size(); ++i)
    if (e.median_normalized.points[i].value > e.median_normalized.points[i - 1].value)
      monotone = false;
  bool drops = e.median_normalized.points.back().value <
               e.median_normalized.points.front().value;
  r.ok = monotone && drops && e.triangle_ok && e.bounded_by_one;
  std::string meds;
  for (const ScalingPoint& p : e.median_normalized.points)
    meds += (meds.empty() ? "" : ", ") + fmt(p.value);
  r.detail = "median d(kappa_0, kappa_n)/n = [" + meds +
             "] over n = 5,10,20,40, decreasing: " + (monotone && drops ? "yes" : "NO") +
             "; triangle identity exact on every instance: " +
             (e.triangle_ok ? "yes" : "NO") + "; d <= n everywhere: " +
             (e.bounded_by_one ? "yes" : "NO");
  return r;
}

// ---- 9: Radon-Nikodym-style bounds ----
Result criterion_rn_bounds() {
  Result r;
  r.ok = true;
  std::string parts;
  for (std::int32_t k : {50, 100, 200}) {
    RnReport rep = rn_bound_check(k, 0.25, 1.0, 0.1);
    if (!rep.tree_ok || !rep.map_ok) r.ok = false;
    parts += (parts.empty() ? "" : "; ") + ("k=" + std::to_string(k) + " tree ratio " +
                                            fmt(rep.tree_ratio) + " <= " +
                                            fmt(kRnTreeSlack * rep.tree_bound) +
                                            (rep.tree_ok ? "" : " NO"));
  }
  RnReport rep = rn_bound_check(100, 0.25, 1.0, 0.1);
  parts += "; map chain " + fmt(rep.map_chain_max) + " <= log bound " + fmt(rep.map_bound) +
           (rep.map_ok ? "" : " NO");
  r.detail = parts + " (gamma = 0.25, sigma = 1, alpha = 0.1)";
  return r;
}

// ---- 10: determinism across thread counts ----
std::string serialize_diameter(const DiameterExperiment& e) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& grid : e.raw)
    for (double d : grid) os << d << ",";
  for (const ScalingPoint& p : e.median_normalized.points)
    os << p.f << ":" << p.sigma_realized << ":" << p.value << ";";
  os << e.monotone_decreasing << e.lower_bound_ok << e.tree_dominance_ok;
  return os.str();
}

Result criterion_determinism() {
  Result r;
  std::string base = serialize_diameter(diameter_experiment({200, 400}, 1.0, 2.0, 8, 77, 1));
  r.ok = true;
  for (std::int32_t threads : {2, 4, 8})
    if (serialize_diameter(diameter_experiment({200, 400}, 1.0, 2.0, 8, 77, threads)) != base)
      r.ok = false;
  r.detail = std::string("same-seed reports byte-identical for 1, 2, 4, 8 threads: ") +
             (r.ok ? "yes" : "NO") + " (CLI-level check lives in cli_test.sh)";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int number;
    const char* name;
    Result (*run)();
  };
  const std::vector<Entry> entries = {
      {1, "gluing bijection", criterion_bijection},
      {2, "metric oracles", criterion_metric_oracles},
      {3, "tree sampler law", criterion_tree_sampler},
      {4, "overshoot tails", criterion_overshoot},
      {5, "peeling increments", criterion_peeling},
      {6, "claim oracle", criterion_claim_oracle},
      {7, "diameter scaling", criterion_diameter},
      {8, "spine subadditivity", criterion_subadditive},
      {9, "rn bounds", criterion_rn_bounds},
      {10, "determinism", criterion_determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  bool all_ok = true;
  for (const Entry& e : entries) {
    if (!wanted.empty() && wanted.count(e.number) == 0) continue;
    auto t0 = std::chrono::steady_clock::now();
    Result res;
    try {
      res = e.run();
    } catch (const std::exception& ex) {
      res.ok = false;
      res.detail = std::string("exception: ") + ex.what();
    }
    std::printf("criterion %2d (%s): %s — %s [%.1fs]\n", e.number, e.name,
                res.ok ? "PASS" : "FAIL", res.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!res.ok) all_ok = false;
  }
  return all_ok ? 0 : 1;
}
