#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tdq/peeling.hpp"
#include "tdq/stats.hpp"

using namespace tdq;

namespace {

// Samples a peeling host: a spine truncation glued into a long-boundary quad.
// Returns nullptr when the rejection samplers fail for this draw.
std::shared_ptr<const PeelingHost> try_host(std::int32_t spine_len, std::int32_t max_k,
                                            std::int32_t slack, std::int32_t bush_cap, Rng& rng) {
  SpineTruncation st;
  try {
    st = sample_infinite_tree_truncation(spine_len, rng, bush_cap);
  } catch (const TooLarge&) {
    return nullptr;
  }
  std::int32_t k = st.spine_tree.tree.edge_count();
  if (k > max_k) return nullptr;
  std::int32_t target_l = k + slack;
  SimpleSampleResult s;
  try {
    s = sample_simple_boundary_quad(target_l * target_l, target_l, 0.4, rng, 20000);
  } catch (const AcceptanceTooLow&) {
    return nullptr;
  }
  if (s.quad.half_perimeter() <= k) return nullptr;
  return std::make_shared<const PeelingHost>(make_peeling_host(s.quad, st));
}

std::vector<std::int32_t> filled_vertices(const PeelingState& s) {
  std::vector<std::int32_t> out;
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(s.filled.size()); ++v)
    if (s.filled[v]) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("initial layer is the glued image of the spine segment and its trees") {
  Rng rng = substream(461, 0);
  int done = 0;
  while (done < 10) {
    auto host = try_host(6, 40, 5, 4, rng);
    if (!host) continue;
    ++done;
    for (std::int32_t r : {0, 2}) {
      PeelingState s = init_peeling(host, r);
      REQUIRE(s.layer == 0);
      REQUIRE(s.spine_reach == r);
      std::vector<char> image(s.filled.size(), 0);
      for (std::int32_t n = 0; n <= r; ++n)
        for (std::int32_t v : host->tree_images[n]) image[v] = 1;
      for (std::int32_t v = 0; v < static_cast<std::int32_t>(image.size()); ++v)
        if (image[v]) REQUIRE(s.filled[v] == 1);
      // Anything filled beyond the image must be a pocket cut off from the
      // target by the image itself (the filled-in part of the exploration).
      std::vector<char> reach(image.size(), 0);
      std::vector<std::int32_t> stack{host->target_vertex};
      reach[host->target_vertex] = 1;
      while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        for (std::int32_t u : (*s.adjacency)[v])
          if (!image[u] && !reach[u]) {
            reach[u] = 1;
            stack.push_back(u);
          }
      }
      for (std::int32_t v = 0; v < static_cast<std::int32_t>(image.size()); ++v)
        if (s.filled[v] && !image[v]) REQUIRE(reach[v] == 0);
    }
  }
}

TEST_CASE("ball containment holds exactly on every peeled instance") {
  Rng rng = substream(463, 0);
  int hosts = 0;
  std::int64_t zero_free = 0, total_inc = 0;
  while (hosts < 8) {
    auto host = try_host(25, 160, 20, 4, rng);
    if (!host) continue;
    ++hosts;
    PeelingState s = init_peeling(host, 1);
    std::vector<std::int32_t> dists = bfs_distances(host->window.map, filled_vertices(s));
    std::int32_t n = static_cast<std::int32_t>(s.filled.size());
    for (int guard = 0; guard < 200; ++guard) {
      PeelingState before = s;
      try {
        s = peel_step(s);
      } catch (const Exhausted&) {
        break;
      }
      std::int32_t inc = s.spine_reach - before.spine_reach;
      REQUIRE(inc >= 1);  // the next spine vertex neighbors the reach
      ++total_inc;
      if (inc == 1) ++zero_free;
      for (std::int32_t v = 0; v < n; ++v) {
        // The flagship exact property: B(p, l) inside p^(l), i.e. everything
        // unexplored is strictly farther than l.
        if (dists[v] <= s.layer) REQUIRE(s.filled[v] == 1);
        if (before.filled[v]) REQUIRE(s.filled[v] == 1);  // monotone
      }
      // The unexplored part stays one connected region around the target.
      if (!s.filled[host->target_vertex]) {
        std::vector<char> reach(n, 0);
        std::vector<std::int32_t> stack{host->target_vertex};
        reach[host->target_vertex] = 1;
        std::int64_t seen = 1;
        while (!stack.empty()) {
          std::int32_t v = stack.back();
          stack.pop_back();
          for (std::int32_t u : (*s.adjacency)[v])
            if (!s.filled[u] && !reach[u]) {
              reach[u] = 1;
              ++seen;
              stack.push_back(u);
            }
        }
        std::int64_t unfilled = 0;
        for (std::int32_t v = 0; v < n; ++v)
          if (!s.filled[v]) ++unfilled;
        REQUIRE(seen == unfilled);
      }
    }
  }
  REQUIRE(total_inc >= 40);
  REQUIRE(zero_free >= 1);  // minimal steps do occur
}

TEST_CASE("peeling error paths") {
  Rng rng = substream(467, 0);
  std::shared_ptr<const PeelingHost> host;
  while (!host) host = try_host(3, 30, 4, 3, rng);
  REQUIRE_THROWS_AS(init_peeling(host, 3), SpineTooShort);
  REQUIRE_THROWS_AS(init_peeling(host, -1), SpineTooShort);
  PeelingState s = init_peeling(host, 0);
  bool exhausted = false;
  for (int i = 0; i < 500 && !exhausted; ++i) {
    try {
      s = peel_step(s);
    } catch (const Exhausted&) {
      exhausted = true;
    }
  }
  REQUIRE(exhausted);
}

TEST_CASE("increment CCDF table and pooling") {
  IncrementSeries a, b;
  for (int i = 0; i < 300; ++i) {
    a.increments.insert(a.increments.end(), {1, 1, 3});
    b.increments.push_back(2);
  }
  a.layers = 900;
  b.layers = 300;
  REQUIRE_THROWS_AS(increment_tail_ccdf(b), TooFewSamples);
  a.merge(b);
  REQUIRE(a.layers == 1200);
  std::vector<CcdfRow> table = increment_tail_ccdf(a);
  REQUIRE(table.size() == 3);
  REQUIRE(table[0].ccdf == Catch::Approx(1.0));
  REQUIRE(table[1].ccdf == Catch::Approx(600.0 / 1200.0));
  REQUIRE(table[2].ccdf == Catch::Approx(300.0 / 1200.0));
  REQUIRE(table[2].a_times_ccdf == Catch::Approx(3.0 * 300.0 / 1200.0));
  for (std::size_t i = 1; i < table.size(); ++i) REQUIRE(table[i].ccdf <= table[i - 1].ccdf);
}

TEST_CASE("overshoot-vs-tau oracle matches the a=1 series") {
  Rng rng = substream(471, 0);
  double series = overshoot_vs_tau_series(1.5);
  double est = overshoot_vs_tau_oracle(1, 300000, 1.5, rng);
  REQUIRE(est == Catch::Approx(series).margin(0.005));
  REQUIRE_THROWS_AS(overshoot_vs_tau_oracle(0, 10, 1.5, rng), InadmissibleParameters);
  REQUIRE_THROWS_AS(overshoot_vs_tau_oracle(1, 10, 1.0, rng), InadmissibleParameters);
}

TEST_CASE("overshoot-vs-tau estimates decay like 1/a") {
  Rng rng = substream(473, 0);
  double e1 = overshoot_vs_tau_oracle(1, 200000, 1.5, rng);
  double e8 = overshoot_vs_tau_oracle(8, 200000, 1.5, rng);
  double e64 = overshoot_vs_tau_oracle(64, 200000, 1.5, rng);
  REQUIRE(e8 <= e1 + 0.005);
  REQUIRE(e64 <= e8 + 0.005);
  // Light stability probe of a * estimate under sample doubling.
  for (std::int64_t a : {16, 64, 256}) {
    double half = static_cast<double>(a) * overshoot_vs_tau_oracle(a, 100000, 1.5, rng);
    double full = static_cast<double>(a) * overshoot_vs_tau_oracle(a, 200000, 1.5, rng);
    REQUIRE(std::isfinite(half));
    REQUIRE(std::isfinite(full));
    REQUIRE(full <= 2.0 * half + 0.5);
    REQUIRE(half <= 2.0 * full + 0.5);
  }
}

TEST_CASE("exploration's finite Markov shadow on the undecorated preimage") {
  // Reveal all faces at boundary vertex 0 of a uniform simple-boundary quad
  // and fill the pockets cut off from the antipode. Given the leftover's
  // (face count, half-edge count), its interface split between original
  // outer-face sides and scar sides, and the interface pinch count, the law
  // of the unexplored region must not depend on which explored configuration
  // produced it. Chi-square homogeneity between the two most frequent
  // explored classes per cell, on a coarse unexplored-region statistic.
  Rng rng = substream(479, 0);
  std::map<std::tuple<int, int, int, int>, std::map<std::string, std::map<std::string, int>>>
      data;
  for (int i = 0; i < 12000; ++i) {
    SimpleSampleResult s = sample_simple_boundary_quad(8, 3, 0.0, rng, 200000);
    const HalfEdgeMap& m = s.quad.map;
    FaceDecomposition fd = faces(m);
    std::int32_t v0 = s.quad.boundary_vertices[0];
    std::int32_t target = s.quad.boundary_vertices[s.quad.half_perimeter()];
    std::vector<char> peeled(fd.faces.size(), 0);
    for (std::size_t f = 0; f < fd.faces.size(); ++f) {
      if (static_cast<int>(f) == fd.root_face) continue;
      for (std::int32_t e : fd.faces[f])
        if (m.origin(e) == v0) peeled[f] = 1;
    }
    // Keep the face component still connected to the antipode; everything
    // else is filled in (the exploration with target).
    std::vector<char> reach(fd.faces.size(), 0);
    std::vector<std::int32_t> stack;
    for (std::size_t f = 0; f < fd.faces.size(); ++f) {
      if (static_cast<int>(f) == fd.root_face || peeled[f]) continue;
      for (std::int32_t e : fd.faces[f])
        if (m.origin(e) == target && !reach[f]) {
          reach[f] = 1;
          stack.push_back(static_cast<std::int32_t>(f));
        }
    }
    while (!stack.empty()) {
      std::int32_t f = stack.back();
      stack.pop_back();
      for (std::int32_t e : fd.faces[f]) {
        std::int32_t g = fd.face_of[m.twin(e)];
        if (g == fd.root_face || peeled[g] || reach[g]) continue;
        reach[g] = 1;
        stack.push_back(g);
      }
    }
    std::vector<char> uns(fd.faces.size(), 0), expl(fd.faces.size(), 0);
    int uf = 0;
    for (std::size_t f = 0; f < fd.faces.size(); ++f) {
      if (static_cast<int>(f) == fd.root_face) continue;
      if (reach[f]) {
        uns[f] = 1;
        ++uf;
      } else {
        expl[f] = 1;
      }
    }
    if (uf == 0 || uf == s.quad.internal_faces) continue;
    std::vector<char> uhe(m.half_edge_count(), 0);
    for (std::size_t f = 0; f < fd.faces.size(); ++f)
      if (uns[f])
        for (std::int32_t e : fd.faces[f]) uhe[e] = uhe[m.twin(e)] = 1;
    int uh = 0;
    for (std::int32_t e = 0; e < m.half_edge_count(); ++e) uh += uhe[e];
    // Coarse unexplored statistic: (max degree, eccentricity of the target).
    std::map<std::int32_t, int> deg;
    for (std::int32_t e = 0; e < m.half_edge_count(); ++e)
      if (uhe[e]) deg[m.origin(e)]++;
    int maxdeg = 0;
    for (auto& [v, d] : deg) maxdeg = std::max(maxdeg, d);
    std::map<std::int32_t, int> dist;
    dist[target] = 0;
    std::vector<std::int32_t> bq{target};
    std::size_t qh = 0;
    int ecc = 0;
    while (qh < bq.size()) {
      std::int32_t v = bq[qh++];
      m.for_half_edges_at(v, [&](std::int32_t e) {
        if (!uhe[e]) return;
        std::int32_t u = m.target(e);
        if (!dist.count(u)) {
          dist[u] = dist[v] + 1;
          ecc = std::max(ecc, dist[u]);
          bq.push_back(u);
        }
      });
    }
    std::string ukey = "d" + std::to_string(maxdeg) + "e" + std::to_string(ecc);
    // Explored class: root-free canonical key of the explored face region.
    std::vector<char> ehe(m.half_edge_count(), 0);
    for (std::size_t f = 0; f < fd.faces.size(); ++f)
      if (expl[f])
        for (std::int32_t e : fd.faces[f]) ehe[e] = ehe[m.twin(e)] = 1;
    std::vector<std::int32_t> hid(m.half_edge_count(), -1), vid(m.vertex_count(), -1);
    std::int32_t hn = 0, vn = 0;
    for (std::int32_t e = 0; e < m.half_edge_count(); ++e)
      if (ehe[e]) hid[e] = hn++;
    for (std::int32_t e = 0; e < m.half_edge_count(); ++e)
      if (ehe[e] && vid[m.origin(e)] < 0) vid[m.origin(e)] = vn++;
    std::vector<std::int32_t> twin(hn), next(hn), origin(hn);
    for (std::int32_t e = 0; e < m.half_edge_count(); ++e) {
      if (hid[e] < 0) continue;
      twin[hid[e]] = hid[m.twin(e)];
      origin[hid[e]] = vid[m.origin(e)];
      std::int32_t f2 = m.next_at_vertex(e);
      while (hid[f2] < 0) f2 = m.next_at_vertex(f2);
      next[hid[e]] = hid[f2];
    }
    std::string ekey;
    for (std::int32_t r = 0; r < hn; ++r) {
      CanonicalTables ct = canonical_tables(twin, next, origin, r, vn);
      std::string sk;
      for (std::int32_t e = 0; e < hn; ++e)
        sk += std::to_string(ct.twin[e]) + "," + std::to_string(ct.next[e]) + "," +
              std::to_string(ct.origin[e]) + ";";
      if (ekey.empty() || sk < ekey) ekey = sk;
    }
    int bl_out = 0, bl_scar = 0, pinch = 0;
    std::map<std::int32_t, int> bvis;
    for (std::int32_t e = 0; e < m.half_edge_count(); ++e) {
      if (!uhe[e]) continue;
      std::int32_t g = fd.face_of[e];
      if (g != fd.root_face && uns[g]) continue;
      if (g == fd.root_face)
        ++bl_out;
      else
        ++bl_scar;
      bvis[m.origin(e)]++;
      bvis[m.target(e)]++;
    }
    for (auto& [v, c] : bvis)
      if (c > 2) ++pinch;
    data[{uf, uh, bl_out, pinch}][ekey][ukey]++;
  }
  double stat = 0;
  int dof = 0, cells_used = 0;
  for (auto& [cell, emap] : data) {
    std::vector<std::pair<int, std::string>> sizes;
    for (auto& [ek, um] : emap) {
      int n = 0;
      for (auto& [uk, c] : um) n += c;
      sizes.push_back({n, ek});
    }
    if (sizes.size() < 2) continue;
    std::sort(sizes.rbegin(), sizes.rend());
    if (sizes[1].first < 30) continue;
    auto& g0 = emap[sizes[0].second];
    auto& g1 = emap[sizes[1].second];
    int n0 = sizes[0].first, n1 = sizes[1].first;
    std::map<std::string, std::pair<int, int>> tab;
    for (auto& [uk, c] : g0) tab[uk].first += c;
    for (auto& [uk, c] : g1) tab[uk].second += c;
    std::pair<int, int> other{0, 0};
    std::vector<std::pair<int, int>> cats;
    for (auto& [uk, c] : tab) {
      if (c.first + c.second < 10) {
        other.first += c.first;
        other.second += c.second;
      } else {
        cats.push_back(c);
      }
    }
    if (other.first + other.second > 0) cats.push_back(other);
    if (cats.size() < 2) continue;
    ++cells_used;
    double tot = n0 + n1;
    for (auto& [a, b] : cats) {
      double e0 = (a + b) * (n0 / tot), e1 = (a + b) * (n1 / tot);
      stat += (a - e0) * (a - e0) / e0 + (b - e1) * (b - e1) / e1;
    }
    dof += static_cast<int>(cats.size()) - 1;
  }
  REQUIRE(cells_used >= 3);
  REQUIRE(chi_square_pvalue(stat, static_cast<double>(dof)) > 0.001);
}

TEST_CASE("centered heavy-tail sums: Cauchy-domain stability and contrast") {
  Rng rng = substream(477, 0);
  std::vector<double> s100 = cauchy_sum_probe(100, 400, rng);
  std::vector<double> s1000 = cauchy_sum_probe(1000, 400, rng);
  REQUIRE(std::abs(median(s100) - median(s1000)) < 2.5);
  // Upper tail heavier than Gaussian: large excess kurtosis.
  double m = 0, v = 0, k4 = 0;
  for (double x : s100) m += x;
  m /= static_cast<double>(s100.size());
  for (double x : s100) {
    v += (x - m) * (x - m);
    k4 += std::pow(x - m, 4.0);
  }
  v /= static_cast<double>(s100.size());
  k4 /= static_cast<double>(s100.size());
  REQUIRE(k4 / (v * v) > 4.0);
  // Tail exponent 2 concentrates in comparison.
  std::vector<double> t1000 = cauchy_sum_probe(1000, 400, rng, 1.0, 2.0);
  double iqr1 = quantile(s1000, 0.75) - quantile(s1000, 0.25);
  double iqr2 = quantile(t1000, 0.75) - quantile(t1000, 0.25);
  REQUIRE(iqr2 < iqr1 / 3.0);
  REQUIRE_THROWS_AS(cauchy_sum_probe(5, 10, rng), InadmissibleParameters);
}
