#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <string>

#include "tdq/stats.hpp"
#include "tdq/tree_sampler.hpp"
#include "test_util.hpp"

using namespace tdq;

TEST_CASE("sampled Dyck paths are valid and trees have the right size") {
  Rng rng = substream(101, 0);
  for (std::int32_t k : {1, 2, 7, 100}) {
    ContourFunction c = sample_uniform_dyck_path(k, rng);
    c.validate();
    REQUIRE(c.edge_count() == k);
    REQUIRE(sample_uniform_tree(k, rng).edge_count() == k);
  }
}

TEST_CASE("substreams are reproducible") {
  Rng a = substream(42, 7), b = substream(42, 7), c = substream(42, 8);
  REQUIRE(a() == b());
  REQUIRE(a() != c());
}

TEST_CASE("uniform tree sampler is uniform at k=3") {
  const std::int32_t n = 100000;
  Rng rng = substream(103, 0);
  std::map<std::string, std::int64_t> counts;
  for (std::int32_t i = 0; i < n; ++i) counts[to_parens(sample_uniform_tree(3, rng))]++;
  REQUIRE(counts.size() == 5);
  std::vector<std::int64_t> observed;
  for (auto& [key, c] : counts) observed.push_back(c);
  std::vector<double> expected(5, 0.2);
  double stat = chi_square_statistic(observed, expected);
  REQUIRE(chi_square_pvalue(stat, 4) > 0.001);
}

TEST_CASE("uniform tree sampler reaches all 14 trees at k=4") {
  Rng rng = substream(107, 0);
  std::map<std::string, std::int64_t> counts;
  for (std::int32_t i = 0; i < 2000; ++i) counts[to_parens(sample_uniform_tree(4, rng))]++;
  REQUIRE(counts.size() == 14);
}

TEST_CASE("critical geometric GW tree size law") {
  // P(size = n edges) = C_n / 2^(2n+1): the first-hitting law of SRW at -1.
  // Sizes are heavy-tailed (infinite mean); trees over the cap land in the
  // tail bin, which keeps the classification exact.
  const std::int32_t n = 5000;
  Rng rng = substream(109, 0);
  std::vector<std::int64_t> observed(7, 0);  // sizes 0..5 and a tail bin
  for (std::int32_t i = 0; i < n; ++i) {
    std::int32_t sz;
    try {
      sz = sample_critical_geometric_gw_tree(rng, 1 << 20).edge_count();
    } catch (const TooLarge&) {
      sz = 1 << 20;
    }
    observed[std::min(sz, 6)]++;
  }
  const double cat[] = {1, 1, 2, 5, 14, 42};
  std::vector<double> expected;
  double tail = 1.0;
  for (std::int32_t s = 0; s <= 5; ++s) {
    double p = cat[s] / std::pow(2.0, 2 * s + 1);
    expected.push_back(p);
    tail -= p;
  }
  expected.push_back(tail);
  double stat = chi_square_statistic(observed, expected);
  REQUIRE(chi_square_pvalue(stat, 6) > 0.001);
}

TEST_CASE("GW tree shape law: every shape of size k has probability 2^-(2k+1)") {
  // The product over vertices of the geometric offspring weights collapses
  // to 2^-(2k+1), uniformly over shapes of a given size.
  const std::int32_t n = 20000;
  Rng rng = substream(113, 0);
  std::map<std::string, std::int64_t> counts;
  std::int64_t tail = 0;
  for (std::int32_t i = 0; i < n; ++i) {
    try {
      PlaneTree t = sample_critical_geometric_gw_tree(rng, 100);
      if (t.edge_count() <= 3)
        counts[to_parens(t)]++;
      else
        ++tail;
    } catch (const TooLarge&) {
      ++tail;
    }
  }
  std::vector<std::int64_t> observed;
  std::vector<double> expected;
  double rest = 1.0;
  for (auto& [shape, c] : counts) {
    observed.push_back(c);
    std::int32_t k = static_cast<std::int32_t>(shape.size()) / 2;
    double p = std::pow(2.0, -(2 * k + 1));
    expected.push_back(p);
    rest -= p;
  }
  REQUIRE(counts.size() == 9);  // 1 + 1 + 2 + 5 shapes of sizes 0..3
  observed.push_back(tail);
  expected.push_back(rest);
  double stat = chi_square_statistic(observed, expected);
  REQUIRE(chi_square_pvalue(stat, static_cast<double>(observed.size() - 1)) > 0.001);
}

TEST_CASE("h-transform step is the Doob conditioning of SRW") {
  // Exact check over all conditioned paths of length <= 10 from 0:
  // probabilities sum to 1 and E[1/h(X_n)] equals the n-step survival
  // probability of plain SRW, the signature of the Doob transform with
  // h(x) = x + 1.
  struct Node {
    std::int32_t x;
    double prob;
  };
  std::vector<Node> layer{{0, 1.0}};
  std::vector<double> survival(32, 1.0);  // survival[x] = P(SRW from x stays >= 0)
  for (std::int32_t step = 1; step <= 10; ++step) {
    std::vector<Node> next;
    for (const Node& nd : layer) {
      double p_up = static_cast<double>(nd.x + 2) / (2.0 * (nd.x + 1));
      next.push_back({nd.x + 1, nd.prob * p_up});
      if (nd.x > 0) next.push_back({nd.x - 1, nd.prob * (1.0 - p_up)});
    }
    std::vector<double> s(32, 0.0);
    for (std::int32_t x = 0; x + step < 32; ++x)
      s[x] = 0.5 * survival[x + 1] + (x > 0 ? 0.5 * survival[x - 1] : 0.0);
    survival = std::move(s);
    double total = 0, mean_inv_h = 0;
    for (const Node& nd : next) {
      total += nd.prob;
      mean_inv_h += nd.prob / (nd.x + 1);
    }
    REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(mean_inv_h, Catch::Matchers::WithinAbs(survival[0], 1e-12));
    layer = std::move(next);
  }
  // Survival-conditioned SRW converges to the same up-probabilities:
  // P(up from x | stay >= 0 for n steps) -> (x+2)/(2(x+1)).
  const std::int32_t horizon = 4000;
  std::vector<double> q(horizon + 10, 1.0), qn(horizon + 10, 0.0);
  for (std::int32_t n = 1; n <= horizon; ++n) {
    for (std::int32_t x = 0; x + n <= horizon + 5; ++x)
      qn[x] = 0.5 * q[x + 1] + (x > 0 ? 0.5 * q[x - 1] : 0.0);
    std::swap(q, qn);
  }
  for (std::int32_t x = 0; x <= 5; ++x) {
    double conditioned_up = 0.5 * q[x + 1] / (0.5 * q[x + 1] + (x > 0 ? 0.5 * q[x - 1] : 0.0));
    double formula = static_cast<double>(x + 2) / (2.0 * (x + 1));
    REQUIRE_THAT(conditioned_up, Catch::Matchers::WithinAbs(formula, 2e-3));
  }
  // Empirical up-step frequency from a fixed state matches the formula.
  Rng rng = substream(127, 0);
  std::int64_t ups = 0;
  const std::int32_t n = 100000;
  for (std::int32_t i = 0; i < n; ++i)
    if (h_transform_step(2, rng) == 3) ++ups;
  REQUIRE_THAT(static_cast<double>(ups) / n, Catch::Matchers::WithinAbs(4.0 / 6.0, 0.01));
}

namespace {

void check_spine(const SpineTruncation& st) {
  const PlaneTree& t = st.spine_tree.tree;
  const auto& spine = st.spine_tree.spine;
  for (std::size_t i = 0; i + 1 < spine.size(); ++i) {
    bool adjacent = t.parent[spine[i + 1]] == spine[i] || t.parent[spine[i]] == spine[i + 1];
    REQUIRE(adjacent);
  }
  REQUIRE(static_cast<std::int32_t>(st.spine_attach.size()) == t.vertex_count());
  for (std::int32_t a : st.spine_attach) {
    REQUIRE(a >= 0);
    REQUIRE(a < static_cast<std::int32_t>(spine.size()));
  }
}

}  // namespace

TEST_CASE("infinite tree truncation structure") {
  Rng rng = substream(131, 0);
  SpineTruncation st = sample_infinite_tree_truncation(1, rng, 1 << 20);
  REQUIRE(st.spine_tree.spine.size() == 2);
  REQUIRE(st.spine_tree.truncation_depth == 1);
  REQUIRE(st.spine_tree.spine[0] == 0);
  check_spine(st);
  check_spine(sample_infinite_tree_truncation(5, rng, 1 << 20));
}

TEST_CASE("infinite tree truncation hanging mass law") {
  // Vertices hanging at a fixed spine vertex = sum of two independent GW
  // tree sizes, so P(mass = n) = C_{n+1} / 2^(2n+2) by Catalan convolution.
  const std::int32_t n = 5000;
  Rng rng = substream(137, 0);
  std::vector<std::int64_t> observed(6, 0);  // masses 0..4 and a tail bin
  for (std::int32_t i = 0; i < n; ++i) {
    std::int64_t at_root = 0;
    try {
      SpineTruncation st = sample_infinite_tree_truncation(1, rng, 100000);
      for (std::size_t v = 0; v < st.spine_attach.size(); ++v)
        if (st.spine_attach[v] == 0 && st.spine_tree.spine[0] != static_cast<std::int32_t>(v))
          ++at_root;
    } catch (const TooLarge&) {
      at_root = 100000;
    }
    observed[std::min<std::int64_t>(at_root, 5)]++;
  }
  const double cat[] = {1, 1, 2, 5, 14, 42};
  std::vector<double> expected;
  double tail = 1.0;
  for (std::int32_t s = 0; s <= 4; ++s) {
    double p = cat[s + 1] / std::pow(2.0, 2 * s + 2);
    expected.push_back(p);
    tail -= p;
  }
  expected.push_back(tail);
  double stat = chi_square_statistic(observed, expected);
  REQUIRE(chi_square_pvalue(stat, 5) > 0.001);
}

TEST_CASE("truncation size is stochastically increasing in depth") {
  const std::int32_t n = 2000;
  Rng rng = substream(139, 0);
  std::vector<double> size1, size3;
  auto capped_size = [&rng](std::int32_t m) -> double {
    try {
      return sample_infinite_tree_truncation(m, rng, 100000).spine_tree.tree.vertex_count();
    } catch (const TooLarge&) {
      return 1e9;
    }
  };
  for (std::int32_t i = 0; i < n; ++i) size1.push_back(capped_size(1));
  for (std::int32_t i = 0; i < n; ++i) size3.push_back(capped_size(3));
  std::sort(size1.begin(), size1.end());
  std::sort(size3.begin(), size3.end());
  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9})
    REQUIRE(quantile(size3, q) >= quantile(size1, q) - 1e-9);
}

TEST_CASE("bi-infinite truncation structure") {
  Rng rng = substream(149, 0);
  SpineTruncation st0 = sample_bi_infinite_tree_truncation(0, rng, 1 << 20);
  REQUIRE(st0.spine_tree.spine.size() == 1);
  REQUIRE(st0.spine_tree.spine[0] == 0);
  SpineTruncation st = sample_bi_infinite_tree_truncation(3, rng, 1 << 20);
  REQUIRE(st.spine_tree.spine.size() == 7);
  // Root sits in the middle of the two-sided spine.
  REQUIRE(st.spine_tree.spine[3] == 0);
  check_spine(st);
}

TEST_CASE("bi-infinite hanging tree size law at the root") {
  const std::int32_t n = 10000;
  Rng rng = substream(151, 0);
  std::vector<std::int64_t> observed(4, 0);
  for (std::int32_t i = 0; i < n; ++i) {
    std::int32_t sz;
    try {
      sz = sample_bi_infinite_tree_truncation(0, rng, 10000).spine_tree.tree.edge_count();
    } catch (const TooLarge&) {
      sz = 10000;
    }
    observed[std::min<std::int32_t>(sz, 3)]++;
  }
  std::vector<double> expected{0.5, 0.125, 2.0 / 32.0, 1.0 - 0.5 - 0.125 - 2.0 / 32.0};
  double stat = chi_square_statistic(observed, expected);
  REQUIRE(chi_square_pvalue(stat, 3) > 0.001);
}

TEST_CASE("contour process kinds satisfy their pinning constraints") {
  Rng rng = substream(157, 0);
  ContourProcess ex = sample_contour_process(ContourKind::excursion, 50, rng);
  REQUIRE(ex.values.front() == 0);
  REQUIRE(ex.values.back() == 0);
  REQUIRE(*std::min_element(ex.values.begin(), ex.values.end()) >= 0);

  ContourProcess ts = sample_contour_process(ContourKind::two_sided, 50, rng);
  REQUIRE(ts.values.size() == 101);
  REQUIRE(ts.values[50] == 0);

  ContourProcess be = sample_contour_process(ContourKind::bessel_like, 200, rng);
  for (std::size_t i = 1; i < be.values.size(); ++i) REQUIRE(be.values[i] >= 0);
}

TEST_CASE("rescaled excursion maximum is scale stable") {
  // Donsker-type check: max of C at sizes 2000 and 8000, rescaled by
  // sqrt(2k), should agree in law.
  const std::int32_t n = 10000;
  Rng rng = substream(163, 0);
  std::vector<double> a, b;
  for (std::int32_t i = 0; i < n; ++i) {
    ContourProcess p = sample_contour_process(ContourKind::excursion, 2000, rng);
    a.push_back(*std::max_element(p.values.begin(), p.values.end()) / std::sqrt(2.0 * 2000));
  }
  for (std::int32_t i = 0; i < n; ++i) {
    ContourProcess p = sample_contour_process(ContourKind::excursion, 8000, rng);
    b.push_back(*std::max_element(p.values.begin(), p.values.end()) / std::sqrt(2.0 * 8000));
  }
  REQUIRE(ks_distance(a, b) < 0.05);
}
