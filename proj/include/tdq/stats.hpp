#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tdq/error.hpp"
#include "tdq/rng.hpp"

namespace tdq {

// Regularized lower incomplete gamma P(a, x) (series + continued fraction).
inline double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) return 0.0;
  if (x == 0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q(a,x).
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

// Upper tail p-value of a chi-square statistic with `df` degrees of freedom.
inline double chi_square_pvalue(double statistic, double df) {
  return 1.0 - gamma_p(df / 2.0, statistic / 2.0);
}

// Pearson statistic for observed counts vs expected probabilities.
inline double chi_square_statistic(const std::vector<std::int64_t>& observed,
                                   const std::vector<double>& expected_prob) {
  std::int64_t n = 0;
  for (std::int64_t o : observed) n += o;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double e = expected_prob[i] * static_cast<double>(n);
    double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
  }
  return stat;
}

// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    // Advance both sides past the smaller value; ties move together so the
    // CDFs are only compared between jump points.
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * (static_cast<double>(v.size()) - 1.0);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// Percentile bootstrap CI for a statistic of iid samples.
template <typename Stat>
std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, Stat&& stat,
                                       std::int32_t replicates, double level, Rng& rng) {
  std::vector<double> stats(replicates);
  std::vector<double> resample(samples.size());
  for (std::int32_t r = 0; r < replicates; ++r) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      resample[i] = samples[uniform_below(rng, samples.size())];
    stats[r] = stat(resample);
  }
  double alpha = (1.0 - level) / 2.0;
  return {quantile(stats, alpha), quantile(stats, 1.0 - alpha)};
}

inline double sample_kurtosis(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double m2 = 0, m4 = 0;
  for (double x : v) {
    double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(v.size());
  m4 /= static_cast<double>(v.size());
  return m4 / (m2 * m2);
}

}  // namespace tdq
