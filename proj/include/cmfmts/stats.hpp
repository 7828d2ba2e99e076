#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace cmfmts::stats {

inline constexpr double kNA = std::numeric_limits<double>::quiet_NaN();

inline bool is_na(double x) { return std::isnan(x); }

/// Kahan-compensated sum.
inline double sum(std::span<const double> x) {
  double s = 0.0, c = 0.0;
  for (double v : x) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

inline double mean(std::span<const double> x) {
  return x.empty() ? kNA : sum(x) / static_cast<double>(x.size());
}

/// Sample variance (n-1 denominator); NA for n < 2.
inline double variance(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return kNA;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(n - 1);
}

/// Population variance (n denominator); NA for n < 1.
inline double variance_pop(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return kNA;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(n);
}

inline double sd(std::span<const double> x) {
  double v = variance(x);
  return is_na(v) ? kNA : std::sqrt(v);
}

inline double median(std::vector<double> x) {
  if (x.empty()) return kNA;
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

/// Autocorrelation at lag k with the biased normalization
/// r_k = sum_{t<n-k} (x_t - m)(x_{t+k} - m) / sum_t (x_t - m)^2.
/// NA when the denominator is zero or the lag is out of range.
inline double acf(std::span<const double> x, std::size_t k) {
  const std::size_t n = x.size();
  if (n < 2 || k >= n) return kNA;
  const double m = mean(x);
  double denom = 0.0;
  for (double v : x) denom += (v - m) * (v - m);
  if (denom <= 0.0) return kNA;
  double num = 0.0;
  for (std::size_t t = 0; t + k < n; ++t) num += (x[t] - m) * (x[t + k] - m);
  return num / denom;
}

inline std::vector<double> diff(std::span<const double> x) {
  std::vector<double> d;
  if (x.size() < 2) return d;
  d.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
  return d;
}

/// Solves the least-squares problem A b = y via normal equations with
/// partial-pivot elimination. A is row-major n x p. Returns false when the
/// system is singular.
inline bool ols(const std::vector<double>& a, std::span<const double> y,
                std::size_t n, std::size_t p, std::vector<double>& beta) {
  std::vector<double> ata(p * p, 0.0), aty(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      aty[j] += a[i * p + j] * y[i];
      for (std::size_t k = j; k < p; ++k) ata[j * p + k] += a[i * p + j] * a[i * p + k];
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) ata[j * p + k] = ata[k * p + j];

  // gaussian elimination with partial pivoting
  std::vector<std::size_t> piv(p);
  for (std::size_t j = 0; j < p; ++j) piv[j] = j;
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::fabs(ata[r * p + col]) > std::fabs(ata[best * p + col])) best = r;
    if (std::fabs(ata[best * p + col]) < 1e-300) return false;
    if (best != col) {
      for (std::size_t k = 0; k < p; ++k) std::swap(ata[best * p + k], ata[col * p + k]);
      std::swap(aty[best], aty[col]);
    }
    for (std::size_t r = col + 1; r < p; ++r) {
      double f = ata[r * p + col] / ata[col * p + col];
      for (std::size_t k = col; k < p; ++k) ata[r * p + k] -= f * ata[col * p + k];
      aty[r] -= f * aty[col];
    }
  }
  beta.assign(p, 0.0);
  for (std::size_t col = p; col-- > 0;) {
    double s = aty[col];
    for (std::size_t k = col + 1; k < p; ++k) s -= ata[col * p + k] * beta[k];
    beta[col] = s / ata[col * p + col];
  }
  return true;
}

} // namespace cmfmts::stats
