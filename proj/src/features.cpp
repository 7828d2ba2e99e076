#include "cmfmts/features.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <unordered_map>

#include "cmfmts/errors.hpp"
#include "cmfmts/stats.hpp"

namespace cmfmts {

using stats::is_na;
using stats::kNA;

Decomposition decompose(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 7) throw input_error("decompose requires length >= 7");
  const std::size_t w = std::max<std::size_t>(7, static_cast<std::size_t>(
                                                     std::ceil(0.1 * static_cast<double>(n))));
  const std::size_t h = w / 2;

  Decomposition d;
  d.trend.resize(n);
  d.remainder.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t > h ? t - h : 0;
    const std::size_t hi = std::min(n - 1, t + h);
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
      const double u = std::fabs(static_cast<double>(i) - static_cast<double>(t)) /
                       static_cast<double>(h + 1);
      const double c = 1.0 - u * u * u;
      const double wt = c * c * c;
      sw += wt;
      swx += wt * static_cast<double>(i);
      swy += wt * x[i];
    }
    const double xb = swx / sw, yb = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
      const double u = std::fabs(static_cast<double>(i) - static_cast<double>(t)) /
                       static_cast<double>(h + 1);
      const double c = 1.0 - u * u * u;
      const double wt = c * c * c;
      const double dx = static_cast<double>(i) - xb;
      sxx += wt * dx * dx;
      sxy += wt * dx * (x[i] - yb);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    d.trend[t] = yb + slope * (static_cast<double>(t) - xb);
    d.remainder[t] = x[t] - d.trend[t];
  }
  return d;
}

namespace {

// ---------------------------------------------------------------------------
// per-channel computation context with lazy shared intermediates
// ---------------------------------------------------------------------------

class Computer {
public:
  explicit Computer(std::span<const double> x) : x_(x), n_(x.size()) {}

  double compute(const std::string& name);

private:
  std::span<const double> x_;
  std::size_t n_;

  std::optional<Decomposition> decomp_;
  std::optional<std::vector<double>> diff1_, diff2_;
  std::vector<double> acf_cache_; // acf_cache_[k-1] = r_k
  bool acf_denom_zero_ = false;

  const Decomposition& decomp() {
    if (!decomp_) decomp_ = decompose(x_);
    return *decomp_;
  }
  const std::vector<double>& diff1() {
    if (!diff1_) diff1_ = stats::diff(x_);
    return *diff1_;
  }
  const std::vector<double>& diff2() {
    if (!diff2_) diff2_ = stats::diff(diff1());
    return *diff2_;
  }
  /// r_k with caching; NA when the centered sum of squares is zero.
  double acf_at(std::size_t k) {
    if (acf_denom_zero_) return kNA;
    while (acf_cache_.size() < k) {
      double r = stats::acf(x_, acf_cache_.size() + 1);
      if (is_na(r)) {
        acf_denom_zero_ = true;
        return kNA;
      }
      acf_cache_.push_back(r);
    }
    return acf_cache_[k - 1];
  }

  // feature implementations
  double f_length() { return static_cast<double>(n_); }
  double f_kurtosis();
  double f_skewness();
  double f_acf10(std::span<const double> v);
  double f_pacf5(std::span<const double> v);
  double f_shannon_cs();
  double f_shannon_sg();
  double f_spectral_entropy();
  double f_approx_entropy();
  double f_sample_entropy();
  double f_trend();
  double f_spike();
  double linearity_curvature(bool curvature);
  double f_kpss();
  double f_pp();
  double f_crossing_points();
  double f_flat_spots();
  double stability_lumpiness(bool lumpiness);
  double f_nonlinearity();
  double f_hurst();
  double f_firstzero_ac();
  double f_firstmin_ac();
  double f_histogram_mode();
  double level_var_shift(bool var_shift);
  double f_max_kl_shift();
  double f_outlier_include_mdrmd();

  std::vector<std::size_t> histogram(std::span<const double> v, std::size_t bins) const;
};

double central_moment(std::span<const double> x, int k, double m) {
  double s = 0;
  for (double v : x) s += std::pow(v - m, k);
  return s / static_cast<double>(x.size());
}

double Computer::f_kurtosis() {
  const double m = stats::mean(x_);
  const double m2 = central_moment(x_, 2, m);
  if (m2 <= 0) return kNA;
  return central_moment(x_, 4, m) / (m2 * m2);
}

double Computer::f_skewness() {
  const double m = stats::mean(x_);
  const double m2 = central_moment(x_, 2, m);
  if (m2 <= 0) return kNA;
  return central_moment(x_, 3, m) / std::pow(m2, 1.5);
}

double Computer::f_acf10(std::span<const double> v) {
  double s = 0;
  for (std::size_t k = 1; k <= 10; ++k) {
    double r = stats::acf(v, k);
    if (is_na(r)) return kNA;
    s += r * r;
  }
  return s;
}

double Computer::f_pacf5(std::span<const double> v) {
  constexpr std::size_t kMax = 5;
  double r[kMax + 1];
  r[0] = 1.0;
  for (std::size_t k = 1; k <= kMax; ++k) {
    r[k] = stats::acf(v, k);
    if (is_na(r[k])) return kNA;
  }
  // Durbin-Levinson recursion
  double phi_prev[kMax + 1] = {0}, phi[kMax + 1] = {0};
  double result = 0;
  double denom = 1.0;
  for (std::size_t k = 1; k <= kMax; ++k) {
    double num = r[k];
    for (std::size_t j = 1; j < k; ++j) num -= phi_prev[j] * r[k - j];
    if (std::fabs(denom) < 1e-300) return kNA;
    const double pk = num / denom;
    phi[k] = pk;
    for (std::size_t j = 1; j < k; ++j) phi[j] = phi_prev[j] - pk * phi_prev[k - j];
    denom *= (1.0 - pk * pk);
    result += pk * pk;
    std::copy(phi, phi + k + 1, phi_prev);
  }
  return result;
}

std::vector<std::size_t> Computer::histogram(std::span<const double> v,
                                             std::size_t bins) const {
  const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mx <= mn) return {v.size()}; // degenerate range: one bin
  std::vector<std::size_t> counts(bins, 0);
  const double width = (mx - mn) / static_cast<double>(bins);
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - mn) / width);
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  return counts;
}

double Computer::f_shannon_cs() {
  const auto bins = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n_))));
  std::vector<std::size_t> counts = histogram(x_, bins);
  const double N = static_cast<double>(n_);
  double f1 = 0;
  for (std::size_t c : counts)
    if (c == 1) f1 += 1;
  if (f1 == N) f1 = N - 1; // avoid zero coverage
  const double coverage = 1.0 - f1 / N;
  double h = 0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double pa = coverage * static_cast<double>(c) / N;
    if (pa <= 0) continue;
    const double la = 1.0 - std::pow(1.0 - pa, N);
    h -= pa * std::log(pa) / la;
  }
  return h;
}

double Computer::f_shannon_sg() {
  const auto bins = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n_))));
  std::vector<std::size_t> counts = histogram(x_, bins);
  const double K = static_cast<double>(counts.size());
  const double total = static_cast<double>(n_) + 1.0; // sum of counts + K * (1/K)
  double h = 0;
  for (std::size_t c : counts) {
    const double p = (static_cast<double>(c) + 1.0 / K) / total;
    h -= p * std::log(p);
  }
  return h;
}

double Computer::f_spectral_entropy() {
  const std::size_t nfreq = n_ / 2;
  if (nfreq < 2) return kNA;
  std::vector<double> power(nfreq);
  const double two_pi = 6.283185307179586476925287;
  double total = 0;
  for (std::size_t k = 1; k <= nfreq; ++k) {
    double re = 0, im = 0;
    const double w = two_pi * static_cast<double>(k) / static_cast<double>(n_);
    for (std::size_t t = 0; t < n_; ++t) {
      re += x_[t] * std::cos(w * static_cast<double>(t));
      im -= x_[t] * std::sin(w * static_cast<double>(t));
    }
    power[k - 1] = (re * re + im * im) / static_cast<double>(n_);
    total += power[k - 1];
  }
  if (total <= 0) return kNA;
  double h = 0;
  for (double p : power) {
    const double q = p / total;
    if (q > 0) h -= q * std::log(q);
  }
  return std::clamp(h / std::log(static_cast<double>(nfreq)), 0.0, 1.0);
}

// counts of Chebyshev-matching template pairs used by ApEn/SampEn
double Computer::f_approx_entropy() {
  constexpr std::size_t m = 2;
  const double s = stats::sd(x_);
  if (is_na(s) || s <= 0) return kNA;
  const double r = 0.2 * s;
  auto phi = [&](std::size_t mm) {
    const std::size_t count = n_ - mm + 1;
    double acc = 0;
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t matches = 0;
      for (std::size_t j = 0; j < count; ++j) {
        bool ok = true;
        for (std::size_t k = 0; k < mm; ++k) {
          if (std::fabs(x_[i + k] - x_[j + k]) > r) {
            ok = false;
            break;
          }
        }
        if (ok) ++matches; // includes the self-match
      }
      acc += std::log(static_cast<double>(matches) / static_cast<double>(count));
    }
    return acc / static_cast<double>(count);
  };
  return phi(m) - phi(m + 1);
}

double Computer::f_sample_entropy() {
  constexpr std::size_t m = 2;
  const double s = stats::sd(x_);
  if (is_na(s) || s <= 0) return kNA;
  const double r = 0.2 * s;
  const std::size_t count = n_ - m; // templates of length m+1 start here too
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      bool ok_m = true;
      for (std::size_t k = 0; k < m; ++k) {
        if (std::fabs(x_[i + k] - x_[j + k]) > r) {
          ok_m = false;
          break;
        }
      }
      if (!ok_m) continue;
      ++b;
      if (std::fabs(x_[i + m] - x_[j + m]) <= r) ++a;
    }
  }
  if (a == 0 || b == 0) return kNA;
  return -std::log(static_cast<double>(a) / static_cast<double>(b));
}

double Computer::f_trend() {
  const double vx = stats::variance(x_);
  if (is_na(vx) || vx <= 0) return kNA;
  const double vr = stats::variance(decomp().remainder);
  return std::clamp(1.0 - vr / vx, 0.0, 1.0);
}

double Computer::f_spike() {
  const auto& e = decomp().remainder;
  const std::size_t n = e.size();
  if (n < 3) return kNA;
  double s1 = 0, s2 = 0;
  for (double v : e) {
    s1 += v;
    s2 += v * v;
  }
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = (s1 - e[i]) / static_cast<double>(n - 1);
    const double ss = s2 - e[i] * e[i] - static_cast<double>(n - 1) * m * m;
    loo[i] = std::max(0.0, ss) / static_cast<double>(n - 2);
  }
  return stats::variance(loo);
}

double Computer::linearity_curvature(bool curvature) {
  const auto& tr = decomp().trend;
  const std::size_t n = tr.size();
  if (n < 3) return kNA;
  // orthonormal polynomial basis over t = 1..n
  std::vector<double> p1(n), p2(n);
  const double tbar = (static_cast<double>(n) + 1.0) / 2.0;
  double norm1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    p1[i] = static_cast<double>(i + 1) - tbar;
    norm1 += p1[i] * p1[i];
  }
  norm1 = std::sqrt(norm1);
  for (double& v : p1) v /= norm1;
  if (!curvature) {
    double b1 = 0;
    for (std::size_t i = 0; i < n; ++i) b1 += tr[i] * p1[i];
    return b1;
  }
  double m2 = 0, proj1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    p2[i] = t * t;
    m2 += p2[i];
  }
  m2 /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    p2[i] -= m2;
    proj1 += p2[i] * p1[i];
  }
  double norm2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    p2[i] -= proj1 * p1[i];
    norm2 += p2[i] * p2[i];
  }
  norm2 = std::sqrt(norm2);
  if (norm2 <= 0) return kNA;
  double b2 = 0;
  for (std::size_t i = 0; i < n; ++i) b2 += tr[i] * p2[i] / norm2;
  return b2;
}

std::size_t bartlett_lags(std::size_t n) {
  return static_cast<std::size_t>(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25));
}

double Computer::f_kpss() {
  const double m = stats::mean(x_);
  std::vector<double> e(n_);
  for (std::size_t i = 0; i < n_; ++i) e[i] = x_[i] - m;
  const std::size_t l = bartlett_lags(n_);
  double g0 = 0;
  for (double v : e) g0 += v * v;
  g0 /= static_cast<double>(n_);
  double lrv = g0;
  for (std::size_t j = 1; j <= l; ++j) {
    double gj = 0;
    for (std::size_t t = 0; t + j < n_; ++t) gj += e[t] * e[t + j];
    gj /= static_cast<double>(n_);
    lrv += 2.0 * (1.0 - static_cast<double>(j) / static_cast<double>(l + 1)) * gj;
  }
  if (lrv <= 0) return kNA;
  double s = 0, cum = 0;
  for (double v : e) {
    cum += v;
    s += cum * cum;
  }
  return s / (static_cast<double>(n_) * static_cast<double>(n_)) / lrv;
}

double Computer::f_pp() {
  const std::size_t m = n_ - 1; // effective sample of the lag-1 regression
  std::vector<double> y(m), ylag(m);
  for (std::size_t t = 0; t < m; ++t) {
    y[t] = x_[t + 1];
    ylag[t] = x_[t];
  }
  const double my = stats::mean(y), ml = stats::mean(ylag);
  double sxx = 0, sxy = 0;
  for (std::size_t t = 0; t < m; ++t) {
    sxx += (ylag[t] - ml) * (ylag[t] - ml);
    sxy += (ylag[t] - ml) * (y[t] - my);
  }
  if (sxx <= 0) return kNA;
  const double rho = sxy / sxx;
  const double intercept = my - rho * ml;
  std::vector<double> u(m);
  double s = 0;
  for (std::size_t t = 0; t < m; ++t) {
    u[t] = y[t] - intercept - rho * ylag[t];
    s += u[t] * u[t];
  }
  s /= static_cast<double>(m);
  const std::size_t l = bartlett_lags(m);
  double lambda = s;
  for (std::size_t j = 1; j <= l; ++j) {
    double gj = 0;
    for (std::size_t t = 0; t + j < m; ++t) gj += u[t] * u[t + j];
    lambda += 2.0 * (1.0 - static_cast<double>(j) / static_cast<double>(l + 1)) * gj /
              static_cast<double>(m);
  }
  const double denom = sxx / (static_cast<double>(m) * static_cast<double>(m));
  if (denom <= 0) return kNA;
  return static_cast<double>(m) * (rho - 1.0) - (lambda - s) / (2.0 * denom);
}

double Computer::f_crossing_points() {
  std::vector<double> copy(x_.begin(), x_.end());
  const double med = stats::median(std::move(copy));
  std::size_t changes = 0;
  bool prev = x_[0] <= med;
  for (std::size_t i = 1; i < n_; ++i) {
    const bool cur = x_[i] <= med;
    if (cur != prev) ++changes;
    prev = cur;
  }
  return static_cast<double>(changes);
}

double Computer::f_flat_spots() {
  const auto [mn_it, mx_it] = std::minmax_element(x_.begin(), x_.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mx <= mn) return static_cast<double>(n_);
  const double width = (mx - mn) / 10.0;
  std::size_t best = 1, run = 1;
  auto bin = [&](double v) {
    auto b = static_cast<std::size_t>((v - mn) / width);
    return b > 9 ? 9 : b;
  };
  std::size_t prev = bin(x_[0]);
  for (std::size_t i = 1; i < n_; ++i) {
    const std::size_t cur = bin(x_[i]);
    run = cur == prev ? run + 1 : 1;
    best = std::max(best, run);
    prev = cur;
  }
  return static_cast<double>(best);
}

double Computer::stability_lumpiness(bool lumpiness) {
  constexpr std::size_t width = 10;
  const double m = stats::mean(x_);
  const double s = stats::sd(x_);
  std::vector<double> z(n_);
  for (std::size_t i = 0; i < n_; ++i)
    z[i] = (s > 0 && !is_na(s)) ? (x_[i] - m) / s : x_[i] - m;
  const std::size_t nseg = n_ / width;
  if (nseg < 2) return 0.0; // fewer than two full windows: no spread to measure
  std::vector<double> agg(nseg);
  for (std::size_t seg = 0; seg < nseg; ++seg) {
    std::span<const double> win(z.data() + seg * width, width);
    agg[seg] = lumpiness ? stats::variance(win) : stats::mean(win);
  }
  return std::max(0.0, stats::variance(agg));
}

double Computer::f_nonlinearity() {
  const double m = stats::mean(x_), s = stats::sd(x_);
  if (is_na(s) || s <= 0) return kNA;
  const std::size_t rows = n_ - 1;
  std::vector<double> a(rows * 2), y(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    const double lag = (x_[t] - m) / s;
    a[t * 2] = 1.0;
    a[t * 2 + 1] = lag;
    y[t] = (x_[t + 1] - m) / s;
  }
  std::vector<double> beta;
  if (!stats::ols(a, y, rows, 2, beta)) return kNA;
  std::vector<double> e(rows);
  double sse0 = 0;
  for (std::size_t t = 0; t < rows; ++t) {
    e[t] = y[t] - beta[0] - beta[1] * a[t * 2 + 1];
    sse0 += e[t] * e[t];
  }
  if (sse0 <= 0) return kNA;
  std::vector<double> a2(rows * 4);
  for (std::size_t t = 0; t < rows; ++t) {
    const double lag = a[t * 2 + 1];
    a2[t * 4] = 1.0;
    a2[t * 4 + 1] = lag;
    a2[t * 4 + 2] = lag * lag;
    a2[t * 4 + 3] = lag * lag * lag;
  }
  if (!stats::ols(a2, e, rows, 4, beta)) return kNA;
  double sse1 = 0;
  for (std::size_t t = 0; t < rows; ++t) {
    const double fit = beta[0] + beta[1] * a2[t * 4 + 1] + beta[2] * a2[t * 4 + 2] +
                       beta[3] * a2[t * 4 + 3];
    const double v = e[t] - fit;
    sse1 += v * v;
  }
  const double stat = static_cast<double>(rows) * std::max(0.0, sse0 - sse1) / sse0;
  return 10.0 * stat / static_cast<double>(n_);
}

double Computer::f_hurst() {
  std::vector<double> log_s, log_rs;
  for (std::size_t size = n_; size >= 8; size /= 2) {
    const std::size_t blocks = n_ / size;
    double acc = 0;
    std::size_t valid = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      std::span<const double> blk(x_.data() + b * size, size);
      const double bm = stats::mean(blk);
      double cum = 0, mx = 0, mn = 0;
      for (double v : blk) {
        cum += v - bm;
        mx = std::max(mx, cum);
        mn = std::min(mn, cum);
      }
      const double sdev = stats::sd(blk);
      if (is_na(sdev) || sdev <= 0) continue;
      acc += (mx - mn) / sdev;
      ++valid;
    }
    if (valid == 0) continue;
    log_s.push_back(std::log(static_cast<double>(size)));
    log_rs.push_back(std::log(acc / static_cast<double>(valid)));
  }
  if (log_s.size() < 2) return kNA;
  const double mx = stats::mean(log_s), my = stats::mean(log_rs);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_s.size(); ++i) {
    sxx += (log_s[i] - mx) * (log_s[i] - mx);
    sxy += (log_s[i] - mx) * (log_rs[i] - my);
  }
  if (sxx <= 0) return kNA;
  return sxy / sxx;
}

double Computer::f_firstzero_ac() {
  const std::size_t maxlag = n_ - 2;
  for (std::size_t k = 1; k <= maxlag; ++k) {
    const double r = acf_at(k);
    if (is_na(r)) return kNA;
    if (r <= 0) return static_cast<double>(k);
  }
  return static_cast<double>(maxlag);
}

double Computer::f_firstmin_ac() {
  const std::size_t maxlag = n_ - 2;
  double prev = 1.0; // r_0
  for (std::size_t k = 1; k + 1 <= maxlag; ++k) {
    const double cur = acf_at(k);
    const double next = acf_at(k + 1);
    if (is_na(cur) || is_na(next)) return kNA;
    if (cur < prev && cur < next) return static_cast<double>(k);
    prev = cur;
  }
  return static_cast<double>(maxlag);
}

double Computer::f_histogram_mode() {
  const auto [mn_it, mx_it] = std::minmax_element(x_.begin(), x_.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mx <= mn) return mn;
  constexpr std::size_t bins = 10;
  const double width = (mx - mn) / bins;
  std::size_t counts[bins] = {0};
  for (double v : x_) {
    auto b = static_cast<std::size_t>((v - mn) / width);
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  std::size_t best = 0;
  for (std::size_t b = 1; b < bins; ++b)
    if (counts[b] > counts[best]) best = b;
  return mn + (static_cast<double>(best) + 0.5) * width;
}

double Computer::level_var_shift(bool var_shift) {
  constexpr std::size_t w = 10;
  const std::size_t nwin = n_ - w + 1;
  std::vector<double> agg(nwin);
  for (std::size_t i = 0; i < nwin; ++i) {
    std::span<const double> win(x_.data() + i, w);
    agg[i] = var_shift ? stats::variance(win) : stats::mean(win);
  }
  double best = 0;
  for (std::size_t i = 0; i + w < nwin; ++i)
    best = std::max(best, std::fabs(agg[i + w] - agg[i]));
  return best;
}

double Computer::f_max_kl_shift() {
  constexpr std::size_t w = 10;
  constexpr std::size_t bins = 10;
  double best = 0;
  for (std::size_t i = 0; i + 2 * w <= n_; ++i) {
    std::span<const double> a(x_.data() + i, w);
    std::span<const double> b(x_.data() + i + w, w);
    double mn = a[0], mx = a[0];
    for (double v : a) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    for (double v : b) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    if (mx <= mn) continue; // identical windows: zero divergence
    const double width = (mx - mn) / bins;
    double ca[bins] = {0}, cb[bins] = {0};
    auto bin = [&](double v) {
      auto k = static_cast<std::size_t>((v - mn) / width);
      return k > bins - 1 ? bins - 1 : k;
    };
    for (double v : a) ca[bin(v)] += 1;
    for (double v : b) cb[bin(v)] += 1;
    double kl = 0;
    const double total = static_cast<double>(w) + static_cast<double>(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const double p = (ca[k] + 1.0) / total;
      const double q = (cb[k] + 1.0) / total;
      kl += p * std::log(p / q);
    }
    best = std::max(best, kl);
  }
  return best;
}

double Computer::f_outlier_include_mdrmd() {
  const double m = stats::mean(x_), s = stats::sd(x_);
  if (is_na(s) || s <= 0) return kNA;
  std::vector<double> z(n_);
  double zmax = -1e300;
  for (std::size_t i = 0; i < n_; ++i) {
    z[i] = (x_[i] - m) / s;
    zmax = std::max(zmax, z[i]);
  }
  constexpr double inc = 0.01;
  const auto nthresh =
      zmax >= 0 ? static_cast<std::size_t>(std::floor(zmax / inc)) + 1 : std::size_t{1};
  std::vector<double> mdr;
  for (std::size_t j = 0; j < nthresh; ++j) {
    const double tau = inc * static_cast<double>(j);
    std::vector<double> pos;
    for (std::size_t i = 0; i < n_; ++i)
      if (z[i] >= tau) pos.push_back(static_cast<double>(i + 1));
    if (pos.empty()) break;
    const double exceed_pct = 100.0 * (static_cast<double>(pos.size()) - 1.0) /
                              (static_cast<double>(n_) - 1.0);
    const double rmd = stats::median(pos) / (static_cast<double>(n_) / 2.0) - 1.0;
    if (exceed_pct < 2.0 && !mdr.empty()) break; // keep the zero threshold at least
    mdr.push_back(rmd);
    if (exceed_pct < 2.0) break;
  }
  if (mdr.empty()) return kNA;
  return stats::median(std::move(mdr));
}

double Computer::compute(const std::string& name) {
  using Fn = std::function<double(Computer&)>;
  static const std::unordered_map<std::string, Fn> registry = {
      {"length", [](Computer& c) { return c.f_length(); }},
      {"nperiods", [](Computer&) { return 0.0; }},
      {"seasonal_periods", [](Computer&) { return 1.0; }},
      {"kurtosis", [](Computer& c) { return c.f_kurtosis(); }},
      {"skewness", [](Computer& c) { return c.f_skewness(); }},
      {"x_acf1", [](Computer& c) { return stats::acf(c.x_, 1); }},
      {"x_acf10", [](Computer& c) { return c.f_acf10(c.x_); }},
      {"diff1_acf1", [](Computer& c) { return stats::acf(c.diff1(), 1); }},
      {"diff1_acf10", [](Computer& c) { return c.f_acf10(c.diff1()); }},
      {"diff2_acf1", [](Computer& c) { return stats::acf(c.diff2(), 1); }},
      {"diff2_acf10", [](Computer& c) { return c.f_acf10(c.diff2()); }},
      {"x_pacf5", [](Computer& c) { return c.f_pacf5(c.x_); }},
      {"diff1_pacf5", [](Computer& c) { return c.f_pacf5(c.diff1()); }},
      {"diff2_pacf5", [](Computer& c) { return c.f_pacf5(c.diff2()); }},
      {"shannon_entropy_cs", [](Computer& c) { return c.f_shannon_cs(); }},
      {"shannon_entropy_sg", [](Computer& c) { return c.f_shannon_sg(); }},
      {"spectral_entropy", [](Computer& c) { return c.f_spectral_entropy(); }},
      {"approx_entropy", [](Computer& c) { return c.f_approx_entropy(); }},
      {"sample_entropy", [](Computer& c) { return c.f_sample_entropy(); }},
      {"entropy", [](Computer& c) { return c.f_sample_entropy(); }},
      {"trend", [](Computer& c) { return c.f_trend(); }},
      {"spike", [](Computer& c) { return c.f_spike(); }},
      {"linearity", [](Computer& c) { return c.linearity_curvature(false); }},
      {"curvature", [](Computer& c) { return c.linearity_curvature(true); }},
      {"e_acf1", [](Computer& c) { return stats::acf(c.decomp().remainder, 1); }},
      {"unitroot_kpss", [](Computer& c) { return c.f_kpss(); }},
      {"unitroot_pp", [](Computer& c) { return c.f_pp(); }},
      {"crossing_points", [](Computer& c) { return c.f_crossing_points(); }},
      {"flat_spots", [](Computer& c) { return c.f_flat_spots(); }},
      {"stability", [](Computer& c) { return c.stability_lumpiness(false); }},
      {"lumpiness", [](Computer& c) { return c.stability_lumpiness(true); }},
      {"nonlinearity", [](Computer& c) { return c.f_nonlinearity(); }},
      {"hurst", [](Computer& c) { return c.f_hurst(); }},
      {"std1st_der", [](Computer& c) { return stats::sd(c.diff1()); }},
      {"firstzero_ac", [](Computer& c) { return c.f_firstzero_ac(); }},
      {"firstmin_ac", [](Computer& c) { return c.f_firstmin_ac(); }},
      {"histogram_mode", [](Computer& c) { return c.f_histogram_mode(); }},
      {"max_level_shift", [](Computer& c) { return c.level_var_shift(false); }},
      {"max_var_shift", [](Computer& c) { return c.level_var_shift(true); }},
      {"max_kl_shift", [](Computer& c) { return c.f_max_kl_shift(); }},
      {"outlier_include_mdrmd", [](Computer& c) { return c.f_outlier_include_mdrmd(); }},
  };
  auto it = registry.find(name);
  if (it == registry.end()) throw input_error("unknown feature '" + name + "'");
  return it->second(*this);
}

bool is_contamination_proof(const std::string& name) {
  return name == "length" || name == "nperiods" || name == "seasonal_periods";
}

double guarded(Computer& computer, std::span<const double> x,
               const FeatureDescriptor& d, bool contaminated) {
  if (x.size() < d.min_length) return kNA;
  if (contaminated && !is_contamination_proof(d.name)) return kNA;
  const double v = computer.compute(d.name);
  return std::isfinite(v) ? v : kNA;
}

} // namespace

double compute_feature(std::span<const double> x, const std::string& name) {
  const std::size_t idx = default_catalog().index_of(name);
  if (idx == FeatureCatalog::npos) throw input_error("unknown feature '" + name + "'");
  if (x.empty()) throw input_error("empty channel");
  bool contaminated = false;
  for (double v : x)
    if (!std::isfinite(v)) contaminated = true;
  Computer computer(x);
  return guarded(computer, x, default_catalog().at(idx), contaminated);
}

std::vector<double> extract_features(const Channel& channel, const FeatureCatalog& catalog) {
  if (channel.values.empty()) throw input_error("empty channel");
  std::span<const double> x(channel.values);
  bool contaminated = false;
  for (double v : x)
    if (!std::isfinite(v)) contaminated = true;
  Computer computer(x);
  std::vector<double> out;
  out.reserve(catalog.size());
  for (const FeatureDescriptor& d : catalog.descriptors())
    out.push_back(guarded(computer, x, d, contaminated));
  return out;
}

} // namespace cmfmts
