#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "cmfmts/catalog.hpp"
#include "cmfmts/errors.hpp"
#include "cmfmts/features.hpp"
#include "cmfmts/rng.hpp"

using namespace cmfmts;
using Catch::Approx;

namespace {

bool na(double v) { return std::isnan(v); }

bool bits_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

double feature(const std::vector<double>& x, const std::string& name) {
  return compute_feature(std::span<const double>(x), name);
}

std::vector<double> iota_channel(std::size_t n) {
  std::vector<double> x(n);
  std::iota(x.begin(), x.end(), 1.0);
  return x;
}

std::vector<double> noise(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform01();
  return x;
}

std::vector<double> gaussian_noise(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.gaussian();
  return x;
}

std::vector<double> random_walk(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> x(n);
  double acc = 0;
  for (double& v : x) {
    acc += rng.gaussian();
    v = acc;
  }
  return x;
}

// ---- independent oracles -------------------------------------------------

double acf_oracle(const std::vector<double>& x, std::size_t k) {
  const std::size_t n = x.size();
  double m = 0;
  for (double v : x) m += v;
  m /= static_cast<double>(n);
  double num = 0, den = 0;
  for (std::size_t t = 0; t < n; ++t) den += (x[t] - m) * (x[t] - m);
  for (std::size_t t = 0; t + k < n; ++t) num += (x[t] - m) * (x[t + k] - m);
  return num / den;
}

double moment_oracle(const std::vector<double>& x, int order) {
  double m = 0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0;
  for (double v : x) s += std::pow(v - m, order);
  return s / static_cast<double>(x.size());
}

double spectral_entropy_oracle(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t nf = n / 2;
  std::vector<double> p(nf);
  double total = 0;
  for (std::size_t k = 1; k <= nf; ++k) {
    std::complex<double> acc{0, 0};
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * M_PI * double(k) * double(t) / double(n));
    p[k - 1] = std::norm(acc) / double(n);
    total += p[k - 1];
  }
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v / total * std::log(v / total);
  return h / std::log(double(nf));
}

double apen_oracle(const std::vector<double>& x, std::size_t m, double r) {
  const std::size_t n = x.size();
  auto phi = [&](std::size_t mm) {
    const std::size_t cnt = n - mm + 1;
    double acc = 0;
    for (std::size_t i = 0; i < cnt; ++i) {
      std::size_t matches = 0;
      for (std::size_t j = 0; j < cnt; ++j) {
        double dmax = 0;
        for (std::size_t k = 0; k < mm; ++k)
          dmax = std::max(dmax, std::fabs(x[i + k] - x[j + k]));
        if (dmax <= r) ++matches;
      }
      acc += std::log(double(matches) / double(cnt));
    }
    return acc / double(cnt);
  };
  return phi(m) - phi(m + 1);
}

double sampen_oracle(const std::vector<double>& x, std::size_t m, double r) {
  const std::size_t n = x.size();
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i + m < n; ++i) {
    for (std::size_t j = i + 1; j + m < n; ++j) {
      double dm = 0, dm1 = 0;
      for (std::size_t k = 0; k < m; ++k) dm = std::max(dm, std::fabs(x[i + k] - x[j + k]));
      for (std::size_t k = 0; k <= m; ++k)
        dm1 = std::max(dm1, std::fabs(x[i + k] - x[j + k]));
      if (dm <= r) ++b;
      if (dm1 <= r) ++a;
    }
  }
  if (a == 0 || b == 0) return std::nan(""); // undefined
  return -std::log(double(a) / double(b));
}

double sample_sd(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= double(x.size());
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / double(x.size() - 1));
}

} // namespace

TEST_CASE("catalog has 41 unique features with the core set present") {
  const FeatureCatalog& cat = default_catalog();
  REQUIRE(cat.size() == 41);
  const std::vector<std::string> core = {
      "curvature",         "kurtosis",        "linearity",      "shannon_entropy_cs",
      "skewness",          "trend",           "shannon_entropy_sg", "spectral_entropy",
      "unitroot_kpss",     "unitroot_pp",     "x_acf1",         "entropy",
      "e_acf1",            "spike",           "nperiods",       "seasonal_periods",
      "length",            "approx_entropy",  "x_acf10"};
  REQUIRE(core.size() == 19);
  std::size_t core_count = 0;
  for (const auto& d : cat.descriptors())
    if (d.tier == FeatureTier::Core) ++core_count;
  REQUIRE(core_count == 19);
  for (const std::string& name : core) {
    const std::size_t idx = cat.index_of(name);
    REQUIRE(idx != FeatureCatalog::npos);
    REQUIRE(cat.at(idx).tier == FeatureTier::Core);
  }
}

TEST_CASE("catalog selection preserves request order and rejects unknowns") {
  FeatureCatalog sel = catalog_from_selection("trend,x_acf1");
  REQUIRE(sel.size() == 2);
  REQUIRE(sel.at(0).name == "trend");
  REQUIRE(sel.at(1).name == "x_acf1");
  REQUIRE_THROWS_AS(catalog_from_selection("nope"), input_error);
  REQUIRE_THROWS_AS(FeatureCatalog({{"a", FeatureRange::AllReals, 1, FeatureTier::Core, ""},
                                    {"a", FeatureRange::AllReals, 1, FeatureTier::Core, ""}}),
                    input_error);
}

TEST_CASE("acf features match the closed form and the direct oracle") {
  const std::vector<double> x = iota_channel(10);
  REQUIRE(feature(x, "x_acf1") == Approx(0.7).margin(1e-12));
  REQUIRE(feature(x, "x_acf1") == Approx(57.75 / 82.5).margin(1e-15));
  REQUIRE(feature(x, "x_acf1") == Approx(acf_oracle(x, 1)).margin(1e-12));

  const std::vector<double> y = noise(7, 64);
  double acf10 = 0;
  for (std::size_t k = 1; k <= 10; ++k) acf10 += acf_oracle(y, k) * acf_oracle(y, k);
  REQUIRE(feature(y, "x_acf10") == Approx(acf10).margin(1e-12));

  std::vector<double> d1(y.size() - 1);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) d1[i] = y[i + 1] - y[i];
  REQUIRE(feature(y, "diff1_acf1") == Approx(acf_oracle(d1, 1)).margin(1e-12));

  REQUIRE(na(feature({5, 5, 5, 5}, "x_acf1")));
  REQUIRE(na(feature(iota_channel(10), "x_acf10"))); // needs length 11
  REQUIRE_FALSE(na(feature(iota_channel(11), "x_acf10")));
}

TEST_CASE("moments match the central-moment oracle") {
  REQUIRE(feature({1, 2, 3}, "skewness") == Approx(0.0).margin(1e-12));
  const std::vector<double> x = {0, 0, 0, 1};
  const double skew = moment_oracle(x, 3) / std::pow(moment_oracle(x, 2), 1.5);
  REQUIRE(skew == Approx(2.0 / std::sqrt(3.0)).margin(1e-12));
  REQUIRE(feature(x, "skewness") == Approx(skew).margin(1e-12));
  REQUIRE(feature(x, "skewness") == Approx(1.1547005383792515).margin(1e-12));

  const std::vector<double> y = {1, 2, 3, 4};
  REQUIRE(moment_oracle(y, 2) == Approx(1.25).margin(1e-15));
  REQUIRE(moment_oracle(y, 4) == Approx(2.5625).margin(1e-15));
  REQUIRE(feature(y, "kurtosis") == Approx(1.64).margin(1e-12));

  REQUIRE(na(feature({5, 5, 5, 5}, "kurtosis")));
  REQUIRE(na(feature({5, 5, 5, 5}, "skewness")));
}

TEST_CASE("entropies behave as specified") {
  REQUIRE(feature({3, 3, 3, 3, 3}, "shannon_entropy_cs") == Approx(0.0).margin(1e-12));
  REQUIRE(feature({3, 3, 3, 3, 3}, "shannon_entropy_sg") == Approx(0.0).margin(1e-12));

  std::vector<double> sine(128);
  for (std::size_t t = 0; t < 128; ++t) sine[t] = std::sin(2.0 * M_PI * double(t + 1) / 16.0);
  const double se = feature(sine, "spectral_entropy");
  REQUIRE(se <= 0.2);
  REQUIRE(se == Approx(spectral_entropy_oracle(sine)).margin(1e-9));

  double mean_noise_se = 0;
  for (std::uint64_t s = 0; s < 20; ++s)
    mean_noise_se += feature(noise(1000 + s, 512), "spectral_entropy");
  REQUIRE(mean_noise_se / 20.0 >= 0.8);

  // ApEn / SampEn against the brute-force oracles
  for (std::uint64_t s = 0; s < 5; ++s) {
    const std::vector<double> x = noise(2000 + s, 60);
    const double r = 0.2 * sample_sd(x);
    REQUIRE(feature(x, "approx_entropy") == Approx(apen_oracle(x, 2, r)).margin(1e-12));
    const double engine = feature(x, "sample_entropy");
    const double oracle = sampen_oracle(x, 2, r);
    REQUIRE(na(engine) == na(oracle));
    if (!na(oracle)) REQUIRE(engine == Approx(oracle).margin(1e-12));
    REQUIRE(bits_equal(feature(x, "entropy"), engine));
  }
  REQUIRE(na(feature({2, 2, 2, 2, 2, 2}, "approx_entropy")));
  REQUIRE(na(feature({2, 2, 2, 2, 2, 2}, "sample_entropy")));
}

TEST_CASE("decomposition reconstructs the input and handles lines") {
  // exact line: remainder vanishes
  std::vector<double> line(50);
  const double slope = 0.7;
  for (std::size_t t = 0; t < line.size(); ++t) line[t] = 3.0 + slope * double(t + 1);
  Decomposition d = decompose(line);
  for (std::size_t t = 0; t < line.size(); ++t) {
    REQUIRE(std::fabs(d.remainder[t]) < 1e-6 * slope * double(line.size()));
    REQUIRE(d.trend[t] + d.remainder[t] == Approx(line[t]).epsilon(1e-9));
  }

  std::vector<double> flat(20, 4.25);
  d = decompose(flat);
  for (std::size_t t = 0; t < flat.size(); ++t) {
    REQUIRE(d.trend[t] == Approx(4.25).margin(1e-9));
    REQUIRE(std::fabs(d.remainder[t]) < 1e-9);
  }

  const std::vector<double> x = gaussian_noise(42, 64);
  d = decompose(x);
  for (std::size_t t = 0; t < x.size(); ++t)
    REQUIRE(d.trend[t] + d.remainder[t] == Approx(x[t]).epsilon(1e-9).margin(1e-9));

  REQUIRE_THROWS_AS(decompose(std::vector<double>(6, 1.0)), input_error);
}

TEST_CASE("decomposition features: trend, linearity, curvature") {
  std::vector<double> line(60);
  for (std::size_t t = 0; t < line.size(); ++t) line[t] = -2.0 + 0.5 * double(t + 1);
  REQUIRE(feature(line, "trend") >= 0.99);
  REQUIRE(feature(line, "linearity") > 0.0);
  REQUIRE(std::fabs(feature(line, "curvature")) < 1e-6);

  double mean_trend = 0;
  for (std::uint64_t s = 0; s < 20; ++s) mean_trend += feature(gaussian_noise(900 + s, 256), "trend");
  REQUIRE(mean_trend / 20.0 <= 0.3);

  REQUIRE(na(feature(std::vector<double>(30, 1.5), "trend"))); // zero variance
}

TEST_CASE("unit-root statistics separate walks from noise") {
  REQUIRE(na(feature(noise(1, 11), "unitroot_kpss")));
  REQUIRE(na(feature(noise(1, 11), "unitroot_pp")));

  double kpss_noise = 0, kpss_walk = 0;
  std::size_t below_crit = 0;
  const std::size_t seeds = 20;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const double kn = feature(gaussian_noise(3000 + s, 500), "unitroot_kpss");
    kpss_noise += kn;
    if (kn < 0.463) ++below_crit;
    kpss_walk += feature(random_walk(4000 + s, 500), "unitroot_kpss");
  }
  REQUIRE(kpss_walk / double(seeds) > kpss_noise / double(seeds));
  REQUIRE(below_crit >= seeds * 8 / 10);

  // white noise has rho near 0, a walk has rho near 1: Z-alpha far below 0
  const double pp_noise = feature(gaussian_noise(31, 500), "unitroot_pp");
  const double pp_walk = feature(random_walk(32, 500), "unitroot_pp");
  REQUIRE(pp_noise < pp_walk);
  REQUIRE(pp_noise < -100.0);
}

TEST_CASE("structural features") {
  const std::vector<double> seven = noise(5, 7);
  REQUIRE(feature(seven, "length") == 7.0);
  REQUIRE(feature(seven, "nperiods") == 0.0);
  REQUIRE(feature(seven, "seasonal_periods") == 1.0);

  REQUIRE(feature({1, -1, 1, -1}, "crossing_points") == 3.0);
  // direct count oracle on random data
  for (std::uint64_t s = 0; s < 10; ++s) {
    std::vector<double> x = gaussian_noise(500 + s, 33);
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[16];
    std::size_t crossings = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
      if ((x[i] <= med) != (x[i - 1] <= med)) ++crossings;
    REQUIRE(feature(x, "crossing_points") == double(crossings));
  }

  REQUIRE(feature(std::vector<double>(25, 3.0), "stability") == 0.0);
  REQUIRE(feature(std::vector<double>(25, 3.0), "lumpiness") == 0.0);
  REQUIRE(feature(std::vector<double>(12, 9.9), "flat_spots") == 12.0);

  // alternating series: acf1 < 0, so the first zero crossing is lag 1
  std::vector<double> alt(16);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 1.0 : -1.0;
  REQUIRE(feature(alt, "firstzero_ac") == 1.0);
}

TEST_CASE("minimum-length contract holds exhaustively for lengths 1..15") {
  const FeatureCatalog& cat = default_catalog();
  for (std::size_t n = 1; n <= 15; ++n) {
    Channel ch{noise(77 + n, n)};
    const std::vector<double> values = extract_features(ch, cat);
    for (std::size_t f = 0; f < cat.size(); ++f) {
      if (n < cat.at(f).min_length) {
        INFO(cat.at(f).name << " at length " << n);
        REQUIRE(na(values[f]));
      }
    }
  }
}

TEST_CASE("totality and declared ranges over varied channels") {
  const FeatureCatalog& cat = default_catalog();
  std::vector<std::vector<double>> channels;
  for (std::uint64_t s = 0; s < 3; ++s) {
    channels.push_back(noise(600 + s, 40));
    channels.push_back(random_walk(700 + s, 25));
  }
  channels.push_back(std::vector<double>(21, 2.5));
  channels.push_back({1, 2});
  channels.push_back(iota_channel(100));
  {
    std::vector<double> with_nan = noise(1, 30);
    with_nan[7] = std::nan("");
    channels.push_back(with_nan);
    std::vector<double> with_inf = noise(2, 30);
    with_inf[3] = std::numeric_limits<double>::infinity();
    channels.push_back(with_inf);
    std::vector<double> grid(30);
    Rng rng(123);
    for (double& v : grid) v = double(rng.bounded(4));
    channels.push_back(grid);
  }

  for (const auto& x : channels) {
    Channel ch{x};
    const std::vector<double> values = extract_features(ch, cat);
    REQUIRE(values.size() == cat.size());
    for (std::size_t f = 0; f < cat.size(); ++f) {
      const double v = values[f];
      if (na(v)) continue;
      INFO(cat.at(f).name);
      REQUIRE(std::isfinite(v));
      switch (cat.at(f).range) {
        case FeatureRange::NonnegReals: REQUIRE(v >= 0.0); break;
        case FeatureRange::UnitInterval:
          REQUIRE(v >= 0.0);
          REQUIRE(v <= 1.0);
          break;
        case FeatureRange::NonnegInteger:
          REQUIRE(v >= 0.0);
          REQUIRE(v == std::floor(v));
          break;
        case FeatureRange::AllReals: break;
      }
    }
  }
}

TEST_CASE("missing values contaminate everything except the structure constants") {
  const FeatureCatalog& cat = default_catalog();
  std::vector<double> x = noise(9, 40);
  x[11] = std::nan("");
  const std::vector<double> values = extract_features(Channel{x}, cat);
  for (std::size_t f = 0; f < cat.size(); ++f) {
    const std::string& name = cat.at(f).name;
    if (name == "length") {
      REQUIRE(values[f] == 40.0);
    } else if (name == "nperiods") {
      REQUIRE(values[f] == 0.0);
    } else if (name == "seasonal_periods") {
      REQUIRE(values[f] == 1.0);
    } else {
      INFO(name);
      REQUIRE(na(values[f]));
    }
  }
}

TEST_CASE("determinism: repeated extraction is bitwise identical") {
  const FeatureCatalog& cat = default_catalog();
  for (std::uint64_t s = 0; s < 3; ++s) {
    Channel ch{gaussian_noise(800 + s, 64)};
    const auto a = extract_features(ch, cat);
    const auto b = extract_features(ch, cat);
    for (std::size_t f = 0; f < cat.size(); ++f) REQUIRE(bits_equal(a[f], b[f]));
  }
}

TEST_CASE("affine invariance of the scale-free features") {
  const FeatureCatalog& cat = default_catalog();
  const std::vector<std::string> invariant = {"x_acf1",  "x_acf10", "skewness",
                                              "kurtosis", "trend",  "spectral_entropy"};
  for (std::uint64_t s = 0; s < 5; ++s) {
    const std::vector<double> x = gaussian_noise(1500 + s, 48);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.5 * x[i] + 3.0;
    for (const std::string& name : invariant) {
      const double fx = feature(x, name);
      const double fy = feature(y, name);
      REQUIRE(na(fx) == na(fy));
      if (!na(fx))
        REQUIRE(std::fabs(fx - fy) <= 1e-9 * std::max(1.0, std::fabs(fx)));
    }
  }
}

TEST_CASE("empty channels are rejected") {
  REQUIRE_THROWS_AS(extract_features(Channel{}, default_catalog()), input_error);
}
