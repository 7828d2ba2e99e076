#include "cmfmts/catalog.hpp"

#include <sstream>
#include <unordered_set>

#include "cmfmts/errors.hpp"

namespace cmfmts {

namespace {

using R = FeatureRange;
using T = FeatureTier;

std::vector<FeatureDescriptor> default_descriptors() {
  return {
      // basic structure
      {"length", R::NonnegInteger, 1, T::Core, "number of observations n"},
      {"nperiods", R::NonnegInteger, 1, T::Core,
       "number of seasonal periods; constant 0 (series are treated as plain vectors)"},
      {"seasonal_periods", R::NonnegInteger, 1, T::Core,
       "modeled seasonal period; constant 1 (non-seasonal treatment)"},
      // distribution moments
      {"kurtosis", R::AllReals, 2, T::Core,
       "Pearson kurtosis m4/m2^2 with central moments mk = mean((x-mean)^k); NA when m2 = 0"},
      {"skewness", R::AllReals, 2, T::Core,
       "m3/m2^1.5 with central moments as for kurtosis; NA when m2 = 0"},
      // autocorrelation
      {"x_acf1", R::AllReals, 2, T::Core, "autocorrelation r_1 (biased normalization)"},
      {"x_acf10", R::NonnegReals, 11, T::Core, "sum_{k=1..10} r_k^2"},
      {"diff1_acf1", R::AllReals, 3, T::Extended, "r_1 of the first difference"},
      {"diff1_acf10", R::NonnegReals, 12, T::Extended,
       "sum of squared first ten autocorrelations of the first difference"},
      {"diff2_acf1", R::AllReals, 4, T::Extended, "r_1 of the second difference"},
      {"diff2_acf10", R::NonnegReals, 13, T::Extended,
       "sum of squared first ten autocorrelations of the second difference"},
      {"x_pacf5", R::NonnegReals, 6, T::Extended,
       "sum of squared partial autocorrelations at lags 1..5 (Durbin-Levinson)"},
      {"diff1_pacf5", R::NonnegReals, 7, T::Extended, "x_pacf5 of the first difference"},
      {"diff2_pacf5", R::NonnegReals, 8, T::Extended, "x_pacf5 of the second difference"},
      // entropies
      {"shannon_entropy_cs", R::NonnegReals, 2, T::Core,
       "Chao-Shen coverage-adjusted Shannon entropy of a ceil(sqrt(n))-bin equal-width histogram"},
      {"shannon_entropy_sg", R::NonnegReals, 2, T::Core,
       "plug-in Shannon entropy of histogram frequencies smoothed by a Dirichlet(1/K) prior"},
      {"spectral_entropy", R::UnitInterval, 4, T::Core,
       "Shannon entropy of the normalized periodogram over Fourier frequencies 1..floor(n/2), divided by log(#frequencies)"},
      {"approx_entropy", R::AllReals, 4, T::Core,
       "ApEn(m=2, r=0.2*sd), self-matches included; NA when sd = 0"},
      {"sample_entropy", R::NonnegReals, 4, T::Extended,
       "SampEn(m=2, r=0.2*sd) = -log(A/B); NA when sd = 0 or A = 0 or B = 0"},
      {"entropy", R::NonnegReals, 4, T::Core, "alias of sample_entropy"},
      // trend decomposition
      {"trend", R::UnitInterval, 7, T::Core,
       "strength of trend max(0, 1 - Var(remainder)/Var(x)) from the local-linear decomposition; NA when Var(x) = 0"},
      {"spike", R::NonnegReals, 7, T::Core,
       "sample variance of the leave-one-out sample variances of the remainder"},
      {"linearity", R::AllReals, 7, T::Core,
       "coefficient of the degree-1 orthonormal polynomial in the regression of the trend component on poly(1..n, 2)"},
      {"curvature", R::AllReals, 7, T::Core,
       "coefficient of the degree-2 orthonormal polynomial in the same regression"},
      {"e_acf1", R::AllReals, 7, T::Core, "r_1 of the remainder component"},
      // unit-root statistics
      {"unitroot_kpss", R::NonnegReals, 12, T::Core,
       "KPSS level statistic with Bartlett long-run variance, bandwidth trunc(4*(n/100)^0.25)"},
      {"unitroot_pp", R::AllReals, 12, T::Core,
       "Phillips-Perron Z-alpha statistic of the lag-1 regression with the same Bartlett bandwidth"},
      // shape and regime measures
      {"crossing_points", R::NonnegInteger, 2, T::Extended,
       "number of sign changes of the indicator x <= median(x)"},
      {"flat_spots", R::NonnegInteger, 2, T::Extended,
       "longest run length after discretizing into 10 equal-width bins"},
      {"stability", R::NonnegReals, 2, T::Extended,
       "sample variance of the means of non-overlapping width-10 windows of the standardized series"},
      {"lumpiness", R::NonnegReals, 2, T::Extended,
       "sample variance of the variances of non-overlapping width-10 windows of the standardized series"},
      {"nonlinearity", R::NonnegReals, 8, T::Extended,
       "Terasvirta-style statistic: 10/n times n'*R^2 of the cubic-in-lag regression on AR(1) residuals of the standardized series"},
      {"hurst", R::AllReals, 16, T::Extended,
       "rescaled-range exponent: log-log slope of mean R/S over dyadic block sizes >= 8"},
      {"std1st_der", R::NonnegReals, 3, T::Extended,
       "sample standard deviation of the first difference"},
      {"firstzero_ac", R::NonnegInteger, 3, T::Extended,
       "first lag k >= 1 with r_k <= 0, or the maximum searched lag n-2"},
      {"firstmin_ac", R::NonnegInteger, 4, T::Extended,
       "first local minimum of r_k (with r_0 = 1), or the maximum searched lag n-2"},
      {"histogram_mode", R::AllReals, 1, T::Extended,
       "midpoint of the tallest of 10 equal-width histogram bins (lowest bin wins ties)"},
      {"max_level_shift", R::NonnegReals, 20, T::Extended,
       "maximum |difference| of means of width-10 windows 10 apart"},
      {"max_var_shift", R::NonnegReals, 20, T::Extended,
       "maximum |difference| of sample variances of width-10 windows 10 apart"},
      {"max_kl_shift", R::NonnegReals, 20, T::Extended,
       "maximum Kullback-Leibler divergence between Laplace-smoothed 10-bin histograms of consecutive width-10 windows"},
      {"outlier_include_mdrmd", R::AllReals, 3, T::Extended,
       "median over thresholds tau = 0, 0.01, ... of median(positions of z >= tau)/(n/2) - 1, thresholds kept while >= 2% of points exceed them (tau = 0 is always kept); NA when sd = 0"},
  };
}

} // namespace

FeatureCatalog::FeatureCatalog(std::vector<FeatureDescriptor> descriptors)
    : descriptors_(std::move(descriptors)) {
  std::unordered_set<std::string> seen;
  for (const auto& d : descriptors_) {
    if (d.min_length < 1) throw input_error("descriptor '" + d.name + "' min_length < 1");
    if (!seen.insert(d.name).second)
      throw input_error("duplicate feature name '" + d.name + "'");
  }
}

std::size_t FeatureCatalog::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < descriptors_.size(); ++i)
    if (descriptors_[i].name == name) return i;
  return npos;
}

std::vector<std::string> FeatureCatalog::names() const {
  std::vector<std::string> out;
  out.reserve(descriptors_.size());
  for (const auto& d : descriptors_) out.push_back(d.name);
  return out;
}

std::string FeatureCatalog::hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001B3ULL;
  };
  for (const auto& d : descriptors_) {
    for (char c : d.name) mix(static_cast<unsigned char>(c));
    mix('\n');
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* feature_range_name(FeatureRange r) {
  switch (r) {
    case FeatureRange::AllReals: return "(-inf, inf)";
    case FeatureRange::NonnegReals: return "[0, inf)";
    case FeatureRange::UnitInterval: return "[0, 1]";
    case FeatureRange::NonnegInteger: return "{0, 1, 2, ...}";
  }
  return "?";
}

std::string FeatureCatalog::reference_doc() const {
  std::ostringstream out;
  out << "# Feature catalog reference\n\n";
  out << "Missing observations, insufficient length, or an undefined statistic "
         "always yield NA; no feature ever raises.\n\n";
  out << "| # | name | tier | range | min length | definition |\n";
  out << "|---|------|------|-------|------------|------------|\n";
  for (std::size_t i = 0; i < descriptors_.size(); ++i) {
    const auto& d = descriptors_[i];
    out << "| " << (i + 1) << " | `" << d.name << "` | "
        << (d.tier == FeatureTier::Core ? "core" : "extended") << " | "
        << feature_range_name(d.range) << " | " << d.min_length << " | "
        << d.formula << " |\n";
  }
  return out.str();
}

const FeatureCatalog& default_catalog() {
  static const FeatureCatalog catalog(default_descriptors());
  return catalog;
}

FeatureCatalog catalog_from_selection(const std::string& selection) {
  if (selection.empty() || selection == "all") return default_catalog();
  const FeatureCatalog& all = default_catalog();
  std::vector<FeatureDescriptor> picked;
  std::stringstream ss(selection);
  std::string name;
  while (std::getline(ss, name, ',')) {
    std::size_t a = name.find_first_not_of(" \t");
    std::size_t b = name.find_last_not_of(" \t");
    if (a == std::string::npos) throw input_error("empty feature name in selection");
    name = name.substr(a, b - a + 1);
    std::size_t idx = all.index_of(name);
    if (idx == FeatureCatalog::npos) throw input_error("unknown feature '" + name + "'");
    picked.push_back(all.at(idx));
  }
  if (picked.empty()) throw input_error("empty feature selection");
  return FeatureCatalog(std::move(picked));
}

} // namespace cmfmts
