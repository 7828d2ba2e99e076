#include "cmfmts/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "cmfmts/classifiers.hpp"
#include "cmfmts/errors.hpp"
#include "cmfmts/stats.hpp"

namespace cmfmts {

DatasetImportance dataset_importance_from_model(const Model& model) {
  auto importance = model.importance();
  if (!importance) throw compute_error("model '" + model.type() + "' carries no importance");
  if (model.meta().dims == 0 || model.meta().catalog.empty())
    throw compute_error("model lacks dims/catalog metadata needed for importance reports");
  DatasetImportance d;
  d.dataset = model.meta().dataset;
  d.dims = model.meta().dims;
  d.catalog = model.meta().catalog;
  const auto& cols = model.columns();
  for (std::size_t c = 0; c < cols.size(); ++c)
    d.column_importance.emplace(cols[c], (*importance)[c]);
  return d;
}

namespace {

double raw_importance(const DatasetImportance& d, std::size_t var_1based,
                      const std::string& feature) {
  auto it = d.column_importance.find("var" + std::to_string(var_1based) + "_" + feature);
  return it == d.column_importance.end() ? 0.0 : it->second;
}

} // namespace

FeatureImportance feature_importance_by_dataset(const DatasetImportance& d) {
  if (d.dims == 0) throw compute_error("dataset importance without dims");
  FeatureImportance out;
  out.values.reserve(d.catalog.size());
  for (const std::string& f : d.catalog) {
    double acc = 0;
    for (std::size_t v = 1; v <= d.dims; ++v) acc += raw_importance(d, v, f);
    out.values.push_back(acc / static_cast<double>(d.dims));
  }
  const auto [mn, mx] = std::minmax_element(out.values.begin(), out.values.end());
  const double lo = *mn, hi = *mx;
  if (hi <= lo) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.degenerate = true;
  } else {
    for (double& v : out.values) v = (v - lo) / (hi - lo);
  }
  return out;
}

std::vector<double> average_feature_importance(const std::vector<DatasetImportance>& datasets,
                                               const std::vector<std::string>& catalog) {
  if (datasets.empty()) throw compute_error("no dataset importances to average");
  std::vector<double> avg(catalog.size(), 0.0);
  for (const DatasetImportance& d : datasets) {
    if (d.catalog != catalog)
      throw compute_error("importances of '" + d.dataset + "' use a different catalog");
    const FeatureImportance fi = feature_importance_by_dataset(d);
    for (std::size_t i = 0; i < catalog.size(); ++i) avg[i] += fi.values[i];
  }
  for (double& v : avg) v /= static_cast<double>(datasets.size());
  return avg;
}

VariableImportance variable_importance(const DatasetImportance& d, bool sample_variance) {
  if (d.dims == 0) throw compute_error("dataset importance without dims");
  VariableImportance out;
  out.variables = d.dims;
  out.values.resize(d.dims, 0.0);
  for (std::size_t v = 1; v <= d.dims; ++v) {
    double acc = 0;
    for (const std::string& f : d.catalog) acc += raw_importance(d, v, f);
    out.values[v - 1] = acc;
  }
  const double mx = *std::max_element(out.values.begin(), out.values.end());
  if (mx <= 0) throw compute_error("untrained or degenerate forest: all importances zero");
  for (double& v : out.values) v /= mx;

  out.sum = stats::sum(out.values);
  out.max = *std::max_element(out.values.begin(), out.values.end());
  out.min = *std::min_element(out.values.begin(), out.values.end());
  out.mean = out.sum / static_cast<double>(d.dims);
  out.median = stats::median(out.values);
  out.var = sample_variance ? (d.dims > 1 ? stats::variance(out.values) : 0.0)
                            : stats::variance_pop(out.values);
  out.sd = std::sqrt(out.var);
  return out;
}

std::vector<std::size_t> importance_histogram(const std::vector<double>& values,
                                              std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    if (v < 0 || v > 1) throw compute_error("histogram input outside [0, 1]");
    auto b = static_cast<std::size_t>(std::floor(v * static_cast<double>(bins)));
    if (b >= bins) b = bins - 1; // v == 1 falls into the right-closed last bin
    ++counts[b];
  }
  return counts;
}

ImportanceReport build_importance_report(const std::vector<DatasetImportance>& inputs,
                                         bool sample_variance) {
  if (inputs.empty()) throw compute_error("no importance inputs");
  ImportanceReport r;
  r.catalog = inputs.front().catalog;
  for (const DatasetImportance& d : inputs) {
    if (d.catalog != r.catalog)
      throw compute_error("importances of '" + d.dataset + "' use a different catalog");
    r.datasets.push_back(d.dataset);
    r.per_dataset.push_back(feature_importance_by_dataset(d));
    r.per_variable.push_back(variable_importance(d, sample_variance));
  }
  r.feature_average = average_feature_importance(inputs, r.catalog);
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

std::string heatmap_csv(const ImportanceReport& r) {
  std::ostringstream out;
  out << "dataset,feature,importance\n";
  for (std::size_t d = 0; d < r.datasets.size(); ++d)
    for (std::size_t f = 0; f < r.catalog.size(); ++f)
      out << r.datasets[d] << ',' << r.catalog[f] << ',' << fmt(r.per_dataset[d].values[f])
          << "\n";
  return out.str();
}

std::string ordered_heatmap_csv(const ImportanceReport& r) {
  std::vector<std::size_t> order(r.datasets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> totals(r.datasets.size(), 0.0);
  for (std::size_t d = 0; d < r.datasets.size(); ++d)
    totals[d] = stats::sum(r.per_dataset[d].values);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });
  std::ostringstream out;
  out << "dataset,feature,importance,rank\n";
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t d = order[pos];
    for (std::size_t f = 0; f < r.catalog.size(); ++f)
      out << r.datasets[d] << ',' << r.catalog[f] << ',' << fmt(r.per_dataset[d].values[f])
          << ',' << (pos + 1) << "\n";
  }
  return out.str();
}

std::string feature_average_csv(const ImportanceReport& r) {
  std::ostringstream out;
  out << "feature,importance\n";
  for (std::size_t f = 0; f < r.catalog.size(); ++f)
    out << r.catalog[f] << ',' << fmt(r.feature_average[f]) << "\n";
  return out.str();
}

std::string variable_importance_csv(const ImportanceReport& r) {
  std::ostringstream out;
  out << "dataset,variable,importance\n";
  for (std::size_t d = 0; d < r.datasets.size(); ++d)
    for (std::size_t v = 0; v < r.per_variable[d].values.size(); ++v)
      out << r.datasets[d] << ',' << (v + 1) << ',' << fmt(r.per_variable[d].values[v])
          << "\n";
  return out.str();
}

std::string variable_stats_csv(const ImportanceReport& r) {
  std::ostringstream out;
  out << "Datasets,Sum,Max,Min,Mean,Median,Var,SD,Variables\n";
  for (std::size_t d = 0; d < r.datasets.size(); ++d) {
    const VariableImportance& v = r.per_variable[d];
    out << r.datasets[d] << ',' << fmt(v.sum) << ',' << fmt(v.max) << ',' << fmt(v.min) << ','
        << fmt(v.mean) << ',' << fmt(v.median) << ',' << fmt(v.var) << ',' << fmt(v.sd) << ','
        << v.variables << "\n";
  }
  return out.str();
}

} // namespace cmfmts
