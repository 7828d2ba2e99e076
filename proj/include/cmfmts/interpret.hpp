#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmfmts/catalog.hpp"

namespace cmfmts {

class Model;

/// Raw forest importances of one trained model keyed by column name
/// (var{d}_{feature}); columns dropped during preprocessing are simply
/// absent and contribute 0.
struct DatasetImportance {
  std::string dataset;
  std::size_t dims = 0;
  std::vector<std::string> catalog; // feature names, catalog order
  std::map<std::string, double> column_importance;
};

/// Builds DatasetImportance from a fitted forest model (requires the model
/// meta to carry dims and catalog).
DatasetImportance dataset_importance_from_model(const Model& model);

/// Per-feature importance of one dataset: column importances are summed over
/// variables, divided by the variable count, then min-max normalized to
/// [0, 1]. `degenerate` is set when all features tie (all values emitted 0).
struct FeatureImportance {
  std::vector<double> values; // aligned with catalog
  bool degenerate = false;
};

FeatureImportance feature_importance_by_dataset(const DatasetImportance& d);

/// Mean of the normalized per-dataset values, feature by feature.
std::vector<double> average_feature_importance(
    const std::vector<DatasetImportance>& datasets, const std::vector<std::string>& catalog);

/// Per-variable accumulated importance, rescaled by the maximum variable (so
/// max = 1), plus the summary statistics of the rescaled values.
struct VariableImportance {
  std::vector<double> values; // one per variable, max = 1
  double sum = 0, max = 0, min = 0, mean = 0, median = 0, var = 0, sd = 0;
  std::size_t variables = 0;
};

/// `sample_variance` selects the n-1 denominator for Var/SD; the default is
/// the population form.
VariableImportance variable_importance(const DatasetImportance& d,
                                       bool sample_variance = false);

/// Equal-width histogram over [0, 1] with a right-closed last bin.
std::vector<std::size_t> importance_histogram(const std::vector<double>& values,
                                              std::size_t bins = 10);

/// Full report over a set of fitted models.
struct ImportanceReport {
  std::vector<std::string> datasets;
  std::vector<std::string> catalog;
  std::vector<FeatureImportance> per_dataset;     // aligned with datasets
  std::vector<double> feature_average;            // aligned with catalog
  std::vector<VariableImportance> per_variable;   // aligned with datasets
};

ImportanceReport build_importance_report(const std::vector<DatasetImportance>& inputs,
                                         bool sample_variance = false);

/// CSV emitters (formats documented in the README):
///   heatmap:           dataset,feature,importance
///   ordered heatmap:   dataset,feature,importance,rank   (datasets sorted by
///                      total accumulated importance, descending, stable)
///   feature average:   feature,importance
///   per-variable:      dataset,variable,importance
///   variable stats:    Datasets,Sum,Max,Min,Mean,Median,Var,SD,Variables
std::string heatmap_csv(const ImportanceReport& r);
std::string ordered_heatmap_csv(const ImportanceReport& r);
std::string feature_average_csv(const ImportanceReport& r);
std::string variable_importance_csv(const ImportanceReport& r);
std::string variable_stats_csv(const ImportanceReport& r);

} // namespace cmfmts
