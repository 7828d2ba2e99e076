#pragma once

#include "cmfmts/catalog.hpp"
#include "cmfmts/dataset.hpp"
#include "cmfmts/matrix.hpp"

namespace cmfmts {

/// Builds `var{d}_{feature}` names in channel-major order: all features of
/// var1, then var2, ...
std::vector<std::string> feature_column_names(std::size_t dims, const FeatureCatalog& catalog);

/// Computes the feature matrix of a dataset: row i holds the features of all
/// channels of instance i. Instances are processed in parallel when jobs > 1;
/// assembly is by instance index, so the result does not depend on jobs.
FeatureMatrix extract_dataset(const MTSDataset& dataset, const FeatureCatalog& catalog,
                              unsigned jobs = 1);

} // namespace cmfmts
