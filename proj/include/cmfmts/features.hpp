#pragma once

#include <span>
#include <vector>

#include "cmfmts/catalog.hpp"
#include "cmfmts/dataset.hpp"

namespace cmfmts {

/// Additive trend/remainder split: x = trend + remainder elementwise.
/// The seasonal part is identically zero in this library (series are treated
/// as plain vectors), so it is not materialized.
struct Decomposition {
  std::vector<double> trend;
  std::vector<double> remainder;
};

/// Local linear regression smoother with tricube weights; window width
/// max(7, ceil(0.1*n)), truncated at the edges. Requires size >= 7.
Decomposition decompose(std::span<const double> x);

/// Evaluates one catalog feature with the full guard set (minimum length,
/// missing-value contamination, non-finite results mapped to NA).
/// The name must exist in the default catalog.
double compute_feature(std::span<const double> x, const std::string& name);

/// One value per catalog descriptor, in catalog order. Total: every entry is
/// a finite double or NA, never an exception, and the result is a pure
/// function of the input bytes.
std::vector<double> extract_features(const Channel& channel, const FeatureCatalog& catalog);

} // namespace cmfmts
