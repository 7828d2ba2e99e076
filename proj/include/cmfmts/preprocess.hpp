#pragma once

#include <map>
#include <set>
#include <string>

#include "cmfmts/matrix.hpp"

namespace cmfmts {

/// Which column means fill the NAs of a split being transformed.
///   OwnColumnMeans  — each split is imputed with its own column means (the
///                     procedure as written; the test split contributes its
///                     own statistics).
///   TrainMeans      — both splits are imputed with the train means.
enum class ImputationMode { OwnColumnMeans, TrainMeans };

/// Replaces every non-finite cell with NA. Finite cells are untouched.
FeatureMatrix sanitize(const FeatureMatrix& m);

/// Train-derived preprocessing state: which columns to drop and the train
/// means of the surviving columns. Immutable once fitted.
class Preprocessor {
public:
  /// Fits on a sanitized train matrix: records all-NA columns, computes the
  /// means of the remaining columns, imputes, then records columns that are
  /// constant after imputation. Throws compute_error when nothing survives.
  static Preprocessor fit(const FeatureMatrix& train);

  /// Drops the recorded columns and imputes the remaining NAs; the output
  /// contains no NA and no non-finite value. An all-NA column of a non-train
  /// split under OwnColumnMeans falls back to the train mean.
  FeatureMatrix transform(const FeatureMatrix& m, bool is_train,
                          ImputationMode mode = ImputationMode::OwnColumnMeans) const;

  const std::set<std::string>& dropped_all_na() const { return dropped_all_na_; }
  const std::set<std::string>& dropped_constant() const { return dropped_constant_; }
  const std::map<std::string, double>& train_means() const { return train_means_; }
  const std::vector<std::string>& surviving_columns() const { return surviving_; }

  std::string to_json() const;
  static Preprocessor from_json(const std::string& text);

  void save(const std::string& path) const;
  static Preprocessor load(const std::string& path);

private:
  Preprocessor() = default;
  std::set<std::string> dropped_all_na_;
  std::set<std::string> dropped_constant_;
  std::map<std::string, double> train_means_;
  std::vector<std::string> surviving_; // original column order
};

} // namespace cmfmts
