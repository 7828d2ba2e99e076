#pragma once

#include <string>
#include <vector>

namespace cmfmts {

/// Tabular feature data: one row per MTS instance, columns named
/// var{d}_{feature} in channel-major order. Missing cells are quiet NaN.
class FeatureMatrix {
public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> column_names, std::size_t rows);

  std::size_t rows() const { return ids_.size(); }
  std::size_t cols() const { return column_names_.size(); }

  const std::vector<std::string>& column_names() const { return column_names_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::string& id(std::size_t r) { return ids_[r]; }
  std::string& label(std::size_t r) { return labels_[r]; }

  double at(std::size_t r, std::size_t c) const { return cells_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return cells_[r * cols() + c]; }

  /// Index of a column name, or npos.
  std::size_t column_index(const std::string& name) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// A copy keeping only the named columns, in the given order.
  FeatureMatrix select_columns(const std::vector<std::string>& names) const;

  /// Per-column NA counts, aligned with column_names().
  std::vector<std::size_t> na_counts() const;

private:
  std::vector<std::string> column_names_;
  std::vector<std::string> ids_;
  std::vector<std::string> labels_;
  std::vector<double> cells_; // row-major
};

/// CSV round-trip: header `id,label,<columns...>`; NA cells written as the
/// literal `NA`; finite cells with 17 significant digits so values survive
/// bit-exactly.
std::string write_feature_csv(const FeatureMatrix& m);
FeatureMatrix read_feature_csv(const std::string& text);

void write_feature_csv_file(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_feature_csv_file(const std::string& path);

} // namespace cmfmts
