#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace cmfmts {

/// One univariate component of a multivariate instance. Missing observations
/// are stored as quiet NaN.
struct Channel {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  static bool is_missing(double v) { return std::isnan(v); }
  bool has_missing() const {
    for (double v : values)
      if (std::isnan(v)) return true;
    return false;
  }
};

struct MTSInstance {
  std::string id;
  std::vector<Channel> channels;
  std::string label;
};

/// A labeled multivariate time-series dataset. Channel count is uniform
/// across instances; channel lengths may vary per instance and per channel.
/// Immutable by convention once built, safe to read concurrently.
struct MTSDataset {
  std::string name;
  std::vector<MTSInstance> instances;
  std::vector<std::string> class_alphabet; // ordered, duplicates forbidden
  std::size_t dims = 0;

  std::size_t size() const { return instances.size(); }
};

bool operator==(const Channel& a, const Channel& b);
bool operator==(const MTSInstance& a, const MTSInstance& b);
bool operator==(const MTSDataset& a, const MTSDataset& b);

/// Parses the UEA `.ts` text format. Header keywords are case-insensitive;
/// `?` and `NaN` denote missing values; the last `:`-separated token of each
/// record is the class label. Throws parse_error with a line number.
MTSDataset parse_ts(const std::string& text, const std::string& fallback_name = "");

/// Inverse of parse_ts; values are printed with 17 significant digits so
/// that parse_ts(serialize_ts(d)) == d.
std::string serialize_ts(const MTSDataset& dataset);

/// Parses the long-form CSV `Ts_id,Ts_dimId,Ts_class,v1,v2,...`.
/// Rows are grouped by Ts_id in first-appearance order; Ts_dimId must cover
/// 1..dims for every id; empty cells denote missing values; rows may be
/// ragged (a shorter row is a shorter channel).
MTSDataset parse_long_csv(const std::string& text, const std::string& name = "");

std::string serialize_long_csv(const MTSDataset& dataset);

/// Removes the trailing missing-value run of every channel (the padding the
/// repository appends to equalize lengths). Interior missing values are kept.
/// Throws input_error when a channel would become empty.
MTSDataset strip_padding(const MTSDataset& dataset);

MTSDataset load_dataset_file(const std::string& path);
void write_dataset_file(const MTSDataset& dataset, const std::string& path);

} // namespace cmfmts
