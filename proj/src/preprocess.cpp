#include "cmfmts/preprocess.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmfmts/errors.hpp"
#include "cmfmts/stats.hpp"

namespace cmfmts {

using nlohmann::json;
using stats::is_na;
using stats::kNA;

FeatureMatrix sanitize(const FeatureMatrix& m) {
  FeatureMatrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c)
      if (!std::isfinite(out.at(r, c))) out.at(r, c) = kNA;
  return out;
}

namespace {

/// Column mean over non-NA cells, Kahan-compensated; NA for an all-NA column.
double column_mean(const FeatureMatrix& m, std::size_t c) {
  double s = 0.0, comp = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double v = m.at(r, c);
    if (is_na(v)) continue;
    const double y = v - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
    ++n;
  }
  return n == 0 ? kNA : s / static_cast<double>(n);
}

bool column_constant_after_impute(const FeatureMatrix& m, std::size_t c, double mean) {
  bool seen = false;
  double first = 0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double v = m.at(r, c);
    if (is_na(v)) v = mean;
    if (!seen) {
      first = v;
      seen = true;
    } else if (v != first) {
      return false;
    }
  }
  return true;
}

} // namespace

Preprocessor Preprocessor::fit(const FeatureMatrix& train) {
  if (train.rows() == 0) throw compute_error("cannot fit preprocessor on empty matrix");
  Preprocessor p;
  for (std::size_t c = 0; c < train.cols(); ++c) {
    const std::string& name = train.column_names()[c];
    const double mean = column_mean(train, c);
    if (is_na(mean)) {
      p.dropped_all_na_.insert(name);
      continue;
    }
    if (column_constant_after_impute(train, c, mean)) {
      p.dropped_constant_.insert(name);
      continue;
    }
    p.train_means_.emplace(name, mean);
    p.surviving_.push_back(name);
  }
  if (p.surviving_.empty()) throw compute_error("no informative features");
  return p;
}

FeatureMatrix Preprocessor::transform(const FeatureMatrix& m, bool is_train,
                                      ImputationMode mode) const {
  FeatureMatrix out = m.select_columns(surviving_); // throws on unknown column
  for (std::size_t c = 0; c < out.cols(); ++c) {
    const double train_mean = train_means_.at(out.column_names()[c]);
    double fill = train_mean;
    if (mode == ImputationMode::OwnColumnMeans) {
      const double own = column_mean(out, c);
      // an all-NA column of a test split has no own mean to offer
      if (!is_na(own)) fill = is_train ? train_mean : own;
    }
    for (std::size_t r = 0; r < out.rows(); ++r)
      if (is_na(out.at(r, c))) out.at(r, c) = fill;
  }
  return out;
}

std::string Preprocessor::to_json() const {
  json j;
  j["version"] = 1;
  j["dropped_all_na"] = json::array();
  for (const std::string& c : dropped_all_na_) j["dropped_all_na"].push_back(c);
  j["dropped_constant"] = json::array();
  for (const std::string& c : dropped_constant_) j["dropped_constant"].push_back(c);
  j["train_means"] = json::object();
  for (const auto& [name, mean] : train_means_) j["train_means"][name] = mean;
  j["column_order"] = surviving_;
  return j.dump(2) + "\n";
}

Preprocessor Preprocessor::from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw input_error("unsupported preprocessor version");
  Preprocessor p;
  for (const auto& c : j.at("dropped_all_na")) p.dropped_all_na_.insert(c.get<std::string>());
  for (const auto& c : j.at("dropped_constant"))
    p.dropped_constant_.insert(c.get<std::string>());
  for (const auto& [name, mean] : j.at("train_means").items())
    p.train_means_.emplace(name, mean.get<double>());
  if (j.contains("column_order")) {
    p.surviving_ = j["column_order"].get<std::vector<std::string>>();
  } else {
    for (const auto& [name, mean] : p.train_means_) p.surviving_.push_back(name);
  }
  if (p.surviving_.size() != p.train_means_.size())
    throw input_error("preprocessor column_order does not match train_means");
  return p;
}

void Preprocessor::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << to_json();
}

Preprocessor Preprocessor::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

} // namespace cmfmts
