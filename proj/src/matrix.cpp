#include "cmfmts/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "cmfmts/errors.hpp"
#include "cmfmts/stats.hpp"

namespace cmfmts {

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names, std::size_t rows)
    : column_names_(std::move(column_names)),
      ids_(rows),
      labels_(rows),
      cells_(rows * column_names_.size(), stats::kNA) {}

std::size_t FeatureMatrix::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < column_names_.size(); ++i)
    if (column_names_[i] == name) return i;
  return npos;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::string>& names) const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < column_names_.size(); ++i) index.emplace(column_names_[i], i);
  std::vector<std::size_t> picked;
  picked.reserve(names.size());
  for (const std::string& n : names) {
    auto it = index.find(n);
    if (it == index.end()) throw compute_error("unknown column '" + n + "'");
    picked.push_back(it->second);
  }
  FeatureMatrix out(names, rows());
  out.ids_ = ids_;
  out.labels_ = labels_;
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < picked.size(); ++c)
      out.at(r, c) = at(r, picked[c]);
  return out;
}

std::vector<std::size_t> FeatureMatrix::na_counts() const {
  std::vector<std::size_t> counts(cols(), 0);
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c)
      if (std::isnan(at(r, c))) ++counts[c];
  return counts;
}

namespace {

std::string format_cell(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

void check_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") != std::string::npos)
    throw input_error("field '" + s + "' contains CSV metacharacters");
}

} // namespace

std::string write_feature_csv(const FeatureMatrix& m) {
  std::ostringstream out;
  out << "id,label";
  for (const std::string& c : m.column_names()) {
    check_field(c);
    out << ',' << c;
  }
  out << "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    check_field(m.ids()[r]);
    check_field(m.labels()[r]);
    out << m.ids()[r] << ',' << m.labels()[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << format_cell(m.at(r, c));
    out << "\n";
  }
  return out.str();
}

FeatureMatrix read_feature_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  if (!std::getline(in, raw)) throw parse_error("empty feature CSV");
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  std::vector<std::string> header = split_csv_line(raw);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label")
    throw parse_error("feature CSV header must start with id,label", 1);

  std::vector<std::string> columns(header.begin() + 2, header.end());
  std::vector<std::vector<std::string>> body;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    std::vector<std::string> cells = split_csv_line(raw);
    if (cells.size() != header.size())
      throw parse_error("row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()),
                        line_no);
    body.push_back(std::move(cells));
  }

  FeatureMatrix m(columns, body.size());
  for (std::size_t r = 0; r < body.size(); ++r) {
    m.id(r) = body[r][0];
    m.label(r) = body[r][1];
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string& cell = body[r][c + 2];
      if (cell == "NA") {
        m.at(r, c) = stats::kNA;
      } else {
        char* end = nullptr;
        double v = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size())
          throw parse_error("bad cell '" + cell + "'", r + 2);
        m.at(r, c) = v;
      }
    }
  }
  return m;
}

void write_feature_csv_file(const FeatureMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << write_feature_csv(m);
}

FeatureMatrix read_feature_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_feature_csv(ss.str());
}

} // namespace cmfmts
