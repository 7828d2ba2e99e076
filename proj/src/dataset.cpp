#include "cmfmts/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cmfmts/errors.hpp"

namespace cmfmts {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_value(const std::string& tok, std::size_t line_no) {
  std::string t = trim(tok);
  if (t.empty()) throw parse_error("empty value token", line_no);
  std::string lower = to_lower(t);
  if (lower == "?" || lower == "nan") return std::nan("");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw parse_error("bad numeric literal '" + t + "'", line_no);
  return v;
}

std::string format_value(double v) {
  if (std::isnan(v)) return "?";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool values_equal(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return a == b; // bit-level for finite values written with %.17g
}

} // namespace

bool operator==(const Channel& a, const Channel& b) {
  if (a.values.size() != b.values.size()) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (!values_equal(a.values[i], b.values[i])) return false;
  return true;
}

bool operator==(const MTSInstance& a, const MTSInstance& b) {
  return a.id == b.id && a.label == b.label && a.channels == b.channels;
}

bool operator==(const MTSDataset& a, const MTSDataset& b) {
  return a.name == b.name && a.dims == b.dims &&
         a.class_alphabet == b.class_alphabet && a.instances == b.instances;
}

MTSDataset parse_ts(const std::string& text, const std::string& fallback_name) {
  MTSDataset ds;
  ds.name = fallback_name;

  bool in_data = false;
  bool has_dims = false;
  bool has_labels = false;
  std::unordered_set<std::string> alphabet;
  std::size_t line_no = 0;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (!in_data && line[0] == '@') {
      std::istringstream hs(line);
      std::string key;
      hs >> key;
      key = to_lower(key.substr(1));
      if (key == "data") {
        in_data = true;
      } else if (key == "problemname") {
        std::string rest;
        std::getline(hs, rest);
        ds.name = trim(rest);
      } else if (key == "dimensions") {
        long d = 0;
        if (!(hs >> d) || d < 1) throw parse_error("bad @dimensions value", line_no);
        ds.dims = static_cast<std::size_t>(d);
        has_dims = true;
      } else if (key == "univariate") {
        std::string v;
        hs >> v;
        if (to_lower(v) == "true" && !has_dims) {
          ds.dims = 1;
          has_dims = true;
        }
      } else if (key == "timestamps") {
        std::string v;
        hs >> v;
        if (to_lower(v) == "true")
          throw parse_error("timestamped series are not supported", line_no);
      } else if (key == "classlabel") {
        std::string v;
        hs >> v;
        if (to_lower(v) != "true")
          throw parse_error("unlabeled datasets (@classLabel false) are not supported",
                            line_no);
        std::string lab;
        while (hs >> lab) {
          if (!alphabet.insert(lab).second)
            throw parse_error("duplicate class label '" + lab + "'", line_no);
          ds.class_alphabet.push_back(lab);
        }
        if (ds.class_alphabet.empty())
          throw parse_error("@classLabel true lists no labels", line_no);
        has_labels = true;
      }
      // @equalLength, @seriesLength, @missing, ... carry no information we
      // need; unknown keys are ignored for compatibility with archive files.
      continue;
    }

    if (!in_data) throw parse_error("data record before @data", line_no);
    if (!has_labels) throw parse_error("@data without a preceding @classLabel", line_no);

    std::vector<std::string> parts = split(line, ':');
    if (parts.size() < 2) throw parse_error("record without class label", line_no);
    std::string label = trim(parts.back());
    parts.pop_back();

    if (!has_dims) {
      ds.dims = parts.size();
      has_dims = true;
    }
    if (parts.size() != ds.dims)
      throw parse_error("record has " + std::to_string(parts.size()) +
                            " dimensions, expected " + std::to_string(ds.dims),
                        line_no);
    if (!alphabet.count(label))
      throw parse_error("unknown class label '" + label + "'", line_no);

    MTSInstance inst;
    inst.id = std::to_string(ds.instances.size());
    inst.label = label;
    for (std::size_t d = 0; d < parts.size(); ++d) {
      Channel ch;
      if (trim(parts[d]).empty())
        throw parse_error("empty dimension " + std::to_string(d + 1), line_no);
      for (const std::string& tok : split(parts[d], ','))
        ch.values.push_back(parse_value(tok, line_no));
      inst.channels.push_back(std::move(ch));
    }
    ds.instances.push_back(std::move(inst));
  }

  if (!in_data) throw parse_error("missing @data section");
  if (ds.instances.empty()) throw parse_error("dataset has no instances");
  return ds;
}

std::string serialize_ts(const MTSDataset& dataset) {
  std::ostringstream out;
  out << "@problemName " << dataset.name << "\n";
  out << "@timeStamps false\n";
  out << "@dimensions " << dataset.dims << "\n";
  out << "@classLabel true";
  for (const std::string& lab : dataset.class_alphabet) out << ' ' << lab;
  out << "\n@data\n";
  for (const MTSInstance& inst : dataset.instances) {
    for (std::size_t d = 0; d < inst.channels.size(); ++d) {
      const auto& vals = inst.channels[d].values;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out << ',';
        out << format_value(vals[i]);
      }
      out << ':';
    }
    out << inst.label << "\n";
  }
  return out.str();
}

MTSDataset parse_long_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;

  if (!std::getline(in, raw)) throw parse_error("empty file");
  ++line_no;
  std::vector<std::string> header = split(trim(raw), ',');
  if (header.size() < 3 || trim(header[0]) != "Ts_id" ||
      trim(header[1]) != "Ts_dimId" || trim(header[2]) != "Ts_class")
    throw parse_error("expected header Ts_id,Ts_dimId,Ts_class,v1,...", line_no);

  struct Row {
    std::size_t dim;
    Channel channel;
  };
  std::vector<std::string> id_order;
  std::unordered_map<std::string, std::string> id_class;
  std::unordered_map<std::string, std::vector<Row>> id_rows;
  std::vector<std::string> class_order;
  std::unordered_set<std::string> classes_seen;
  std::size_t max_dim = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() < 3) throw parse_error("row with fewer than 3 cells", line_no);
    std::string id = trim(cells[0]);
    std::string dim_s = trim(cells[1]);
    std::string cls = trim(cells[2]);
    long dim = 0;
    auto [p, ec] = std::from_chars(dim_s.data(), dim_s.data() + dim_s.size(), dim);
    if (ec != std::errc() || p != dim_s.data() + dim_s.size() || dim < 1)
      throw parse_error("bad Ts_dimId '" + dim_s + "'", line_no);

    auto it = id_class.find(id);
    if (it == id_class.end()) {
      id_order.push_back(id);
      id_class.emplace(id, cls);
    } else if (it->second != cls) {
      throw parse_error("conflicting classes for Ts_id '" + id + "'", line_no);
    }
    if (classes_seen.insert(cls).second) class_order.push_back(cls);

    Row row;
    row.dim = static_cast<std::size_t>(dim);
    max_dim = std::max(max_dim, row.dim);
    for (std::size_t i = 3; i < cells.size(); ++i) {
      std::string t = trim(cells[i]);
      row.channel.values.push_back(t.empty() ? std::nan("") : parse_value(t, line_no));
    }
    if (row.channel.values.empty())
      throw parse_error("row with no values for Ts_id '" + id + "'", line_no);
    id_rows[id].push_back(std::move(row));
  }

  if (id_order.empty()) throw parse_error("dataset has no instances");

  MTSDataset ds;
  ds.name = name;
  ds.dims = max_dim;
  ds.class_alphabet = class_order;
  for (const std::string& id : id_order) {
    MTSInstance inst;
    inst.id = id;
    inst.label = id_class[id];
    inst.channels.resize(ds.dims);
    std::vector<bool> seen(ds.dims, false);
    for (Row& row : id_rows[id]) {
      if (row.dim > ds.dims) throw parse_error("Ts_dimId out of range for '" + id + "'");
      if (seen[row.dim - 1])
        throw parse_error("duplicate dimension " + std::to_string(row.dim) +
                          " for Ts_id '" + id + "'");
      seen[row.dim - 1] = true;
      inst.channels[row.dim - 1] = std::move(row.channel);
    }
    for (std::size_t d = 0; d < ds.dims; ++d)
      if (!seen[d])
        throw parse_error("missing dimension " + std::to_string(d + 1) +
                          " for Ts_id '" + id + "'");
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

std::string serialize_long_csv(const MTSDataset& dataset) {
  std::size_t max_len = 1;
  for (const MTSInstance& inst : dataset.instances)
    for (const Channel& ch : inst.channels) max_len = std::max(max_len, ch.size());

  std::ostringstream out;
  out << "Ts_id,Ts_dimId,Ts_class";
  for (std::size_t i = 1; i <= max_len; ++i) out << ",v" << i;
  out << "\n";
  for (const MTSInstance& inst : dataset.instances) {
    for (std::size_t d = 0; d < inst.channels.size(); ++d) {
      out << inst.id << ',' << (d + 1) << ',' << inst.label;
      // exactly the channel's own cells: shorter rows round-trip to shorter
      // channels instead of acquiring trailing missing values
      for (double v : inst.channels[d].values)
        out << ',' << (std::isnan(v) ? "" : format_value(v));
      out << "\n";
    }
  }
  return out.str();
}

MTSDataset strip_padding(const MTSDataset& dataset) {
  MTSDataset out = dataset;
  for (MTSInstance& inst : out.instances) {
    for (std::size_t d = 0; d < inst.channels.size(); ++d) {
      auto& vals = inst.channels[d].values;
      while (!vals.empty() && std::isnan(vals.back())) vals.pop_back();
      if (vals.empty())
        throw input_error("instance '" + inst.id + "' channel " +
                          std::to_string(d + 1) + " is empty after padding strip");
    }
  }
  return out;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

MTSDataset load_dataset_file(const std::string& path) {
  std::string text = read_file(path);
  if (ends_with(to_lower(path), ".csv")) return parse_long_csv(text, file_stem(path));
  return parse_ts(text, file_stem(path));
}

void write_dataset_file(const MTSDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path + "'");
  if (ends_with(to_lower(path), ".csv"))
    out << serialize_long_csv(dataset);
  else
    out << serialize_ts(dataset);
}

} // namespace cmfmts
