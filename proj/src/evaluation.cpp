#include "cmfmts/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cmfmts/errors.hpp"
#include "cmfmts/stats.hpp"

namespace cmfmts {

using stats::is_na;
using stats::kNA;

double accuracy(const std::vector<std::string>& pred, const std::vector<std::string>& truth) {
  if (pred.size() != truth.size())
    throw compute_error("prediction/truth length mismatch: " + std::to_string(pred.size()) +
                        " vs " + std::to_string(truth.size()));
  if (pred.empty()) throw compute_error("accuracy of empty label sequences");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

ResultsTable read_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  if (!std::getline(in, raw)) throw parse_error("empty results CSV");
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  if (raw != "dataset,method,accuracy")
    throw parse_error("expected header dataset,method,accuracy", 1);

  struct Cell {
    std::size_t d, m;
    double v;
  };
  std::vector<Cell> cells;
  std::vector<std::string> datasets, methods;
  std::map<std::string, std::size_t> d_index, m_index;
  std::size_t line_no = 1;
  bool any_above_one = false;

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const std::size_t c1 = raw.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : raw.find(',', c1 + 1);
    if (c2 == std::string::npos) throw parse_error("expected 3 cells", line_no);
    const std::string dataset = raw.substr(0, c1);
    const std::string method = raw.substr(c1 + 1, c2 - c1 - 1);
    const std::string acc = raw.substr(c2 + 1);
    double v = kNA;
    if (acc != "NA") {
      char* end = nullptr;
      v = std::strtod(acc.c_str(), &end);
      if (end != acc.c_str() + acc.size() || !std::isfinite(v) || v < 0)
        throw parse_error("bad accuracy '" + acc + "'", line_no);
      if (v > 1.0) any_above_one = true;
    }
    auto [dit, dnew] = d_index.try_emplace(dataset, datasets.size());
    if (dnew) datasets.push_back(dataset);
    auto [mit, mnew] = m_index.try_emplace(method, methods.size());
    if (mnew) methods.push_back(method);
    cells.push_back({dit->second, mit->second, v});
  }
  if (methods.empty()) throw parse_error("results CSV has no rows");

  ResultsTable t;
  t.methods = methods;
  t.datasets = datasets;
  t.cells.assign(datasets.size() * methods.size(), kNA);
  std::vector<bool> seen(t.cells.size(), false);
  for (const Cell& c : cells) {
    const std::size_t at = c.d * methods.size() + c.m;
    if (seen[at])
      throw parse_error("duplicate cell for " + datasets[c.d] + "/" + methods[c.m]);
    seen[at] = true;
    t.cells[at] = any_above_one && !is_na(c.v) ? c.v / 100.0 : c.v;
  }
  for (bool s : seen)
    if (!s) throw parse_error("results CSV is not a complete dataset x method grid");
  for (double v : t.cells)
    if (!is_na(v) && v > 1.0) throw parse_error("accuracy above 100%");
  return t;
}

ResultsTable read_results_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_results_csv(ss.str());
}

namespace {

double na_zero(double v) { return is_na(v) ? 0.0 : v; }

} // namespace

std::vector<double> average_ranks(const ResultsTable& table) {
  const std::size_t k = table.methods.size();
  const std::size_t n = table.datasets.size();
  if (k < 2) throw compute_error("ranking needs at least 2 methods");
  if (n < 1) throw compute_error("ranking needs at least 1 dataset");
  std::vector<double> sum(k, 0.0);
  std::vector<std::pair<double, std::size_t>> order(k);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t m = 0; m < k; ++m) order[m] = {na_zero(table.at(d, m)), m};
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::size_t i = 0;
    while (i < k) {
      std::size_t j = i;
      while (j < k && order[j].first == order[i].first) ++j;
      const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
      for (std::size_t t = i; t < j; ++t) sum[order[t].second] += mean_rank;
      i = j;
    }
  }
  for (double& s : sum) s /= static_cast<double>(n);
  return sum;
}

std::vector<WinLossTie> win_loss_tie(const ResultsTable& table, TieConvention convention) {
  const std::size_t k = table.methods.size();
  std::vector<WinLossTie> out(k);
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    double best = 0;
    for (std::size_t m = 0; m < k; ++m) best = std::max(best, na_zero(table.at(d, m)));
    std::size_t sharers = 0;
    for (std::size_t m = 0; m < k; ++m)
      if (na_zero(table.at(d, m)) == best) ++sharers;
    for (std::size_t m = 0; m < k; ++m) {
      const bool at_best = na_zero(table.at(d, m)) == best;
      if (!at_best) {
        ++out[m].losses;
      } else if (convention == TieConvention::SharedWin) {
        ++out[m].wins;
        if (sharers > 1) ++out[m].ties;
      } else {
        if (sharers > 1)
          ++out[m].ties;
        else
          ++out[m].wins;
      }
    }
  }
  return out;
}

namespace {

/// q_alpha / sqrt(2) constants of the Studentized range at nu = inf, for
/// k = 2..20 (the form used directly in the critical-difference formula).
constexpr double kQ05[] = {1.9600, 2.3437, 2.5690, 2.7278, 2.8497, 2.9483, 3.0309,
                           3.1017, 3.1637, 3.2187, 3.2680, 3.3127, 3.3536, 3.3912,
                           3.4260, 3.4584, 3.4887, 3.5171, 3.5438};
constexpr double kQ10[] = {1.6449, 2.0523, 2.2913, 2.4595, 2.5885, 2.6927, 2.7799,
                           2.8546, 2.9199, 2.9778, 3.0297, 3.0767, 3.1197, 3.1592,
                           3.1957, 3.2297, 3.2615, 3.2912, 3.3192};

double q_alpha(std::size_t k, double alpha) {
  if (k < 2) throw compute_error("critical difference needs k >= 2");
  if (k > 20) throw compute_error("q_alpha table exhausted (k > 20)");
  if (alpha == 0.05) return kQ05[k - 2];
  if (alpha == 0.10) return kQ10[k - 2];
  throw input_error("alpha must be 0.05 or 0.10");
}

} // namespace

FriedmanNemenyi friedman_nemenyi(const ResultsTable& table, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw input_error("alpha must lie in (0, 1)");
  const std::size_t k = table.methods.size();
  const std::size_t n = table.datasets.size();
  if (n < 2) throw compute_error("Friedman test needs at least 2 datasets");
  const std::vector<double> ranks = average_ranks(table);
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  double sum_sq = 0;
  for (double r : ranks) sum_sq += r * r;
  FriedmanNemenyi out;
  out.chi2 = 12.0 * nn / (kk * (kk + 1.0)) * (sum_sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0);
  out.chi2 = std::max(0.0, out.chi2);
  out.cd = q_alpha(k, alpha) * std::sqrt(kk * (kk + 1.0) / (6.0 * nn));
  return out;
}

std::vector<std::vector<std::size_t>> cd_cliques(const std::vector<double>& avg_ranks,
                                                 double cd) {
  const std::size_t k = avg_ranks.size();
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return avg_ranks[a] < avg_ranks[b]; });
  std::vector<std::vector<std::size_t>> cliques;
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i;
    while (j + 1 < k && avg_ranks[order[j + 1]] - avg_ranks[order[i]] < cd) ++j;
    if (j == i) continue; // singleton groups carry no line
    if (!cliques.empty() && j + 1 <= prev_end) continue; // contained in the previous group
    cliques.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(j + 1));
    prev_end = j + 1;
  }
  return cliques;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

std::string summary_csv(const ResultsTable& table, TieConvention convention) {
  const std::vector<double> ranks = average_ranks(table);
  const std::vector<WinLossTie> wlt = win_loss_tie(table, convention);
  std::ostringstream out;
  out << "method,avg_rank,wins,losses,ties\n";
  for (std::size_t m = 0; m < table.methods.size(); ++m)
    out << table.methods[m] << ',' << format_double(ranks[m]) << ',' << wlt[m].wins << ','
        << wlt[m].losses << ',' << wlt[m].ties << "\n";
  return out.str();
}

std::string cd_diagram_csv(const ResultsTable& table, double alpha) {
  const std::vector<double> ranks = average_ranks(table);
  const FriedmanNemenyi fn = friedman_nemenyi(table, alpha);
  const auto cliques = cd_cliques(ranks, fn.cd);
  std::ostringstream out;
  out << "kind,key,value\n";
  out << "cd," << format_double(alpha) << ',' << format_double(fn.cd) << "\n";
  out << "friedman_chi2,," << format_double(fn.chi2) << "\n";
  for (std::size_t m = 0; m < table.methods.size(); ++m)
    out << "rank," << table.methods[m] << ',' << format_double(ranks[m]) << "\n";
  for (std::size_t g = 0; g < cliques.size(); ++g) {
    out << "clique," << (g + 1) << ',';
    for (std::size_t i = 0; i < cliques[g].size(); ++i) {
      if (i) out << '|';
      out << table.methods[cliques[g][i]];
    }
    out << "\n";
  }
  return out.str();
}

} // namespace cmfmts
