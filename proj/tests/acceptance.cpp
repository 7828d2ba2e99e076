// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exits nonzero when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cmfmts.h"
#include "cmfmts/catalog.hpp"
#include "cmfmts/classifiers.hpp"
#include "cmfmts/dataset.hpp"
#include "cmfmts/errors.hpp"
#include "cmfmts/evaluation.hpp"
#include "cmfmts/extract.hpp"
#include "cmfmts/features.hpp"
#include "cmfmts/interpret.hpp"
#include "cmfmts/matrix.hpp"
#include "cmfmts/preprocess.hpp"
#include "cmfmts/rng.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace cmfmts;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Check {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("cmfmts_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double feat(const std::vector<double>& x, const std::string& name) {
  return compute_feature(std::span<const double>(x), name);
}

std::vector<double> gaussian_noise(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.gaussian();
  return x;
}

std::vector<double> uniform_noise(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform01();
  return x;
}

FeatureMatrix matrix_of(const std::vector<std::string>& cols,
                        const std::vector<std::vector<double>>& rows,
                        const std::vector<std::string>& labels) {
  FeatureMatrix m(cols, rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    m.id(r) = "r" + std::to_string(r);
    m.label(r) = labels[r];
    for (std::size_t c = 0; c < cols.size(); ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

// ---------------------------------------------------------------------------

Check criterion1_preprocess_golden() {
  Check c;
  FeatureMatrix train = matrix_of(
      {"all_na", "constant", "gap", "clean"},
      {{kNaN, 7, 1, 0}, {kNaN, 7, kNaN, 10}, {kNaN, 7, 3, 20}, {kNaN, 7, 2, 30}},
      {"a", "b", "a", "b"});
  Preprocessor p = Preprocessor::fit(sanitize(train));
  c.expect(p.dropped_all_na() == std::set<std::string>{"all_na"}, "all-NA column not dropped");
  c.expect(p.dropped_constant() == std::set<std::string>{"constant"},
           "constant column not dropped");
  FeatureMatrix out = p.transform(sanitize(train), true);
  c.expect(out.cols() == 2, "expected exactly 2 surviving columns");
  c.expect(out.column_names() == std::vector<std::string>{"gap", "clean"}, "column order");
  const double expected_gap[4] = {1, 2, 3, 2};
  const double expected_clean[4] = {0, 10, 20, 30};
  for (std::size_t r = 0; r < 4; ++r) {
    c.expect(out.at(r, 0) == expected_gap[r], "gap cell mismatch");
    c.expect(out.at(r, 1) == expected_clean[r], "clean cell mismatch");
    c.expect(std::isfinite(out.at(r, 0)) && std::isfinite(out.at(r, 1)), "NA remained");
  }
  return c;
}

Check criterion2_feature_oracles() {
  Check c;
  std::vector<double> ten(10);
  std::iota(ten.begin(), ten.end(), 1.0);
  c.expect(std::fabs(feat(ten, "x_acf1") - 0.7) <= 1e-12, "x_acf1([1..10]) != 0.7");

  for (const std::vector<double>& sym :
       {std::vector<double>{1, 2, 3}, {2, 2, 4, 4}, {-5, -1, 0, 1, 5}, {0, 0, 0, 0, 0, 10, 10, 10, 10, 10}})
    c.expect(std::fabs(feat(sym, "skewness")) <= 1e-12, "symmetric skewness != 0");

  const std::vector<double> constant(8, 5.0);
  c.expect(std::isnan(feat(constant, "kurtosis")), "constant kurtosis not NA");
  c.expect(std::isnan(feat(constant, "skewness")), "constant skewness not NA");
  c.expect(std::isnan(feat(constant, "x_acf1")), "constant x_acf1 not NA");

  c.expect(std::isnan(feat(uniform_noise(5, 10), "x_acf10")), "length-10 x_acf10 not NA");

  std::vector<double> line(80);
  for (std::size_t t = 0; t < line.size(); ++t) line[t] = 1.5 + 0.25 * double(t + 1);
  c.expect(feat(line, "trend") >= 0.99, "line trend below 0.99");
  return c;
}

Check criterion3_statistical_suite() {
  Check c;
  const std::size_t runs = 100;

  std::vector<double> sine(128);
  for (std::size_t t = 0; t < sine.size(); ++t)
    sine[t] = std::sin(2.0 * M_PI * double(t + 1) / 16.0);
  c.expect(feat(sine, "spectral_entropy") <= 0.2, "sinusoid spectral entropy above 0.2");

  double se_sum = 0, trend_sum = 0;
  std::size_t kpss_below = 0;
  for (std::uint64_t s = 0; s < runs; ++s) {
    se_sum += feat(uniform_noise(10000 + s, 512), "spectral_entropy");
    trend_sum += feat(gaussian_noise(20000 + s, 256), "trend");
    if (feat(gaussian_noise(30000 + s, 500), "unitroot_kpss") < 0.463) ++kpss_below;
  }
  c.expect(se_sum / double(runs) >= 0.8, "mean noise spectral entropy below 0.8");
  c.expect(trend_sum / double(runs) <= 0.3, "mean noise trend above 0.3");
  c.expect(kpss_below >= 80, "KPSS below critical value in only " +
                                 std::to_string(kpss_below) + "/100 runs");
  return c;
}

Check criterion4_1nn_oracle() {
  Check c;
  std::size_t mismatches = 0, queries = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed * 6151);
    const std::size_t rows_n = 2 + rng.bounded(9); // <= 10
    const std::size_t cols_n = 1 + rng.bounded(6); // <= 6
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (std::size_t r = 0; r < rows_n; ++r) {
      std::vector<double> row(cols_n);
      for (double& v : row) v = double(rng.bounded(4));
      rows.push_back(std::move(row));
      labels.push_back(rng.bounded(2) ? "p" : "q");
    }
    std::vector<std::string> cols(cols_n);
    for (std::size_t i = 0; i < cols_n; ++i) cols[i] = "f" + std::to_string(i);
    LabelEncoder enc = LabelEncoder::fit(labels);
    TrainingData d =
        TrainingData::from_matrix(matrix_of(cols, rows, labels), enc);
    NNModel nn = fit_1nn(d);

    std::vector<double> mins(cols_n, 1e300), maxs(cols_n, -1e300);
    for (std::size_t cc = 0; cc < cols_n; ++cc)
      for (std::size_t r = 0; r < rows_n; ++r) {
        mins[cc] = std::min(mins[cc], rows[r][cc]);
        maxs[cc] = std::max(maxs[cc], rows[r][cc]);
      }
    for (std::size_t q = 0; q < 10; ++q) {
      std::vector<double> query(cols_n);
      for (double& v : query) v = double(rng.bounded(5)) - 0.5;
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_n; ++r) {
        double dist = 0;
        for (std::size_t cc = 0; cc < cols_n; ++cc) {
          const double range = maxs[cc] - mins[cc];
          const double tr = range > 0 ? (rows[r][cc] - mins[cc]) / range : 0.0;
          double qv = range > 0 ? (query[cc] - mins[cc]) / range : 0.0;
          qv = std::clamp(qv, 0.0, 1.0);
          dist += (tr - qv) * (tr - qv);
        }
        if (dist < best_d) {
          best_d = dist;
          best = r;
        }
      }
      if (predict_1nn(nn, query.data()) != d.labels[best]) ++mismatches;
      ++queries;
    }
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + "/" + std::to_string(queries) +
                                " oracle mismatches");
  return c;
}

Check criterion5_forest_importance() {
  Check c;
  std::size_t hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 271);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < 100; ++i) {
      std::vector<double> row(21);
      const int cls = int(rng.bounded(2));
      for (std::size_t cc = 0; cc < 21; ++cc) row[cc] = rng.gaussian();
      row[13] = double(cls);
      rows.push_back(std::move(row));
      labels.push_back(cls ? "b" : "a");
    }
    std::vector<std::string> cols(21);
    for (std::size_t i = 0; i < 21; ++i) cols[i] = "f" + std::to_string(i);
    LabelEncoder enc = LabelEncoder::fit(labels);
    TrainingData d = TrainingData::from_matrix(matrix_of(cols, rows, labels), enc);
    ForestParams params;
    params.n_trees = 500;
    params.seed = seed;
    ForestModel f = fit_forest(d, enc.size(), params, 4);
    std::vector<std::size_t> order(21);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return f.importance[a] > f.importance[b]; });
    if (order[0] == 13 || order[1] == 13 || order[2] == 13) ++hits;
  }
  c.expect(hits >= 19, "informative column in top-3 for only " + std::to_string(hits) +
                           "/20 seeds");
  return c;
}

Check criterion6_rank_reproduction() {
  Check c;
  const char* fixtures = std::getenv("CMFMTS_FIXTURES");
  const std::string fixture =
      (fixtures ? std::string(fixtures) : std::string(CMFMTS_FIXTURES_DIR)) +
      "/uea_table2.csv";
  const fs::path summary = work_dir() / "summary.csv";
  const fs::path cd = work_dir() / "cd.csv";
  if (cmfmts_rank(fixture.c_str(), 0.05, summary.string().c_str(), cd.string().c_str()) !=
      CMFMTS_OK) {
    c.expect(false, std::string("cmfmts_rank failed: ") + cmfmts_last_error());
    return c;
  }

  double rf_rank = kNaN, lcem_rank = kNaN;
  long mlstm_w = -1, mlstm_l = -1, mlstm_t = -1;
  std::istringstream in(slurp(summary));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string method, rank, w, l, t;
    std::getline(row, method, ',');
    std::getline(row, rank, ',');
    std::getline(row, w, ',');
    std::getline(row, l, ',');
    std::getline(row, t, ',');
    if (method == "CMFM+RF") rf_rank = std::strtod(rank.c_str(), nullptr);
    if (method == "LCEM") lcem_rank = std::strtod(rank.c_str(), nullptr);
    if (method == "MLSTM-FCN") {
      mlstm_w = std::strtol(w.c_str(), nullptr, 10);
      mlstm_l = std::strtol(l.c_str(), nullptr, 10);
      mlstm_t = std::strtol(t.c_str(), nullptr, 10);
    }
  }
  c.expect(std::fabs(rf_rank - 6.88) <= 0.2, "CMFM+RF rank off: " + std::to_string(rf_rank));
  c.expect(std::fabs(lcem_rank - 4.1) <= 0.2, "LCEM rank off: " + std::to_string(lcem_rank));
  c.expect(mlstm_w == 11 && mlstm_l == 19 && mlstm_t == 2,
           "MLSTM-FCN W/L/T " + std::to_string(mlstm_w) + "/" + std::to_string(mlstm_l) +
               "/" + std::to_string(mlstm_t) + " != 11/19/2");

  bool together = false;
  std::istringstream cdin(slurp(cd));
  while (std::getline(cdin, line)) {
    if (line.rfind("clique,", 0) != 0) continue;
    if (line.find("CMFM+RF") != std::string::npos && line.find("LCEM") != std::string::npos)
      together = true;
  }
  c.expect(together, "CMFM+RF and LCEM not in a common clique");
  return c;
}

Check criterion7_variable_stats() {
  Check c;
  // synthetic two-variable run through extract -> preprocess -> forest
  const fs::path dir = work_dir();
  const std::string train_ts = (dir / "t4_train.ts").string();
  synth::write_classification_ts(train_ts, "twovar", 30, 2, 60, 3, 77);
  MTSDataset ds = strip_padding(load_dataset_file(train_ts));
  const FeatureCatalog& cat = default_catalog();
  FeatureMatrix m = sanitize(extract_dataset(ds, cat));
  Preprocessor pre = Preprocessor::fit(m);
  FeatureMatrix pm = pre.transform(m, true);
  Model model = Model::fit(pm, R"({"type":"rf","seed":4,"n_trees":120})", 2,
                           {ds.name, ds.dims, cat.names()});

  std::vector<DatasetImportance> inputs = {dataset_importance_from_model(model)};

  // a second dataset with three variables exercises the general stats
  const std::string second_ts = (dir / "t4_second.ts").string();
  synth::write_classification_ts(second_ts, "threevar", 24, 3, 50, 2, 78);
  MTSDataset ds2 = strip_padding(load_dataset_file(second_ts));
  FeatureMatrix m2 = sanitize(extract_dataset(ds2, cat));
  Preprocessor pre2 = Preprocessor::fit(m2);
  Model model2 = Model::fit(pre2.transform(m2, true), R"({"type":"rf","seed":5,"n_trees":120})",
                            2, {ds2.name, ds2.dims, cat.names()});
  inputs.push_back(dataset_importance_from_model(model2));

  const ImportanceReport report = build_importance_report(inputs);
  for (std::size_t d = 0; d < report.datasets.size(); ++d) {
    const VariableImportance& v = report.per_variable[d];
    c.expect(std::fabs(v.max - 1.0) <= 1e-9, report.datasets[d] + ": max != 1");
    double sum = 0;
    for (double x : v.values) sum += x;
    c.expect(std::fabs(v.sum - sum) <= 1e-9, report.datasets[d] + ": sum mismatch");
    c.expect(std::fabs(v.mean - v.sum / double(v.variables)) <= 1e-9,
             report.datasets[d] + ": mean != sum/variables");
    c.expect(v.max + 1e-9 >= v.median && v.median + 1e-9 >= v.min,
             report.datasets[d] + ": max >= median >= min violated");
  }

  // the two-variable arithmetic pattern: sum = 1 + min and mean = sum/2
  const VariableImportance& two = report.per_variable[0];
  c.expect(two.variables == 2, "expected 2 variables");
  c.expect(std::fabs(two.sum - (1.0 + two.min)) <= 1e-9, "sum != 1 + min");
  c.expect(std::fabs(two.mean - two.sum / 2.0) <= 1e-9, "mean != sum/2");
  return c;
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string cli_binary() {
  const char* env = std::getenv("CMFMTS_CLI");
  return env ? env : "";
}

Check criterion8_uea_smoke() {
  Check c;
  const char* env = std::getenv("CMFMTS_UEA_DIR");
  const fs::path base = env ? fs::path(env) : fs::path("data/UEA");
  struct Case {
    const char* name;
    double floor;
  };
  bool any = false;
  for (const Case& uc : {Case{"BasicMotions", 0.85}, Case{"ERing", 0.80}}) {
    const fs::path train = base / (std::string(uc.name) + "_TRAIN.ts");
    const fs::path test = base / (std::string(uc.name) + "_TEST.ts");
    if (!fs::exists(train) || !fs::exists(test)) continue;
    any = true;
    MTSDataset train_ds = strip_padding(load_dataset_file(train.string()));
    MTSDataset test_ds = strip_padding(load_dataset_file(test.string()));
    const FeatureCatalog& cat = default_catalog();
    FeatureMatrix tm = sanitize(extract_dataset(train_ds, cat, 4));
    FeatureMatrix sm = sanitize(extract_dataset(test_ds, cat, 4));
    Preprocessor pre = Preprocessor::fit(tm);
    Model model = Model::fit(pre.transform(tm, true), R"({"type":"rf","seed":1})", 4,
                             {train_ds.name, train_ds.dims, cat.names()});
    const double acc =
        accuracy(model.predict(pre.transform(sm, false)), pre.transform(sm, false).labels());
    c.expect(acc >= uc.floor, std::string(uc.name) + " accuracy " + std::to_string(acc) +
                                  " below " + std::to_string(uc.floor));
    std::cout << "       " << uc.name << " CMFM+RF accuracy: " << acc << "\n";
  }
  if (!any) c.detail = "SKIPPED (no UEA data under " + base.string() + ")";
  return c;
}

Check criterion9_cli_determinism() {
  Check c;
  const std::string cli = cli_binary();
  if (cli.empty()) {
    c.expect(false, "CMFMTS_CLI not set");
    return c;
  }
  const fs::path dir = work_dir();
  const std::string train = (dir / "det_train.ts").string();
  const std::string test = (dir / "det_test.ts").string();
  synth::write_classification_ts(train, "det", 40, 6, 100, 4, 91);
  synth::write_classification_ts(test, "det", 40, 6, 100, 4, 92);

  auto run_once = [&](const std::string& out, int jobs) {
    const std::string cmd = cli + " run --train " + train + " --test " + test +
                            " --models rf,1nn --seed 42 --n-trees 80 --jobs " +
                            std::to_string(jobs) + " --no-timestamp --out " + out +
                            " > /dev/null 2>&1";
    return run_command(cmd);
  };
  const std::string out1 = (dir / "det1").string();
  const std::string out2 = (dir / "det2").string();
  const std::string out3 = (dir / "det3").string();
  c.expect(run_once(out1, 1) == 0, "run 1 failed");
  c.expect(run_once(out2, 1) == 0, "run 2 failed");
  c.expect(run_once(out3, 8) == 0, "run 3 failed");
  if (!c.ok) return c;

  for (const char* name : {"predictions_rf.csv", "predictions_1nn.csv", "importance_rf.csv"}) {
    const std::string a = slurp(fs::path(out1) / name);
    const std::string b = slurp(fs::path(out2) / name);
    const std::string d = slurp(fs::path(out3) / name);
    c.expect(!a.empty(), std::string(name) + " missing");
    c.expect(a == b, std::string(name) + " differs between identical runs");
    c.expect(a == d, std::string(name) + " differs between --jobs 1 and --jobs 8");
  }
  return c;
}

Check criterion10_performance_floor(double* out_seconds) {
  Check c;
  const fs::path dir = work_dir();
  const std::string train = (dir / "perf_train.ts").string();
  synth::write_classification_ts(train, "perf", 40, 6, 100, 4, 101);
  MTSDataset ds = strip_padding(load_dataset_file(train));
  const auto start = std::chrono::steady_clock::now();
  FeatureMatrix m = extract_dataset(ds, default_catalog(), 1);
  const auto stop = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(stop - start).count();
  *out_seconds = seconds;
  c.expect(m.rows() == 40 && m.cols() == 6 * 41, "unexpected matrix shape");
  c.expect(seconds < 5.0, "extraction took " + std::to_string(seconds) + " s");
  return c;
}

} // namespace

int main() {
  struct Criterion {
    int number;
    std::string name;
    double limit_seconds;
    std::function<Check()> fn;
  };

  double perf_seconds = 0;
  const std::vector<Criterion> criteria = {
      {1, "preprocessing golden fixture", 1.0, criterion1_preprocess_golden},
      {2, "feature oracle suite", 5.0, criterion2_feature_oracles},
      {3, "feature property suite (statistical)", 60.0, criterion3_statistical_suite},
      {4, "1NN oracle equivalence", 10.0, criterion4_1nn_oracle},
      {5, "forest importance sanity", 120.0, criterion5_forest_importance},
      {6, "rank reproduction from published results", 5.0, criterion6_rank_reproduction},
      {7, "per-variable statistics consistency", 120.0, criterion7_variable_stats},
      {8, "UEA smoke reproduction (optional)", 600.0, criterion8_uea_smoke},
      {9, "CLI determinism across runs and thread counts", 60.0, criterion9_cli_determinism},
      {10, "feature extraction performance floor", 10.0,
       [&] { return criterion10_performance_floor(&perf_seconds); }},
  };

  int failures = 0;
  for (const Criterion& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = cr.fn();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > cr.limit_seconds) {
      result.ok = false;
      result.detail += (result.detail.empty() ? "" : "; ") + std::string("runtime ") +
                       std::to_string(seconds) + " s over the " +
                       std::to_string(cr.limit_seconds) + " s limit";
    }
    std::printf("%s criterion %2d: %s (%.2f s)%s\n", result.ok ? "PASS" : "FAIL", cr.number,
                cr.name.c_str(), seconds,
                result.detail.empty() ? "" : (" -- " + result.detail).c_str());
    if (!result.ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
