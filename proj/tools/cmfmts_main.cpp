// cmfmts command-line tool. All functionality goes through the C API of the
// shared library (cmfmts.h); this file only handles argument parsing, the
// run config, and output layout.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmfmts.h"

namespace {

using nlohmann::json;

[[noreturn]] void fail(cmfmts_status status, const std::string& stage) {
  std::cerr << "cmfmts: " << stage << ": " << cmfmts_last_error() << "\n";
  std::exit(static_cast<int>(status));
}

void check(cmfmts_status status, const std::string& stage) {
  if (status != CMFMTS_OK) fail(status, stage);
}

struct DatasetDeleter {
  void operator()(cmfmts_dataset* p) const { cmfmts_dataset_free(p); }
};
struct CatalogDeleter {
  void operator()(cmfmts_catalog* p) const { cmfmts_catalog_free(p); }
};
struct MatrixDeleter {
  void operator()(cmfmts_matrix* p) const { cmfmts_matrix_free(p); }
};
struct PreprocDeleter {
  void operator()(cmfmts_preproc* p) const { cmfmts_preproc_free(p); }
};
struct ModelDeleter {
  void operator()(cmfmts_model* p) const { cmfmts_model_free(p); }
};

using DatasetPtr = std::unique_ptr<cmfmts_dataset, DatasetDeleter>;
using CatalogPtr = std::unique_ptr<cmfmts_catalog, CatalogDeleter>;
using MatrixPtr = std::unique_ptr<cmfmts_matrix, MatrixDeleter>;
using PreprocPtr = std::unique_ptr<cmfmts_preproc, PreprocDeleter>;
using ModelPtr = std::unique_ptr<cmfmts_model, ModelDeleter>;

DatasetPtr load_stripped(const std::string& path, const std::string& stage) {
  cmfmts_dataset* raw = nullptr;
  check(cmfmts_dataset_load(path.c_str(), &raw), stage);
  DatasetPtr loaded(raw);
  cmfmts_dataset* stripped = nullptr;
  check(cmfmts_dataset_strip_padding(loaded.get(), &stripped), stage);
  return DatasetPtr(stripped);
}

CatalogPtr make_catalog(const std::string& selection) {
  cmfmts_catalog* raw = nullptr;
  check(cmfmts_catalog_create(selection.c_str(), &raw), "catalog");
  return CatalogPtr(raw);
}

unsigned default_jobs() {
  if (const char* env = std::getenv("CMFMTS_JOBS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "cmfmts: cannot create directory '" << dir << "': " << ec.message() << "\n";
    std::exit(static_cast<int>(CMFMTS_ERR_INPUT));
  }
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------------
// run config: flat JSON file, every key overridable by a CLI flag
// ---------------------------------------------------------------------

struct RunConfig {
  std::string train, test;
  std::string features = "all";
  std::string imputation_mode = "paper-literal";
  std::string models = "rf";
  std::uint64_t seed = 0;
  bool seed_set = false;
  long n_trees = 500, mtry = 0, min_leaf = 1, max_depth = 0, n_rounds = 10;
  bool bootstrap = true;
  std::string out_dir = "out";
  unsigned jobs = 1;
  bool no_timestamp = false;
};

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cmfmts: cannot read config '" << path << "'\n";
    std::exit(static_cast<int>(CMFMTS_ERR_INPUT));
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    std::cerr << "cmfmts: bad config JSON: " << e.what() << "\n";
    std::exit(static_cast<int>(CMFMTS_ERR_INPUT));
  }
  RunConfig c;
  try {
    c.train = j.value("train", "");
    c.test = j.value("test", "");
    c.features = j.value("features", "all");
    c.imputation_mode = j.value("imputation_mode", "paper-literal");
    c.models = j.value("models", "rf");
    if (j.contains("seed")) {
      c.seed = j["seed"].get<std::uint64_t>();
      c.seed_set = true;
    }
    c.n_trees = j.value("n_trees", 500);
    c.mtry = j.value("mtry", 0);
    c.min_leaf = j.value("min_leaf", 1);
    c.max_depth = j.value("max_depth", 0);
    c.n_rounds = j.value("n_rounds", 10);
    c.bootstrap = j.value("bootstrap", true);
    c.out_dir = j.value("out_dir", "out");
    c.jobs = j.value("jobs", 1u);
    c.no_timestamp = j.value("no_timestamp", false);
  } catch (const json::exception& e) {
    std::cerr << "cmfmts: bad config value: " << e.what() << "\n";
    std::exit(static_cast<int>(CMFMTS_ERR_INPUT));
  }
  return c;
}

std::string model_params_json(const RunConfig& c, const std::string& type) {
  json p;
  p["type"] = type;
  if (type == "rf") {
    if (!c.seed_set) {
      std::cerr << "cmfmts: rf requires --seed (or \"seed\" in the config)\n";
      std::exit(static_cast<int>(CMFMTS_ERR_INPUT));
    }
    p["seed"] = c.seed;
    p["n_trees"] = c.n_trees;
    p["mtry"] = c.mtry;
    p["bootstrap"] = c.bootstrap;
  }
  if (type == "boosted") p["n_rounds"] = c.n_rounds;
  if (type != "1nn") {
    p["min_leaf"] = c.min_leaf;
    p["max_depth"] = c.max_depth;
  }
  return p.dump();
}

MatrixPtr extract_split(const cmfmts_dataset* ds, const cmfmts_catalog* cat, unsigned jobs,
                        const std::string& out_csv, const std::string& out_log,
                        bool with_timestamp) {
  cmfmts_matrix* raw = nullptr;
  check(cmfmts_extract(ds, cat, jobs, &raw), "extract");
  MatrixPtr m(raw);
  check(cmfmts_matrix_write_csv(m.get(), out_csv.c_str()), "extract");
  check(cmfmts_matrix_na_log(m.get(), out_log.c_str(), with_timestamp ? 1 : 0), "extract");
  return m;
}

MatrixPtr sanitize(const cmfmts_matrix* m) {
  cmfmts_matrix* raw = nullptr;
  check(cmfmts_sanitize(m, &raw), "sanitize");
  return MatrixPtr(raw);
}

int cmd_run(const RunConfig& c) {
  if (c.train.empty() || c.test.empty()) {
    std::cerr << "cmfmts: run requires --train and --test\n";
    return static_cast<int>(CMFMTS_ERR_INPUT);
  }
  if (c.imputation_mode != "paper-literal" && c.imputation_mode != "train-means") {
    std::cerr << "cmfmts: imputation mode must be paper-literal or train-means\n";
    return static_cast<int>(CMFMTS_ERR_INPUT);
  }
  ensure_dir(c.out_dir);
  const std::string dir = c.out_dir + "/";

  DatasetPtr train = load_stripped(c.train, "load train");
  DatasetPtr test = load_stripped(c.test, "load test");
  CatalogPtr cat = make_catalog(c.features);

  MatrixPtr train_raw = extract_split(train.get(), cat.get(), c.jobs,
                                      dir + "train_features.csv",
                                      dir + "extract_train_log.csv", !c.no_timestamp);
  MatrixPtr test_raw = extract_split(test.get(), cat.get(), c.jobs,
                                     dir + "test_features.csv",
                                     dir + "extract_test_log.csv", !c.no_timestamp);

  MatrixPtr train_clean = sanitize(train_raw.get());
  MatrixPtr test_clean = sanitize(test_raw.get());
  cmfmts_preproc* praw = nullptr;
  check(cmfmts_preproc_fit(train_clean.get(), &praw), "preprocess");
  PreprocPtr pre(praw);
  check(cmfmts_preproc_save(pre.get(), (dir + "preprocessor.json").c_str()), "preprocess");

  const int train_means = c.imputation_mode == "train-means" ? 1 : 0;
  cmfmts_matrix* raw = nullptr;
  check(cmfmts_preproc_transform(pre.get(), train_clean.get(), 1, train_means, &raw),
        "preprocess");
  MatrixPtr train_pre(raw);
  raw = nullptr;
  check(cmfmts_preproc_transform(pre.get(), test_clean.get(), 0, train_means, &raw),
        "preprocess");
  MatrixPtr test_pre(raw);
  check(cmfmts_matrix_write_csv(train_pre.get(), (dir + "train_pre.csv").c_str()),
        "preprocess");
  check(cmfmts_matrix_write_csv(test_pre.get(), (dir + "test_pre.csv").c_str()),
        "preprocess");

  json outputs = json::array();
  for (const std::string& name :
       {"train_features.csv", "test_features.csv", "extract_train_log.csv",
        "extract_test_log.csv", "preprocessor.json", "train_pre.csv", "test_pre.csv"})
    outputs.push_back(name);

  for (const std::string& type : split_list(c.models)) {
    const std::string params = model_params_json(c, type);
    cmfmts_model* mraw = nullptr;
    check(cmfmts_model_fit(train_pre.get(), params.c_str(), c.jobs,
                           cmfmts_dataset_name(train.get()),
                           cmfmts_dataset_dims(train.get()), cat.get(), &mraw),
          "fit " + type);
    ModelPtr model(mraw);
    const std::string model_path = dir + "model_" + type + ".json";
    const std::string pred_path = dir + "predictions_" + type + ".csv";
    check(cmfmts_model_save(model.get(), model_path.c_str()), "fit " + type);
    check(cmfmts_model_predict_csv(model.get(), test_pre.get(), pred_path.c_str()),
          "predict " + type);
    double acc = 0;
    check(cmfmts_model_accuracy(model.get(), test_pre.get(), &acc), "predict " + type);
    outputs.push_back("model_" + type + ".json");
    outputs.push_back("predictions_" + type + ".csv");
    if (type == "rf") {
      const std::string imp_path = dir + "importance_" + type + ".csv";
      check(cmfmts_model_importance_csv(model.get(), imp_path.c_str()), "importance");
      outputs.push_back("importance_" + type + ".csv");
    }
    char line[128];
    std::snprintf(line, sizeof(line), "%s: accuracy %.6f", type.c_str(), acc);
    std::cout << line << "\n";
  }

  char hash[17] = {0};
  check(cmfmts_catalog_hash(cat.get(), hash, sizeof(hash)), "manifest");
  json manifest;
  manifest["tool"] = "cmfmts";
  manifest["version"] = cmfmts_version();
  manifest["catalog_hash"] = hash;
  manifest["config"] = {{"train", c.train},
                        {"test", c.test},
                        {"features", c.features},
                        {"imputation_mode", c.imputation_mode},
                        {"models", c.models},
                        {"seed", c.seed},
                        {"n_trees", c.n_trees},
                        {"mtry", c.mtry},
                        {"min_leaf", c.min_leaf},
                        {"max_depth", c.max_depth},
                        {"n_rounds", c.n_rounds},
                        {"bootstrap", c.bootstrap},
                        {"out_dir", c.out_dir},
                        {"jobs", c.jobs},
                        {"no_timestamp", c.no_timestamp}};
  manifest["outputs"] = outputs;
  std::ofstream mf(dir + "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"interpretable multivariate time-series classification"};
  app.require_subcommand(1);

  unsigned jobs = default_jobs();

  // ---- extract ----
  auto* extract = app.add_subcommand("extract", "compute feature CSVs from datasets");
  std::string ex_train, ex_test, ex_features = "all", ex_out = "out";
  bool ex_no_timestamp = false;
  extract->add_option("--train", ex_train, "train dataset (.ts or long .csv)")->required();
  extract->add_option("--test", ex_test, "test dataset (.ts or long .csv)");
  extract->add_option("--features", ex_features, "feature selection (default: all)");
  extract->add_option("--out", ex_out, "output directory");
  extract->add_option("--jobs", jobs, "worker threads (env CMFMTS_JOBS)");
  extract->add_flag("--no-timestamp", ex_no_timestamp, "omit timestamps from logs");

  // ---- preprocess ----
  auto* preprocess = app.add_subcommand("preprocess", "drop/impute feature columns");
  std::string pp_train, pp_test, pp_mode = "paper-literal", pp_out = "out";
  preprocess->add_option("--train", pp_train, "train feature CSV")->required();
  preprocess->add_option("--test", pp_test, "test feature CSV");
  preprocess->add_option("--mode", pp_mode, "paper-literal | train-means");
  preprocess->add_option("--out", pp_out, "output directory");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "train a model on a preprocessed CSV");
  std::string ft_train, ft_model = "rf", ft_out = "out", ft_dataset, ft_features = "all";
  long ft_dims = 0;
  RunConfig ft_params;
  fit->add_option("--train", ft_train, "preprocessed train CSV")->required();
  fit->add_option("--model", ft_model, "tree | boosted | rf | 1nn");
  fit->add_option("--seed", ft_params.seed, "rf seed")->each([&](const std::string&) {
    ft_params.seed_set = true;
  });
  fit->add_option("--n-trees", ft_params.n_trees, "forest size");
  fit->add_option("--mtry", ft_params.mtry, "columns per split (0 = sqrt)");
  fit->add_option("--min-leaf", ft_params.min_leaf, "minimum samples per leaf");
  fit->add_option("--max-depth", ft_params.max_depth, "depth cap (0 = unlimited)");
  fit->add_option("--n-rounds", ft_params.n_rounds, "boosting rounds");
  fit->add_flag("!--no-bootstrap", ft_params.bootstrap, "disable bootstrap sampling");
  fit->add_option("--dataset-name", ft_dataset, "dataset name stored in the model");
  fit->add_option("--dims", ft_dims, "variable count stored in the model");
  fit->add_option("--features", ft_features, "catalog stored in the model");
  fit->add_option("--out", ft_out, "output directory");
  fit->add_option("--jobs", jobs, "worker threads");

  // ---- predict ----
  auto* predict = app.add_subcommand("predict", "apply a saved model");
  std::string pd_model, pd_data, pd_out = "predictions.csv";
  predict->add_option("--model", pd_model, "model JSON")->required();
  predict->add_option("--data", pd_data, "preprocessed feature CSV")->required();
  predict->add_option("--out", pd_out, "predictions CSV");

  // ---- run ----
  auto* run = app.add_subcommand("run", "extract, preprocess, fit and score");
  std::string rn_config;
  RunConfig rn_flags;
  bool rn_has_jobs = false;
  run->add_option("--config", rn_config, "flat JSON config file");
  auto* rn_train = run->add_option("--train", rn_flags.train, "train dataset");
  auto* rn_test = run->add_option("--test", rn_flags.test, "test dataset");
  auto* rn_features = run->add_option("--features", rn_flags.features, "feature selection");
  auto* rn_mode =
      run->add_option("--imputation-mode", rn_flags.imputation_mode, "imputation mode");
  auto* rn_models = run->add_option("--models", rn_flags.models, "comma list of models");
  auto* rn_seed = run->add_option("--seed", rn_flags.seed, "seed for stochastic models");
  auto* rn_ntrees = run->add_option("--n-trees", rn_flags.n_trees, "forest size");
  auto* rn_mtry = run->add_option("--mtry", rn_flags.mtry, "columns per split");
  auto* rn_minleaf = run->add_option("--min-leaf", rn_flags.min_leaf, "min leaf size");
  auto* rn_maxdepth = run->add_option("--max-depth", rn_flags.max_depth, "depth cap");
  auto* rn_rounds = run->add_option("--n-rounds", rn_flags.n_rounds, "boosting rounds");
  auto* rn_out = run->add_option("--out", rn_flags.out_dir, "output directory");
  auto* rn_jobs = run->add_option("--jobs", jobs, "worker threads")
                      ->each([&](const std::string&) { rn_has_jobs = true; });
  auto* rn_nots = run->add_flag("--no-timestamp", rn_flags.no_timestamp,
                                "omit timestamps from logs");

  // ---- rank ----
  auto* rank = app.add_subcommand("rank", "rank methods from a results CSV");
  std::string rk_results, rk_out = "out";
  double rk_alpha = 0.05;
  rank->add_option("--results", rk_results, "long-form dataset,method,accuracy CSV")
      ->required();
  rank->add_option("--alpha", rk_alpha, "significance level (0.05 or 0.10)");
  rank->add_option("--out", rk_out, "output directory");

  // ---- importance ----
  auto* importance = app.add_subcommand("importance", "importance reports from rf models");
  std::vector<std::string> im_models;
  std::string im_out = "out";
  bool im_sample_var = false;
  importance->add_option("--models", im_models, "model JSON files (comma or repeated)")
      ->required()
      ->delimiter(',');
  importance->add_option("--out", im_out, "output directory");
  importance->add_flag("--sample-variance", im_sample_var,
                       "sample instead of population Var/SD");

  // ---- catalog ----
  auto* catalog = app.add_subcommand("catalog", "write the feature catalog reference");
  std::string ct_features = "all", ct_out = "catalog.md";
  catalog->add_option("--features", ct_features, "feature selection");
  catalog->add_option("--out", ct_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : static_cast<int>(CMFMTS_ERR_INPUT);
  }

  if (extract->parsed()) {
    ensure_dir(ex_out);
    DatasetPtr train = load_stripped(ex_train, "load train");
    CatalogPtr cat = make_catalog(ex_features);
    extract_split(train.get(), cat.get(), jobs, ex_out + "/train_features.csv",
                  ex_out + "/extract_train_log.csv", !ex_no_timestamp);
    if (!ex_test.empty()) {
      DatasetPtr test = load_stripped(ex_test, "load test");
      extract_split(test.get(), cat.get(), jobs, ex_out + "/test_features.csv",
                    ex_out + "/extract_test_log.csv", !ex_no_timestamp);
    }
    return 0;
  }

  if (preprocess->parsed()) {
    if (pp_mode != "paper-literal" && pp_mode != "train-means") {
      std::cerr << "cmfmts: imputation mode must be paper-literal or train-means\n";
      return static_cast<int>(CMFMTS_ERR_INPUT);
    }
    ensure_dir(pp_out);
    cmfmts_matrix* raw = nullptr;
    check(cmfmts_matrix_read_csv(pp_train.c_str(), &raw), "read train");
    MatrixPtr train_clean = sanitize(MatrixPtr(raw).get());
    cmfmts_preproc* praw = nullptr;
    check(cmfmts_preproc_fit(train_clean.get(), &praw), "preprocess fit");
    PreprocPtr pre(praw);
    check(cmfmts_preproc_save(pre.get(), (pp_out + "/preprocessor.json").c_str()),
          "preprocess save");
    const int tm = pp_mode == "train-means" ? 1 : 0;
    raw = nullptr;
    check(cmfmts_preproc_transform(pre.get(), train_clean.get(), 1, tm, &raw), "transform");
    MatrixPtr train_pre(raw);
    check(cmfmts_matrix_write_csv(train_pre.get(), (pp_out + "/train_pre.csv").c_str()),
          "write train");
    if (!pp_test.empty()) {
      raw = nullptr;
      check(cmfmts_matrix_read_csv(pp_test.c_str(), &raw), "read test");
      MatrixPtr test_clean = sanitize(MatrixPtr(raw).get());
      raw = nullptr;
      check(cmfmts_preproc_transform(pre.get(), test_clean.get(), 0, tm, &raw), "transform");
      MatrixPtr test_pre(raw);
      check(cmfmts_matrix_write_csv(test_pre.get(), (pp_out + "/test_pre.csv").c_str()),
            "write test");
    }
    return 0;
  }

  if (fit->parsed()) {
    ensure_dir(ft_out);
    cmfmts_matrix* raw = nullptr;
    check(cmfmts_matrix_read_csv(ft_train.c_str(), &raw), "read train");
    MatrixPtr train(raw);
    CatalogPtr cat = make_catalog(ft_features);
    const std::string params = model_params_json(ft_params, ft_model);
    cmfmts_model* mraw = nullptr;
    check(cmfmts_model_fit(train.get(), params.c_str(), jobs,
                           ft_dataset.empty() ? nullptr : ft_dataset.c_str(), ft_dims,
                           cat.get(), &mraw),
          "fit");
    ModelPtr model(mraw);
    const std::string model_path = ft_out + "/model_" + ft_model + ".json";
    check(cmfmts_model_save(model.get(), model_path.c_str()), "save model");
    if (ft_model == "rf")
      check(cmfmts_model_importance_csv(
                model.get(), (ft_out + "/importance_" + ft_model + ".csv").c_str()),
            "importance");
    std::cout << model_path << "\n";
    return 0;
  }

  if (predict->parsed()) {
    cmfmts_model* mraw = nullptr;
    check(cmfmts_model_load(pd_model.c_str(), &mraw), "load model");
    ModelPtr model(mraw);
    cmfmts_matrix* raw = nullptr;
    check(cmfmts_matrix_read_csv(pd_data.c_str(), &raw), "read data");
    MatrixPtr data(raw);
    check(cmfmts_model_predict_csv(model.get(), data.get(), pd_out.c_str()), "predict");
    double acc = 0;
    check(cmfmts_model_accuracy(model.get(), data.get(), &acc), "accuracy");
    char line[128];
    std::snprintf(line, sizeof(line), "%s: accuracy %.6f", cmfmts_model_type(model.get()),
                  acc);
    std::cout << line << "\n";
    return 0;
  }

  if (run->parsed()) {
    RunConfig cfg;
    if (!rn_config.empty()) cfg = load_config_file(rn_config);
    if (*rn_train) cfg.train = rn_flags.train;
    if (*rn_test) cfg.test = rn_flags.test;
    if (*rn_features) cfg.features = rn_flags.features;
    if (*rn_mode) cfg.imputation_mode = rn_flags.imputation_mode;
    if (*rn_models) cfg.models = rn_flags.models;
    if (*rn_seed) {
      cfg.seed = rn_flags.seed;
      cfg.seed_set = true;
    }
    if (*rn_ntrees) cfg.n_trees = rn_flags.n_trees;
    if (*rn_mtry) cfg.mtry = rn_flags.mtry;
    if (*rn_minleaf) cfg.min_leaf = rn_flags.min_leaf;
    if (*rn_maxdepth) cfg.max_depth = rn_flags.max_depth;
    if (*rn_rounds) cfg.n_rounds = rn_flags.n_rounds;
    if (*rn_out) cfg.out_dir = rn_flags.out_dir;
    if (rn_has_jobs || *rn_jobs) cfg.jobs = jobs;
    if (*rn_nots) cfg.no_timestamp = rn_flags.no_timestamp;
    return cmd_run(cfg);
  }

  if (rank->parsed()) {
    ensure_dir(rk_out);
    check(cmfmts_rank(rk_results.c_str(), rk_alpha, (rk_out + "/summary.csv").c_str(),
                      (rk_out + "/cd.csv").c_str()),
          "rank");
    return 0;
  }

  if (importance->parsed()) {
    ensure_dir(im_out);
    std::vector<const char*> paths;
    paths.reserve(im_models.size());
    for (const std::string& p : im_models) paths.push_back(p.c_str());
    check(cmfmts_importance_report(paths.data(), paths.size(), im_sample_var ? 1 : 0,
                                   im_out.c_str()),
          "importance");
    return 0;
  }

  if (catalog->parsed()) {
    CatalogPtr cat = make_catalog(ct_features);
    check(cmfmts_catalog_reference(cat.get(), ct_out.c_str()), "catalog");
    return 0;
  }

  return 0;
}
