#include "cmfmts/classifiers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cmfmts/errors.hpp"
#include "cmfmts/rng.hpp"

namespace cmfmts {

using nlohmann::json;

LabelEncoder::LabelEncoder(std::vector<std::string> sorted_classes)
    : classes_(std::move(sorted_classes)) {}

LabelEncoder LabelEncoder::fit(const std::vector<std::string>& labels) {
  std::set<std::string> uniq(labels.begin(), labels.end());
  return LabelEncoder(std::vector<std::string>(uniq.begin(), uniq.end()));
}

int LabelEncoder::encode(const std::string& label) const {
  auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
  if (it == classes_.end() || *it != label) return -1;
  return static_cast<int>(it - classes_.begin());
}

TrainingData TrainingData::from_matrix(const FeatureMatrix& m, const LabelEncoder& enc) {
  TrainingData d;
  d.rows = m.rows();
  d.columns.assign(m.cols(), std::vector<double>(m.rows()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m.at(r, c);
      if (std::isnan(v))
        throw compute_error("matrix contains NA in column '" + m.column_names()[c] +
                            "'; preprocess before fitting");
      d.columns[c][r] = v;
    }
  }
  d.labels.reserve(m.rows());
  for (const std::string& lab : m.labels()) {
    const int id = enc.encode(lab);
    if (id < 0) throw compute_error("label '" + lab + "' missing from encoder");
    d.labels.push_back(id);
  }
  return d;
}

// ---------------------------------------------------------------------------
// decision tree
// ---------------------------------------------------------------------------

namespace {

struct TreeBuilder {
  const TrainingData& data;
  std::size_t n_classes;
  TreeParams params;
  // sample row indices with multiplicity (bootstrap), plus per-row weights
  std::vector<std::size_t> rows;
  std::vector<double> weights; // aligned with rows
  double root_weight = 0;
  // columns considered at each split; when rng is set, a fresh mtry sample
  std::size_t mtry = 0;
  Rng* rng = nullptr;
  std::vector<TreeNode> nodes;

  int build(std::vector<std::size_t> idx, std::size_t depth) {
    const std::size_t node_id = nodes.size();
    nodes.emplace_back();

    std::vector<double> class_w(n_classes, 0.0);
    double total_w = 0;
    for (std::size_t k : idx) {
      class_w[static_cast<std::size_t>(data.labels[rows[k]])] += weights[k];
      total_w += weights[k];
    }
    int majority = 0;
    for (std::size_t c = 1; c < n_classes; ++c)
      if (class_w[c] > class_w[static_cast<std::size_t>(majority)])
        majority = static_cast<int>(c);

    const double gini_parent = gini(class_w, total_w);
    const bool pure = class_w[static_cast<std::size_t>(majority)] == total_w;
    const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;

    std::int32_t best_col = -1;
    double best_thr = 0, best_decrease = 0;
    if (!pure && !depth_capped && idx.size() >= 2 * params.min_leaf) {
      std::vector<std::size_t> candidates = candidate_columns();
      std::vector<std::pair<double, std::size_t>> order(idx.size());
      std::vector<double> left_w(n_classes);
      for (std::size_t col : candidates) {
        const std::vector<double>& values = data.columns[col];
        for (std::size_t k = 0; k < idx.size(); ++k)
          order[k] = {values[rows[idx[k]]], idx[k]};
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::fill(left_w.begin(), left_w.end(), 0.0);
        double wl = 0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
          const std::size_t sample = order[k].second;
          left_w[static_cast<std::size_t>(data.labels[rows[sample]])] += weights[sample];
          wl += weights[sample];
          if (order[k].first == order[k + 1].first) continue;
          if (k + 1 < params.min_leaf || order.size() - k - 1 < params.min_leaf) continue;
          double gl = 0, gr = 0;
          for (std::size_t c = 0; c < n_classes; ++c) {
            const double l = left_w[c];
            const double r = class_w[c] - l;
            gl += l * l;
            gr += r * r;
          }
          const double wr = total_w - wl;
          // weighted gini decrease, expanded to avoid per-class division
          const double decrease =
              gini_parent - (wl - gl / wl) / total_w - (wr - gr / wr) / total_w;
          if (decrease > best_decrease) {
            best_decrease = decrease;
            best_col = static_cast<std::int32_t>(col);
            best_thr = 0.5 * (order[k].first + order[k + 1].first);
          }
        }
      }
    }

    if (best_col < 0) {
      TreeNode& leaf = nodes[node_id];
      leaf.col = -1;
      leaf.label = majority;
      leaf.distribution = std::move(class_w);
      return static_cast<int>(node_id);
    }

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t k : idx) {
      if (data.columns[static_cast<std::size_t>(best_col)][rows[k]] <= best_thr)
        left_idx.push_back(k);
      else
        right_idx.push_back(k);
    }
    idx.clear();
    idx.shrink_to_fit();

    const int left = build(std::move(left_idx), depth + 1);
    const int right = build(std::move(right_idx), depth + 1);
    TreeNode& node = nodes[node_id];
    node.col = best_col;
    node.threshold = best_thr;
    node.left = left;
    node.right = right;
    node.label = majority;
    node.importance = (total_w / root_weight) * best_decrease;
    return static_cast<int>(node_id);
  }

  static double gini(const std::vector<double>& class_w, double total) {
    double s = 0;
    for (double w : class_w) s += w * w;
    return 1.0 - s / (total * total);
  }

  std::vector<std::size_t> candidate_columns() {
    const std::size_t p = data.columns.size();
    if (!rng || mtry >= p) {
      std::vector<std::size_t> all(p);
      for (std::size_t i = 0; i < p; ++i) all[i] = i;
      return all;
    }
    // partial Fisher-Yates over column indices, then ascending order
    std::vector<std::size_t> pool(p);
    for (std::size_t i = 0; i < p; ++i) pool[i] = i;
    for (std::size_t i = 0; i < mtry; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng->bounded(p - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(mtry);
    std::sort(pool.begin(), pool.end());
    return pool;
  }
};

DecisionTree fit_tree_weighted(const TrainingData& data, std::size_t n_classes,
                               const TreeParams& params,
                               const std::vector<std::size_t>& rows,
                               const std::vector<double>& weights, std::size_t mtry,
                               Rng* rng) {
  if (rows.empty()) throw compute_error("cannot fit a tree on zero rows");
  TreeBuilder b{data, n_classes, params, rows, weights};
  b.mtry = mtry;
  b.rng = rng;
  for (double w : weights) b.root_weight += w;
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  b.build(std::move(idx), 0);
  DecisionTree t;
  t.nodes = std::move(b.nodes);
  return t;
}

} // namespace

int DecisionTree::predict(const std::vector<std::vector<double>>& columns,
                          std::size_t row) const {
  std::size_t at = 0;
  while (nodes[at].col >= 0) {
    const TreeNode& n = nodes[at];
    at = columns[static_cast<std::size_t>(n.col)][row] <= n.threshold
             ? static_cast<std::size_t>(n.left)
             : static_cast<std::size_t>(n.right);
  }
  return nodes[at].label;
}

int DecisionTree::predict_row(const double* row) const {
  std::size_t at = 0;
  while (nodes[at].col >= 0) {
    const TreeNode& n = nodes[at];
    at = row[n.col] <= n.threshold ? static_cast<std::size_t>(n.left)
                                   : static_cast<std::size_t>(n.right);
  }
  return nodes[at].label;
}

DecisionTree fit_tree(const TrainingData& data, std::size_t n_classes,
                      const TreeParams& params) {
  std::vector<std::size_t> rows(data.rows);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<double> weights(data.rows, 1.0);
  return fit_tree_weighted(data, n_classes, params, rows, weights, 0, nullptr);
}

// ---------------------------------------------------------------------------
// random forest
// ---------------------------------------------------------------------------

ForestModel fit_forest(const TrainingData& data, std::size_t n_classes,
                       const ForestParams& params, unsigned jobs) {
  if (data.rows == 0) throw compute_error("cannot fit a forest on zero rows");
  const std::size_t p = data.columns.size();
  ForestParams effective = params;
  if (effective.mtry == 0)
    effective.mtry = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));

  ForestModel model;
  model.params = effective;
  model.trees.resize(effective.n_trees);

  auto train_one = [&](std::size_t i) {
    Rng rng(Rng::derive(effective.seed, i));
    std::vector<std::size_t> rows;
    rows.reserve(data.rows);
    if (effective.bootstrap) {
      for (std::size_t k = 0; k < data.rows; ++k)
        rows.push_back(static_cast<std::size_t>(rng.bounded(data.rows)));
    } else {
      for (std::size_t k = 0; k < data.rows; ++k) rows.push_back(k);
    }
    std::vector<double> weights(rows.size(), 1.0);
    TreeParams tp{effective.min_leaf, effective.max_depth};
    model.trees[i] =
        fit_tree_weighted(data, n_classes, tp, rows, weights, effective.mtry, &rng);
  };

  if (jobs <= 1 || effective.n_trees < 2) {
    for (std::size_t i = 0; i < effective.n_trees; ++i) train_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto runner = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= effective.n_trees) return;
        try {
          train_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    const unsigned count = std::min<std::size_t>(jobs, effective.n_trees);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(runner);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  // sum per-node contributions tree by tree, in index order, so the result
  // is independent of the training schedule
  model.importance.assign(p, 0.0);
  for (const DecisionTree& t : model.trees)
    for (const TreeNode& n : t.nodes)
      if (n.col >= 0) model.importance[static_cast<std::size_t>(n.col)] += n.importance;
  for (double& v : model.importance) v /= static_cast<double>(effective.n_trees);
  return model;
}

int predict_tree_votes(const std::vector<DecisionTree>& trees, std::size_t n_classes,
                       const double* row) {
  std::vector<std::size_t> votes(n_classes, 0);
  for (const DecisionTree& t : trees) ++votes[static_cast<std::size_t>(t.predict_row(row))];
  std::size_t best = 0;
  for (std::size_t c = 1; c < n_classes; ++c)
    if (votes[c] > votes[best]) best = c;
  return static_cast<int>(best);
}

// ---------------------------------------------------------------------------
// boosting
// ---------------------------------------------------------------------------

BoostedModel fit_boosted(const TrainingData& data, std::size_t n_classes,
                         const BoostParams& params) {
  if (data.rows == 0) throw compute_error("cannot fit on zero rows");
  const double k = static_cast<double>(std::max<std::size_t>(n_classes, 2));
  BoostedModel model;
  model.params = params;

  std::vector<std::size_t> rows(data.rows);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<double> w(data.rows, 1.0 / static_cast<double>(data.rows));

  std::vector<std::size_t> class_count(n_classes, 0);
  for (int y : data.labels) ++class_count[static_cast<std::size_t>(y)];
  model.fallback_label = static_cast<int>(
      std::max_element(class_count.begin(), class_count.end()) - class_count.begin());

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    DecisionTree tree =
        fit_tree_weighted(data, n_classes, params.base, rows, w, 0, nullptr);
    double eps = 0;
    std::vector<bool> wrong(data.rows);
    for (std::size_t i = 0; i < data.rows; ++i) {
      wrong[i] = tree.predict(data.columns, i) != data.labels[i];
      if (wrong[i]) eps += w[i];
    }
    if (eps >= 1.0 - 1.0 / k) break; // no better than chance: discard and stop
    const double floored = std::max(eps, 1e-12);
    const double alpha = std::log((1.0 - floored) / floored) + std::log(k - 1.0);
    model.stages.push_back({std::move(tree), alpha, eps});
    if (eps == 0.0) break;
    double total = 0;
    for (std::size_t i = 0; i < data.rows; ++i) {
      if (wrong[i]) w[i] *= std::exp(alpha);
      total += w[i];
    }
    for (double& wi : w) wi /= total;
  }
  return model;
}

namespace {

int predict_boosted_row(const BoostedModel& model, std::size_t n_classes,
                        const double* row) {
  if (model.stages.empty()) return model.fallback_label;
  std::vector<double> score(n_classes, 0.0);
  for (const BoostStage& s : model.stages)
    score[static_cast<std::size_t>(s.tree.predict_row(row))] += s.alpha;
  std::size_t best = 0;
  for (std::size_t c = 1; c < n_classes; ++c)
    if (score[c] > score[best]) best = c;
  return static_cast<int>(best);
}

} // namespace

// ---------------------------------------------------------------------------
// 1-nearest neighbour
// ---------------------------------------------------------------------------

NNModel fit_1nn(const TrainingData& data) {
  if (data.rows == 0) throw compute_error("cannot fit 1nn on zero rows");
  NNModel m;
  m.rows = data.rows;
  m.cols = data.columns.size();
  m.labels = data.labels;
  m.col_min.resize(m.cols);
  m.col_max.resize(m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    const auto [mn, mx] = std::minmax_element(data.columns[c].begin(), data.columns[c].end());
    m.col_min[c] = *mn;
    m.col_max[c] = *mx;
  }
  m.rows_scaled.resize(m.rows * m.cols);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) {
      const double range = m.col_max[c] - m.col_min[c];
      m.rows_scaled[r * m.cols + c] =
          range > 0 ? (data.columns[c][r] - m.col_min[c]) / range : 0.0;
    }
  return m;
}

int predict_1nn(const NNModel& model, const double* row) {
  std::vector<double> q(model.cols);
  for (std::size_t c = 0; c < model.cols; ++c) {
    const double range = model.col_max[c] - model.col_min[c];
    const double v = range > 0 ? (row[c] - model.col_min[c]) / range : 0.0;
    q[c] = std::clamp(v, 0.0, 1.0);
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < model.rows; ++r) {
    double d = 0;
    for (std::size_t c = 0; c < model.cols; ++c) {
      const double diff = model.rows_scaled[r * model.cols + c] - q[c];
      d += diff * diff;
    }
    if (d < best_d) { // strict: the earliest row wins ties
      best_d = d;
      best = r;
    }
  }
  return model.labels[best];
}

// ---------------------------------------------------------------------------
// type-erased model + JSON persistence
// ---------------------------------------------------------------------------

namespace {

json tree_to_json(const DecisionTree& t) {
  json nodes = json::array();
  for (const TreeNode& n : t.nodes) {
    json jn;
    jn["col"] = n.col;
    if (n.col >= 0) {
      jn["thr"] = n.threshold;
      jn["left"] = n.left;
      jn["right"] = n.right;
      jn["imp"] = n.importance;
    }
    jn["label"] = n.label;
    if (n.col < 0) jn["dist"] = n.distribution;
    nodes.push_back(std::move(jn));
  }
  return json{{"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree t;
  for (const json& jn : j.at("nodes")) {
    TreeNode n;
    n.col = jn.at("col").get<std::int32_t>();
    n.label = jn.at("label").get<std::int32_t>();
    if (n.col >= 0) {
      n.threshold = jn.at("thr").get<double>();
      n.left = jn.at("left").get<std::int32_t>();
      n.right = jn.at("right").get<std::int32_t>();
      n.importance = jn.at("imp").get<double>();
    } else if (jn.contains("dist")) {
      n.distribution = jn["dist"].get<std::vector<double>>();
    }
    t.nodes.push_back(std::move(n));
  }
  if (t.nodes.empty()) throw input_error("model tree has no nodes");
  return t;
}

struct ParsedParams {
  std::string type;
  TreeParams tree;
  ForestParams forest;
  BoostParams boost;
};

ParsedParams parse_params_checked(const json& j);

ParsedParams parse_params(const std::string& params_json) {
  json j;
  try {
    j = json::parse(params_json);
  } catch (const json::parse_error& e) {
    throw input_error(std::string("bad model params JSON: ") + e.what());
  }
  try {
    return parse_params_checked(j);
  } catch (const json::exception& e) {
    throw input_error(std::string("bad model params: ") + e.what());
  }
}

ParsedParams parse_params_checked(const json& j) {
  ParsedParams p;
  static const std::set<std::string> known = {"type",     "seed",     "n_trees",
                                              "mtry",     "min_leaf", "max_depth",
                                              "bootstrap", "n_rounds"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw input_error("unknown model parameter '" + key + "'");
  p.type = j.at("type").get<std::string>();
  if (p.type != "tree" && p.type != "boosted" && p.type != "rf" && p.type != "1nn")
    throw input_error("unknown model type '" + p.type + "'");
  const auto min_leaf = j.value("min_leaf", 1);
  const auto max_depth = j.value("max_depth", 0);
  if (min_leaf < 1) throw input_error("min_leaf must be >= 1");
  if (max_depth < 0) throw input_error("max_depth must be >= 0");
  p.tree = {static_cast<std::size_t>(min_leaf), static_cast<std::size_t>(max_depth)};
  p.forest.min_leaf = p.tree.min_leaf;
  p.forest.max_depth = p.tree.max_depth;
  p.forest.n_trees = static_cast<std::size_t>(j.value("n_trees", 500));
  p.forest.mtry = static_cast<std::size_t>(j.value("mtry", 0));
  p.forest.bootstrap = j.value("bootstrap", true);
  p.forest.seed = j.value("seed", std::uint64_t{0});
  if (p.type == "rf" && !j.contains("seed"))
    throw input_error("rf requires an explicit seed");
  if (p.forest.n_trees < 1) throw input_error("n_trees must be >= 1");
  p.boost.base = p.tree;
  p.boost.n_rounds = static_cast<std::size_t>(j.value("n_rounds", 10));
  if (p.boost.n_rounds < 1) throw input_error("n_rounds must be >= 1");
  return p;
}

} // namespace

const DecisionTree* Model::tree() const {
  if (const TreeWrapper* w = std::get_if<TreeWrapper>(&impl_)) return &w->tree;
  return nullptr;
}

Model Model::fit(const FeatureMatrix& train, const std::string& params_json, unsigned jobs,
                 ModelMeta meta) {
  ParsedParams p = parse_params(params_json);
  Model m;
  m.type_ = p.type;
  m.columns_ = train.column_names();
  m.encoder_ = LabelEncoder::fit(train.labels());
  m.meta_ = std::move(meta);
  TrainingData data = TrainingData::from_matrix(train, m.encoder_);
  const std::size_t k = m.encoder_.size();
  if (p.type == "tree") {
    m.impl_ = TreeWrapper{p.tree, fit_tree(data, k, p.tree)};
  } else if (p.type == "rf") {
    m.impl_ = fit_forest(data, k, p.forest, jobs);
  } else if (p.type == "boosted") {
    m.impl_ = fit_boosted(data, k, p.boost);
  } else {
    m.impl_ = fit_1nn(data);
  }
  return m;
}

std::vector<std::string> Model::predict(const FeatureMatrix& m) const {
  if (m.column_names() != columns_)
    throw compute_error("matrix columns do not match the model's training columns");
  std::vector<std::string> out;
  out.reserve(m.rows());
  std::vector<double> row(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row[c] = m.at(r, c);
      if (std::isnan(row[c]))
        throw compute_error("prediction matrix contains NA; preprocess first");
    }
    int id = 0;
    if (const TreeWrapper* w = std::get_if<TreeWrapper>(&impl_)) {
      id = w->tree.predict_row(row.data());
    } else if (const ForestModel* f = std::get_if<ForestModel>(&impl_)) {
      id = predict_tree_votes(f->trees, encoder_.size(), row.data());
    } else if (const BoostedModel* b = std::get_if<BoostedModel>(&impl_)) {
      id = predict_boosted_row(*b, encoder_.size(), row.data());
    } else {
      id = predict_1nn(std::get<NNModel>(impl_), row.data());
    }
    out.push_back(encoder_.decode(id));
  }
  return out;
}

std::optional<std::vector<double>> Model::importance() const {
  if (const ForestModel* f = std::get_if<ForestModel>(&impl_)) return f->importance;
  return std::nullopt;
}

std::string Model::to_json() const {
  json j;
  j["version"] = 1;
  j["type"] = type_;
  j["columns"] = columns_;
  j["classes"] = encoder_.classes();
  j["meta"] = {{"dataset", meta_.dataset}, {"dims", meta_.dims}, {"catalog", meta_.catalog}};
  if (const TreeWrapper* w = std::get_if<TreeWrapper>(&impl_)) {
    j["hyperparams"] = {{"min_leaf", w->params.min_leaf}, {"max_depth", w->params.max_depth}};
    j["tree"] = tree_to_json(w->tree);
  } else if (const ForestModel* f = std::get_if<ForestModel>(&impl_)) {
    j["hyperparams"] = {{"n_trees", f->params.n_trees},   {"mtry", f->params.mtry},
                        {"min_leaf", f->params.min_leaf}, {"max_depth", f->params.max_depth},
                        {"bootstrap", f->params.bootstrap}};
    j["seed"] = f->params.seed;
    j["importance"] = f->importance;
    json trees = json::array();
    for (const DecisionTree& t : f->trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
  } else if (const BoostedModel* b = std::get_if<BoostedModel>(&impl_)) {
    j["hyperparams"] = {{"n_rounds", b->params.n_rounds},
                        {"min_leaf", b->params.base.min_leaf},
                        {"max_depth", b->params.base.max_depth}};
    j["fallback_label"] = b->fallback_label;
    json stages = json::array();
    for (const BoostStage& s : b->stages)
      stages.push_back(
          {{"alpha", s.alpha}, {"epsilon", s.epsilon}, {"tree", tree_to_json(s.tree)}});
    j["stages"] = std::move(stages);
  } else {
    const NNModel& nn = std::get<NNModel>(impl_);
    j["scaler_min"] = nn.col_min;
    j["scaler_max"] = nn.col_max;
    j["train_labels"] = nn.labels;
    json rows = json::array();
    for (std::size_t r = 0; r < nn.rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < nn.cols; ++c) row.push_back(nn.rows_scaled[r * nn.cols + c]);
      rows.push_back(std::move(row));
    }
    j["train_rows"] = std::move(rows);
  }
  return j.dump(2) + "\n";
}

Model Model::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw input_error(std::string("bad model JSON: ") + e.what());
  }
  if (j.value("version", 0) != 1) throw input_error("unsupported model version");
  Model m;
  m.type_ = j.at("type").get<std::string>();
  m.columns_ = j.at("columns").get<std::vector<std::string>>();
  m.encoder_ = LabelEncoder(j.at("classes").get<std::vector<std::string>>());
  if (j.contains("meta")) {
    m.meta_.dataset = j["meta"].value("dataset", "");
    m.meta_.dims = j["meta"].value("dims", std::size_t{0});
    if (j["meta"].contains("catalog"))
      m.meta_.catalog = j["meta"]["catalog"].get<std::vector<std::string>>();
  }
  const json& hp = j.value("hyperparams", json::object());
  if (m.type_ == "tree") {
    TreeWrapper w;
    w.params = {hp.value("min_leaf", std::size_t{1}), hp.value("max_depth", std::size_t{0})};
    w.tree = tree_from_json(j.at("tree"));
    m.impl_ = std::move(w);
  } else if (m.type_ == "rf") {
    ForestModel f;
    f.params.n_trees = hp.value("n_trees", std::size_t{500});
    f.params.mtry = hp.value("mtry", std::size_t{0});
    f.params.min_leaf = hp.value("min_leaf", std::size_t{1});
    f.params.max_depth = hp.value("max_depth", std::size_t{0});
    f.params.bootstrap = hp.value("bootstrap", true);
    f.params.seed = j.value("seed", std::uint64_t{0});
    f.importance = j.at("importance").get<std::vector<double>>();
    for (const json& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
    m.impl_ = std::move(f);
  } else if (m.type_ == "boosted") {
    BoostedModel b;
    b.params.n_rounds = hp.value("n_rounds", std::size_t{10});
    b.params.base = {hp.value("min_leaf", std::size_t{1}),
                     hp.value("max_depth", std::size_t{0})};
    b.fallback_label = j.value("fallback_label", 0);
    for (const json& s : j.at("stages"))
      b.stages.push_back({tree_from_json(s.at("tree")), s.at("alpha").get<double>(),
                          s.at("epsilon").get<double>()});
    m.impl_ = std::move(b);
  } else if (m.type_ == "1nn") {
    NNModel nn;
    nn.col_min = j.at("scaler_min").get<std::vector<double>>();
    nn.col_max = j.at("scaler_max").get<std::vector<double>>();
    nn.labels = j.at("train_labels").get<std::vector<int>>();
    nn.cols = nn.col_min.size();
    for (const json& row : j.at("train_rows")) {
      for (const json& cell : row) nn.rows_scaled.push_back(cell.get<double>());
      ++nn.rows;
    }
    if (nn.rows_scaled.size() != nn.rows * nn.cols)
      throw input_error("1nn model rows are ragged");
    m.impl_ = std::move(nn);
  } else {
    throw input_error("unknown model type '" + m.type_ + "'");
  }
  return m;
}

void Model::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << to_json();
}

Model Model::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

} // namespace cmfmts
