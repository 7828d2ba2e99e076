#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cmfmts/matrix.hpp"

namespace cmfmts {

/// Class symbols are encoded to dense ids in lexicographic order, which also
/// fixes every "smallest class wins" tie rule.
class LabelEncoder {
public:
  LabelEncoder() = default;
  static LabelEncoder fit(const std::vector<std::string>& labels);
  explicit LabelEncoder(std::vector<std::string> sorted_classes);

  std::size_t size() const { return classes_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }
  int encode(const std::string& label) const; // -1 when unknown
  const std::string& decode(int id) const { return classes_[static_cast<std::size_t>(id)]; }

private:
  std::vector<std::string> classes_;
};

/// Column-major training data plus encoded labels.
struct TrainingData {
  std::vector<std::vector<double>> columns;
  std::vector<int> labels;
  std::size_t rows = 0;
  /// Throws compute_error when the matrix contains NA or a label repeats
  /// outside the encoder.
  static TrainingData from_matrix(const FeatureMatrix& m, const LabelEncoder& enc);
};

struct TreeParams {
  std::size_t min_leaf = 1;
  std::size_t max_depth = 0; // 0 = unlimited
};

struct TreeNode {
  std::int32_t col = -1; // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t label = -1;
  std::vector<double> distribution; // weighted class mass at the node
  double importance = 0.0;          // (node weight / root weight) * gini decrease
};

struct DecisionTree {
  std::vector<TreeNode> nodes; // root at 0
  int predict(const std::vector<std::vector<double>>& columns, std::size_t row) const;
  int predict_row(const double* row) const;
};

/// CART-style Gini tree. Splits are midpoints of adjacent distinct values;
/// candidates are scanned by ascending column then ascending threshold and
/// the first maximal Gini decrease wins, so the tree is a pure function of
/// its inputs.
DecisionTree fit_tree(const TrainingData& data, std::size_t n_classes,
                      const TreeParams& params);

struct ForestParams {
  std::size_t n_trees = 500;
  std::size_t mtry = 0; // 0 = floor(sqrt(p))
  std::size_t min_leaf = 1;
  std::size_t max_depth = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct ForestModel {
  ForestParams params;
  std::vector<DecisionTree> trees;
  std::vector<double> importance; // Mean Decrease Gini per column
};

/// Random forest with per-tree derived seeds; results are identical for any
/// `jobs` value.
ForestModel fit_forest(const TrainingData& data, std::size_t n_classes,
                       const ForestParams& params, unsigned jobs = 1);

struct BoostParams {
  std::size_t n_rounds = 10;
  TreeParams base;
};

struct BoostStage {
  DecisionTree tree;
  double alpha = 0.0;
  double epsilon = 0.0; // weighted training error of the stage
};

/// Multiclass weighted boosting (SAMME weighting alpha = log((1-e)/e) +
/// log(K-1)). Stops early on a perfect stage; a round with e >= 1 - 1/K is
/// discarded and stops the loop.
struct BoostedModel {
  BoostParams params;
  std::vector<BoostStage> stages;
  int fallback_label = 0; // majority class, used when no stage was retained
};

BoostedModel fit_boosted(const TrainingData& data, std::size_t n_classes,
                         const BoostParams& params);

/// 1-nearest-neighbour with per-column train min-max scaling; queries are
/// clipped to [0, 1] after scaling; distance ties go to the lowest train row.
struct NNModel {
  std::vector<double> col_min;
  std::vector<double> col_max;
  std::vector<double> rows_scaled; // row-major
  std::vector<int> labels;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

NNModel fit_1nn(const TrainingData& data);
int predict_1nn(const NNModel& model, const double* row);

int predict_tree_votes(const std::vector<DecisionTree>& trees, std::size_t n_classes,
                       const double* row);

/// Run metadata carried into model files so downstream reports know the
/// dataset geometry the model was trained on.
struct ModelMeta {
  std::string dataset;
  std::size_t dims = 0;
  std::vector<std::string> catalog;
};

/// Type-erased trained model with JSON persistence. Parameters arrive as a
/// flat JSON object: {"type":"tree"|"boosted"|"rf"|"1nn", "seed":..,
/// "n_trees":.., "mtry":.., "min_leaf":.., "max_depth":.., "bootstrap":..,
/// "n_rounds":..} — unknown keys are rejected.
class Model {
public:
  static Model fit(const FeatureMatrix& train, const std::string& params_json,
                   unsigned jobs = 1, ModelMeta meta = {});

  const std::string& type() const { return type_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const LabelEncoder& encoder() const { return encoder_; }
  const ModelMeta& meta() const { return meta_; }

  /// Throws compute_error unless m's columns equal the training columns.
  std::vector<std::string> predict(const FeatureMatrix& m) const;

  /// Per-column Mean Decrease Gini; nullopt for non-forest models.
  std::optional<std::vector<double>> importance() const;

  const ForestModel* forest() const { return std::get_if<ForestModel>(&impl_); }
  const BoostedModel* boosted() const { return std::get_if<BoostedModel>(&impl_); }
  const NNModel* nearest_neighbour() const { return std::get_if<NNModel>(&impl_); }
  const DecisionTree* tree() const;

  std::string to_json() const;
  static Model from_json(const std::string& text);
  void save(const std::string& path) const;
  static Model load(const std::string& path);

private:
  struct TreeWrapper {
    TreeParams params;
    DecisionTree tree;
  };
  std::string type_;
  std::vector<std::string> columns_;
  LabelEncoder encoder_;
  ModelMeta meta_;
  std::variant<TreeWrapper, ForestModel, BoostedModel, NNModel> impl_;
};

} // namespace cmfmts
