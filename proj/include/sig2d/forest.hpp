#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sig2d/random.hpp"

namespace sig2d {

/// Dense row-major real matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;  // unlimited when empty
  std::size_t min_leaf = 1;
  std::optional<std::size_t> mtry;  // ceil(sqrt(F)) when empty
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when value <= threshold
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<std::uint32_t> counts;  // class histogram, leaves only
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> feature) const;
  /// Argmax of the leaf histogram, ties to the lowest class index.
  std::size_t predict(std::span<const double> feature) const;
  std::size_t depth() const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::vector<std::string> classes;
  std::vector<std::string> feature_names;
  ForestParams params;  // mtry resolved at train time

  std::size_t n_features() const { return feature_names.size(); }
};

struct BatchPrediction {
  std::vector<std::size_t> labels;
  std::vector<std::vector<double>> vote_fractions;  // one row per input, one column per class
};

/// Row indices of a bootstrap sample: n draws with replacement.
std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng);

/// Grows one Gini tree on the given rows (duplicates allowed). mtry features
/// are drawn without replacement at every node; the best split maximizes the
/// impurity decrease with ties going to the lowest feature index, then the
/// lowest threshold.
DecisionTree grow_tree(const Matrix& features, std::span<const std::size_t> labels,
                       std::size_t n_classes, std::span<const std::size_t> rows,
                       const ForestParams& params, Rng& rng);

/// Trains params.n_trees trees, tree t on a bootstrap sample drawn from
/// stream(params.seed, t); trees are grown in parallel. labels[i] indexes
/// into `classes`. An empty feature set is accepted and yields leaf-only
/// trees (the chance baseline). Empty feature_names defaults to f0, f1, ...
///
/// Throws ParameterError for fewer than 2 rows or a single class, DataError
/// for NaN features or inconsistent sizes.
ForestModel train_forest(const Matrix& features, std::span<const std::size_t> labels,
                         std::vector<std::string> classes, const ForestParams& params,
                         std::vector<std::string> feature_names = {});

/// Majority vote of the trees' leaf argmaxes; ties to the lowest class index.
std::size_t predict(const ForestModel& model, std::span<const double> feature);

BatchPrediction predict_batch(const ForestModel& model, const Matrix& features);

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);
void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

}  // namespace sig2d
