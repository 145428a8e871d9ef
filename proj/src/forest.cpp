#include "sig2d/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sig2d/errors.hpp"
#include "sig2d/parallel.hpp"

namespace sig2d {

using nlohmann::json;

namespace {

using u128 = unsigned __int128;

// Gini score of a partition, kept as an exact fraction
// sum_c L_c^2 / nL + sum_c R_c^2 / nR = num / den.
struct Score {
  u128 num = 0;
  u128 den = 1;
};

bool greater(const Score& a, const Score& b) { return a.num * b.den > b.num * a.den; }

struct Candidate {
  int feature = -1;
  double threshold = 0.0;
  Score score;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const std::size_t> y, std::size_t n_classes,
              const ForestParams& params, std::size_t mtry, Rng& rng)
      : x_(x), y_(y), n_classes_(n_classes), params_(params), mtry_(mtry), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::uint32_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<std::uint32_t> counts(n_classes_, 0);
    for (std::size_t r : rows) ++counts[y_[r]];
    const std::size_t n = rows.size();
    const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
    const bool too_small = n < 2 * params_.min_leaf;
    const bool too_deep = params_.max_depth && depth >= *params_.max_depth;

    std::optional<Candidate> split;
    if (!pure && !too_small && !too_deep) split = best_split(rows, counts);
    if (!split) {
      tree_.nodes[id].counts = std::move(counts);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (x_(r, split->feature) <= split->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::uint32_t l = grow(std::move(left), depth + 1);
    const std::uint32_t rgt = grow(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[id];
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = l;
    node.right = rgt;
    return id;
  }

  std::vector<std::size_t> sample_features() {
    std::vector<std::size_t> all(x_.cols);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t j = 0; j < mtry_; ++j) {
      const std::size_t pick = j + uniform_index(rng_, all.size() - j);
      std::swap(all[j], all[pick]);
    }
    all.resize(mtry_);
    std::sort(all.begin(), all.end());
    return all;
  }

  std::optional<Candidate> best_split(const std::vector<std::size_t>& rows,
                                      const std::vector<std::uint32_t>& parent_counts) {
    const std::size_t n = rows.size();
    u128 parent_sq = 0;
    for (auto c : parent_counts) parent_sq += static_cast<u128>(c) * c;
    Candidate best;
    best.score = {parent_sq, n};  // must strictly beat the unsplit node

    std::vector<std::pair<double, std::size_t>> column(n);
    std::vector<std::uint64_t> left(n_classes_), right(n_classes_);
    for (std::size_t f : sample_features()) {
      for (std::size_t i = 0; i < n; ++i) column[i] = {x_(rows[i], f), y_[rows[i]]};
      std::sort(column.begin(), column.end());
      std::fill(left.begin(), left.end(), 0);
      for (std::size_t c = 0; c < n_classes_; ++c) right[c] = parent_counts[c];
      u128 left_sq = 0, right_sq = parent_sq;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t c = column[i].second;
        left_sq += 2 * left[c] + 1;
        right_sq -= 2 * right[c] - 1;
        ++left[c];
        --right[c];
        const double lo = column[i].first, hi = column[i + 1].first;
        if (lo == hi) continue;
        const std::size_t n_left = i + 1, n_right = n - n_left;
        if (n_left < params_.min_leaf || n_right < params_.min_leaf) continue;
        const Score s{left_sq * n_right + right_sq * n_left, static_cast<u128>(n_left) * n_right};
        if (greater(s, best.score)) {
          double t = std::midpoint(lo, hi);
          if (t >= hi) t = lo;
          best = {static_cast<int>(f), t, s};
        }
      }
    }
    if (best.feature < 0) return std::nullopt;
    return best;
  }

  const Matrix& x_;
  std::span<const std::size_t> y_;
  std::size_t n_classes_;
  const ForestParams& params_;
  std::size_t mtry_;
  Rng& rng_;
  DecisionTree tree_;
};

std::size_t resolve_mtry(const ForestParams& params, std::size_t n_features) {
  const std::size_t mtry =
      params.mtry ? *params.mtry
                  : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
  if (mtry > n_features) {
    throw ParameterError("mtry=" + std::to_string(mtry) + " exceeds feature count " +
                         std::to_string(n_features));
  }
  if (mtry == 0 && n_features > 0) throw ParameterError("mtry must be positive");
  return mtry;
}

std::size_t argmax(std::span<const std::uint32_t> counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return best;
}

void check_feature(const ForestModel& model, std::span<const double> feature) {
  if (feature.size() != model.n_features()) {
    throw DataError("feature vector has " + std::to_string(feature.size()) +
                    " entries, model expects " + std::to_string(model.n_features()));
  }
  for (double v : feature) {
    if (std::isnan(v)) throw DataError("NaN in feature vector");
  }
}

std::vector<std::size_t> tally(const ForestModel& model, std::span<const double> feature) {
  std::vector<std::size_t> votes(model.classes.size(), 0);
  for (const DecisionTree& tree : model.trees) ++votes[tree.predict(feature)];
  return votes;
}

json node_to_json(const DecisionTree& tree, std::uint32_t id) {
  const TreeNode& node = tree.nodes[id];
  if (node.feature < 0) return json{{"counts", node.counts}};
  return json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"left", node_to_json(tree, node.left)},
              {"right", node_to_json(tree, node.right)}};
}

std::uint32_t node_from_json(const json& j, DecisionTree& tree, std::size_t n_features,
                             std::size_t n_classes) {
  const auto id = static_cast<std::uint32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("counts")) {
    auto counts = j.at("counts").get<std::vector<std::uint32_t>>();
    if (counts.size() != n_classes) throw DataError("forest model: leaf histogram size mismatch");
    tree.nodes[id].counts = std::move(counts);
    return id;
  }
  const int feature = j.at("feature").get<int>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) {
    throw DataError("forest model: split feature out of range");
  }
  const double threshold = j.at("threshold").get<double>();
  const std::uint32_t l = node_from_json(j.at("left"), tree, n_features, n_classes);
  const std::uint32_t r = node_from_json(j.at("right"), tree, n_features, n_classes);
  TreeNode& node = tree.nodes[id];
  node.feature = feature;
  node.threshold = threshold;
  node.left = l;
  node.right = r;
  return id;
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> feature) const {
  const TreeNode* node = &nodes.front();
  while (node->feature >= 0) {
    node = &nodes[feature[node->feature] <= node->threshold ? node->left : node->right];
  }
  return *node;
}

std::size_t DecisionTree::predict(std::span<const double> feature) const {
  return argmax(leaf_for(feature).counts);
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  // Children are always appended after their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[nodes[i].left] = level[i] + 1;
      level[nodes[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng) {
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) r = uniform_index(rng, n);
  return rows;
}

DecisionTree grow_tree(const Matrix& features, std::span<const std::size_t> labels,
                       std::size_t n_classes, std::span<const std::size_t> rows,
                       const ForestParams& params, Rng& rng) {
  if (params.min_leaf < 1) throw ParameterError("min_leaf must be positive");
  const std::size_t mtry = resolve_mtry(params, features.cols);
  TreeBuilder builder(features, labels, n_classes, params, mtry, rng);
  return builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
}

ForestModel train_forest(const Matrix& features, std::span<const std::size_t> labels,
                         std::vector<std::string> classes, const ForestParams& params,
                         std::vector<std::string> feature_names) {
  if (features.rows < 2) throw ParameterError("train_forest needs at least 2 rows");
  if (labels.size() != features.rows) throw DataError("label count does not match feature rows");
  if (params.n_trees < 1) throw ParameterError("n_trees must be positive");
  if (params.min_leaf < 1) throw ParameterError("min_leaf must be positive");
  if (params.max_depth && *params.max_depth < 1) throw ParameterError("max_depth must be positive");
  for (double v : features.data) {
    if (std::isnan(v)) throw DataError("NaN in training features");
  }
  std::vector<bool> seen(classes.size(), false);
  std::size_t distinct = 0;
  for (std::size_t y : labels) {
    if (y >= classes.size()) throw DataError("label index out of range");
    if (!seen[y]) ++distinct;
    seen[y] = true;
  }
  if (distinct < 2) throw ParameterError("training data contains a single class");
  if (feature_names.empty()) {
    for (std::size_t j = 0; j < features.cols; ++j) feature_names.push_back("f" + std::to_string(j));
  }
  if (feature_names.size() != features.cols) {
    throw DataError("feature_names length does not match feature columns");
  }

  ForestModel model;
  model.classes = std::move(classes);
  model.feature_names = std::move(feature_names);
  model.params = params;
  model.params.mtry = resolve_mtry(params, features.cols);
  model.trees.resize(params.n_trees);
  parallel_for(params.n_trees, [&](std::size_t t) {
    Rng rng = stream(params.seed, t);
    const auto rows = bootstrap_sample(features.rows, rng);
    TreeBuilder builder(features, labels, model.classes.size(), model.params, *model.params.mtry,
                        rng);
    model.trees[t] = builder.build(rows);
  });
  return model;
}

std::size_t predict(const ForestModel& model, std::span<const double> feature) {
  check_feature(model, feature);
  const auto votes = tally(model, feature);
  return static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

BatchPrediction predict_batch(const ForestModel& model, const Matrix& features) {
  BatchPrediction out;
  if (features.rows == 0) return out;
  if (features.cols != model.n_features()) {
    throw DataError("batch has " + std::to_string(features.cols) + " columns, model expects " +
                    std::to_string(model.n_features()));
  }
  out.labels.resize(features.rows);
  out.vote_fractions.resize(features.rows);
  const double n_trees = static_cast<double>(model.trees.size());
  for (std::size_t i = 0; i < features.rows; ++i) {
    const auto row = features.row(i);
    check_feature(model, row);
    const auto votes = tally(model, row);
    out.labels[i] =
        static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    auto& frac = out.vote_fractions[i];
    frac.resize(votes.size());
    for (std::size_t c = 0; c < votes.size(); ++c) frac[c] = static_cast<double>(votes[c]) / n_trees;
  }
  return out;
}

std::string forest_to_json(const ForestModel& model) {
  json params{{"n_trees", model.params.n_trees},
              {"max_depth", nullptr},
              {"min_leaf", model.params.min_leaf},
              {"mtry", model.params.mtry.value_or(0)},
              {"seed", model.params.seed}};
  if (model.params.max_depth) params["max_depth"] = *model.params.max_depth;
  json trees = json::array();
  for (const auto& tree : model.trees) trees.push_back(node_to_json(tree, 0));
  json j{{"classes", model.classes},
         {"feature_names", model.feature_names},
         {"params", params},
         {"trees", trees}};
  return j.dump();
}

ForestModel forest_from_json(const std::string& text) {
  ForestModel model;
  try {
    const json j = json::parse(text);
    model.classes = j.at("classes").get<std::vector<std::string>>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const json& p = j.at("params");
    model.params.n_trees = p.at("n_trees").get<std::size_t>();
    if (!p.at("max_depth").is_null()) model.params.max_depth = p.at("max_depth").get<std::size_t>();
    model.params.min_leaf = p.at("min_leaf").get<std::size_t>();
    model.params.mtry = p.at("mtry").get<std::size_t>();
    model.params.seed = p.at("seed").get<std::uint64_t>();
    for (const json& t : j.at("trees")) {
      DecisionTree tree;
      node_from_json(t, tree, model.feature_names.size(), model.classes.size());
      model.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed forest model: ") + e.what());
  }
  if (model.trees.size() != model.params.n_trees) throw DataError("forest model: tree count mismatch");
  return model;
}

void save_forest(const ForestModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << forest_to_json(model) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

ForestModel load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return forest_from_json(buf.str());
}

}  // namespace sig2d
