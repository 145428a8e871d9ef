#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "sig2d/errors.hpp"
#include "sig2d/forest.hpp"
#include "sig2d/parallel.hpp"

using namespace sig2d;

namespace {

struct Dataset {
  Matrix x;
  std::vector<std::size_t> y;
};

Dataset separable(std::size_t per_class) {
  Dataset d{Matrix(2 * per_class, 1), {}};
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    d.x(i, 0) = i < per_class ? 0.0 : 1.0;
    d.y.push_back(i < per_class ? 0 : 1);
  }
  return d;
}

// Four jittered clusters labelled by XOR of the corner bits.
Dataset xor_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d{Matrix(n, 2), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i % 2, b = (i / 2) % 2;
    d.x(i, 0) = static_cast<double>(a) + 0.4 * (uniform01(rng) - 0.5);
    d.x(i, 1) = static_cast<double>(b) + 0.4 * (uniform01(rng) - 0.5);
    d.y.push_back(a ^ b);
  }
  return d;
}

double accuracy(const ForestModel& m, const Dataset& d) {
  const auto pred = predict_batch(m, d.x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.y.size(); ++i) hits += pred.labels[i] == d.y[i];
  return static_cast<double>(hits) / static_cast<double>(d.y.size());
}

const std::vector<std::string> kTwo = {"zero", "one"};

}  // namespace

TEST_CASE("perfectly separable feature") {
  const Dataset d = separable(20);
  ForestParams p;
  p.seed = 3;
  const ForestModel m = train_forest(d.x, d.y, kTwo, p);
  CHECK(accuracy(m, d) == 1.0);
  for (const auto& tree : m.trees) {
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == 0.5);
  }
  CHECK(predict(m, std::vector{0.0}) == 0);
  CHECK(predict(m, std::vector{1.0}) == 1);

  const BatchPrediction b = predict_batch(m, Matrix(2, 1, 0.0));
  CHECK(b.labels == std::vector<std::size_t>{0, 0});
  Matrix two(2, 1);
  two(1, 0) = 1.0;
  const BatchPrediction bb = predict_batch(m, two);
  CHECK(bb.labels == std::vector<std::size_t>{0, 1});
  CHECK(bb.vote_fractions[0] == std::vector{1.0, 0.0});
  CHECK(bb.vote_fractions[1] == std::vector{0.0, 1.0});
}

TEST_CASE("constant features grow leaf-only trees and predict the majority") {
  Dataset d{Matrix(40, 3, 0.25), {}};
  for (std::size_t i = 0; i < 40; ++i) d.y.push_back(i < 30 ? 1 : 0);
  const ForestModel m = train_forest(d.x, d.y, kTwo, ForestParams{});
  for (const auto& tree : m.trees) CHECK(tree.nodes.size() == 1);
  CHECK(predict(m, std::vector{0.0, 5.0, -1.0}) == 1);
}

TEST_CASE("vote ties go to the lowest class index") {
  // Two single-leaf trees voting for different classes.
  ForestModel m;
  m.classes = {"a", "b", "c"};
  m.feature_names = {"f0"};
  DecisionTree t1, t2;
  t1.nodes.push_back({-1, 0.0, 0, 0, {0, 0, 5}});
  t2.nodes.push_back({-1, 0.0, 0, 0, {0, 4, 0}});
  m.trees = {t1, t2};
  CHECK(predict(m, std::vector{0.0}) == 1);
  // Leaf histogram ties also go low.
  DecisionTree t3;
  t3.nodes.push_back({-1, 0.0, 0, 0, {2, 2, 2}});
  CHECK(t3.predict(std::vector{0.0}) == 0);
}

TEST_CASE("XOR: single tree on the full sample, then the forest") {
  const Dataset d = xor_data(40, 17);
  ForestParams p;
  p.mtry = 2;
  std::vector<std::size_t> all(40);
  for (std::size_t i = 0; i < 40; ++i) all[i] = i;
  Rng rng(1);
  const DecisionTree single = grow_tree(d.x, d.y, 2, all, p, rng);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < 40; ++i) hits += single.predict(d.x.row(i)) == d.y[i];
  REQUIRE(hits == 40);

  ForestParams fp;
  fp.n_trees = 100;
  fp.seed = 5;
  CHECK(accuracy(train_forest(d.x, d.y, kTwo, fp), d) == 1.0);
}

TEST_CASE("held-out XOR accuracy over 100 seeded trials") {
  double total = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Dataset train = xor_data(40, 1000 + t), test = xor_data(100, 5000 + t);
    ForestParams p;
    p.seed = t;
    total += accuracy(train_forest(train.x, train.y, kTwo, p), test);
  }
  MESSAGE("mean held-out XOR accuracy " << total / 100);
  CHECK(total / 100 >= 0.9);
}

TEST_CASE("batch prediction equals repeated single calls") {
  const Dataset d = xor_data(60, 3);
  ForestParams p;
  p.n_trees = 30;
  const ForestModel m = train_forest(d.x, d.y, kTwo, p);
  Rng rng(9);
  Matrix q(50, 2);
  for (double& v : q.data) v = 1.6 * uniform01(rng) - 0.3;
  const BatchPrediction b = predict_batch(m, q);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(b.labels[i] == predict(m, q.row(i)));
    double sum = 0.0;
    for (double f : b.vote_fractions[i]) {
      CHECK(f >= 0.0);
      sum += f;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  const BatchPrediction empty = predict_batch(m, Matrix(0, 2));
  CHECK(empty.labels.empty());
  CHECK(empty.vote_fractions.empty());
}

TEST_CASE("training is deterministic across thread counts") {
  const Dataset d = xor_data(80, 21);
  ForestParams p;
  p.seed = 99;
  set_num_threads(1);
  const std::string one = forest_to_json(train_forest(d.x, d.y, kTwo, p));
  set_num_threads(4);
  const std::string four = forest_to_json(train_forest(d.x, d.y, kTwo, p));
  set_num_threads(0);
  CHECK(one == four);
  p.seed = 100;
  CHECK(forest_to_json(train_forest(d.x, d.y, kTwo, p)) != one);
}

TEST_CASE("bootstrap keeps about 63.2% unique rows") {
  Rng rng = stream(12345, 0);
  const auto rows = bootstrap_sample(1000, rng);
  const std::set<std::size_t> unique(rows.begin(), rows.end());
  const double frac = static_cast<double>(unique.size()) / 1000.0;
  CHECK(frac == doctest::Approx(0.632).epsilon(0.03 / 0.632));
}

TEST_CASE("structural limits: min_leaf, max_depth and split ties") {
  const Dataset d = xor_data(200, 8);
  ForestParams p;
  p.n_trees = 10;
  p.min_leaf = 7;
  p.max_depth = 4;
  const ForestModel m = train_forest(d.x, d.y, kTwo, p);
  for (const auto& tree : m.trees) {
    CHECK(tree.depth() <= 4);
    for (const auto& node : tree.nodes) {
      if (node.feature >= 0) {
        CHECK(node.feature < 2);
        continue;
      }
      std::uint32_t n = 0;
      for (auto c : node.counts) n += c;
      CHECK(n >= 7);
    }
  }

  // Identical columns: every split must use the lower feature index.
  Dataset dup{Matrix(40, 2), {}};
  for (std::size_t i = 0; i < 40; ++i) {
    dup.x(i, 0) = dup.x(i, 1) = static_cast<double>(i % 7);
    dup.y.push_back(i % 7 < 3 ? 0 : 1);
  }
  ForestParams q;
  q.mtry = 2;
  for (const auto& tree : train_forest(dup.x, dup.y, kTwo, q).trees) {
    for (const auto& node : tree.nodes) {
      if (node.feature >= 0) CHECK(node.feature == 0);
    }
  }
}

TEST_CASE("input errors") {
  const Dataset d = separable(5);
  CHECK_THROWS_AS(train_forest(d.x, std::vector<std::size_t>(10, 1), kTwo, {}), ParameterError);
  Matrix bad = d.x;
  bad(3, 0) = std::nan("");
  CHECK_THROWS_AS(train_forest(bad, d.y, kTwo, {}), DataError);
  CHECK_THROWS_AS(train_forest(Matrix(1, 1), std::vector<std::size_t>{0}, kTwo, {}), ParameterError);
  ForestParams p;
  p.mtry = 2;
  CHECK_THROWS_AS(train_forest(d.x, d.y, kTwo, p), ParameterError);
  CHECK_THROWS_AS(train_forest(d.x, d.y, kTwo, {}, {"a", "b"}), DataError);

  const ForestModel m = train_forest(d.x, d.y, kTwo, {});
  CHECK_THROWS_AS(predict(m, std::vector{0.0, 1.0}), DataError);
  CHECK_THROWS_AS(predict(m, std::vector<double>{NAN}), DataError);
  CHECK_THROWS_AS(predict_batch(m, Matrix(2, 3)), DataError);
}

TEST_CASE("empty feature set yields the chance baseline") {
  Dataset d{Matrix(40, 0), {}};
  for (std::size_t i = 0; i < 40; ++i) d.y.push_back(i % 4);
  const ForestModel m = train_forest(d.x, d.y, {"a", "b", "c", "d"}, {});
  const auto pred = predict_batch(m, Matrix(8, 0));
  for (std::size_t i = 1; i < 8; ++i) CHECK(pred.labels[i] == pred.labels[0]);
}

TEST_CASE("JSON round trip preserves the model and predictions") {
  const Dataset d = xor_data(60, 4);
  ForestParams p;
  p.n_trees = 20;
  p.max_depth = 6;
  p.seed = 0xFFFFFFFFFFFFFFFFULL;
  const ForestModel m = train_forest(d.x, d.y, kTwo, p, {"x", "y"});
  const std::string text = forest_to_json(m);
  const ForestModel back = forest_from_json(text);
  CHECK(forest_to_json(back) == text);
  CHECK(back.params.seed == p.seed);
  CHECK(back.params.max_depth == 6);
  CHECK(back.feature_names == std::vector<std::string>{"x", "y"});
  const auto a = predict_batch(m, d.x), b = predict_batch(back, d.x);
  CHECK(a.labels == b.labels);
  CHECK(a.vote_fractions == b.vote_fractions);
  CHECK_THROWS_AS(forest_from_json("{}"), DataError);
}
