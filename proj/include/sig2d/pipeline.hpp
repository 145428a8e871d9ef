#pragma once

// End-to-end texture classification: feature extraction over a manifest,
// forest training and evaluation, accuracy sweeps and the fast-vs-oracle
// benchmark. The CLI is a thin layer over these functions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sig2d/dataset.hpp"
#include "sig2d/forest.hpp"
#include "sig2d/pca.hpp"
#include "sig2d/sigcore.hpp"

namespace sig2d {

struct FeatureRow {
  std::size_t manifest_index = 0;
  std::string label;
  Split split = Split::Train;
  std::vector<double> values;

  bool operator==(const FeatureRow&) const = default;
};

/// The feature-name header is the contract between extract, train and eval.
struct FeatureTable {
  std::vector<std::string> header;
  std::vector<FeatureRow> rows;

  bool operator==(const FeatureTable&) const = default;
};

/// Columns are "index,class,split,<header...>"; values use 17 significant
/// digits so a write/read cycle is exact.
std::string feature_table_to_csv(const FeatureTable& table);
FeatureTable feature_table_from_csv(const std::string& text);
void save_feature_table(const FeatureTable& table, const std::string& path);
FeatureTable load_feature_table(const std::string& path);

struct RunConfig {
  DifferenceScheme scheme = DifferenceScheme::Forward;
  bool signatures = true;          // the 12 diagonal second-order entries
  bool symmetrize = true;          // average over the 8 orientations
  bool include_first_order = false;
  bool cross_channels = false;     // off-diagonal (i1 != i2) second-order entries
  std::size_t n_pcs = 0;
  bool baseline = false;           // permit an empty feature set
};

/// Throws ParameterError when the configuration selects no features and
/// baseline mode is off.
void validate(const RunConfig& config);

/// JSON record of an extraction setup, including the difference scheme.
std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);

/// Column names in extraction order: second-order diagonal, cross-channel,
/// first-order, then pca.1 .. pca.N. Signature names look like
/// "sig2.hathat.ch0.sym" (".sym" only when symmetrized).
std::vector<std::string> feature_names(const RunConfig& config, std::size_t channels = 3);

/// Signature part of the feature vector for one patch.
std::vector<double> signature_features(const ImageField& patch, const RunConfig& config);

struct Extraction {
  FeatureTable table;
  std::optional<PcaModel> pca;  // fit on train rows only
};

/// One row per manifest entry, in manifest order. Patches are processed in
/// parallel; output does not depend on the thread count.
Extraction extract_features(const DatasetManifest& manifest, std::span<const ImageField> sheets,
                            const RunConfig& config);

struct LabeledData {
  Matrix features;
  std::vector<std::size_t> labels;
  std::vector<std::string> classes;
};

/// Rows of the given split. Classes are taken from `classes` when given,
/// otherwise in order of first appearance; unknown labels raise DataError.
LabeledData select_rows(const FeatureTable& table, Split split,
                        const std::vector<std::string>& classes = {});

struct TrainReport {
  ForestModel model;
  double train_accuracy = 0.0;
};

TrainReport train_on_table(const FeatureTable& table, const ForestParams& params);

struct EvalReport {
  double accuracy = 0.0;
  std::size_t n = 0;
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

/// Throws DataError when the table header differs from the model's
/// feature names.
EvalReport evaluate(const ForestModel& model, const FeatureTable& table, Split split = Split::Test);

std::string confusion_to_csv(const EvalReport& report);

// ---------------------------------------------------------------------------

struct SweepConfig {
  std::vector<std::size_t> pcs = {0, 3};
  std::vector<bool> signatures = {true, false};
  std::vector<bool> symmetrize = {true, false};
  std::vector<std::size_t> train_sizes;  // per class; empty means all train rows
  DifferenceScheme scheme = DifferenceScheme::Forward;
  ForestParams forest;
};

struct SweepCell {
  std::size_t n_pcs = 0;
  bool signatures = false;
  bool symmetrize = false;
  std::size_t train_per_class = 0;
  std::size_t n_features = 0;
  double accuracy = 0.0;
};

/// Accuracy over the grid pcs x signatures x symmetrize x train_sizes. The
/// train subset of size m keeps the first m train entries of each class;
/// PCA is refit on that subset. Test rows are always the full test split.
std::vector<SweepCell> run_sweep(const DatasetManifest& manifest,
                                 std::span<const ImageField> sheets, const SweepConfig& config);

std::string sweep_to_csv(std::span<const SweepCell> cells);

// ---------------------------------------------------------------------------

struct BenchRow {
  std::size_t size = 0;  // image side in pixels
  double fast_seconds = 0.0;
  std::optional<double> oracle_seconds;
  double max_deviation = 0.0;  // max |fast - oracle| / (1 + |oracle|)
  double max_abs_fast = 0.0;
};

/// Times the four second-order kinds on a random size x size RGB image.
/// The oracle runs only for sizes up to oracle_limit.
std::vector<BenchRow> run_bench(std::span<const std::size_t> sizes, std::uint64_t seed,
                                std::size_t repeats = 5, std::size_t oracle_limit = 64);

std::string bench_to_csv(std::span<const BenchRow> rows);

}  // namespace sig2d
