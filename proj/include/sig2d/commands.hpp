#pragma once

// File-level pipeline commands behind the `sig2d` tool. Each writes its
// outputs to disk and a short human-readable report to `log`.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sig2d/pipeline.hpp"

namespace sig2d::cli {

struct SynthOptions {
  std::size_t n_classes = 8;
  std::size_t n_train = 10;
  std::size_t n_test = 100;
  std::size_t patch_size = 64;
  std::size_t sheet_size = 256;
  std::uint64_t seed = 1;
  std::string data_dir;                 // output root
  std::optional<std::string> from_dir;  // use user images (one file per class) instead of synthesis
  bool materialize = false;             // also write every patch as a PPM file
};

/// Writes sheets/<class>.ppm (synthetic mode) and manifest.json under
/// data_dir. Returns the manifest path.
std::string cmd_synth(const SynthOptions& options, std::ostream& log);

/// Where extract records the run configuration next to a feature CSV.
std::string feature_meta_path(const std::string& features_path);

/// Loads the manifest and the sheets it names (relative to the manifest's
/// directory) and writes the feature CSV plus its configuration record. If pca_out is set and PCs were
/// requested, the fitted PCA model is saved there.
FeatureTable cmd_extract(const std::string& manifest_path, const RunConfig& config,
                         const std::string& out, const std::optional<std::string>& pca_out,
                         std::ostream& log);

TrainReport cmd_train(const std::string& features_path, const ForestParams& params,
                      const std::string& out, std::ostream& log);

EvalReport cmd_eval(const std::string& model_path, const std::string& features_path, Split split,
                    const std::optional<std::string>& confusion_out, std::ostream& log);

/// Returns the process exit code: 0, or 1 when any fast/oracle deviation
/// exceeds 1e-9.
int cmd_bench(const std::vector<std::size_t>& sizes, std::uint64_t seed, std::size_t repeats,
              const std::optional<std::string>& out, std::ostream& log);

std::vector<SweepCell> cmd_sweep(const std::string& manifest_path, const SweepConfig& config,
                                 const std::string& out, std::ostream& log);

}  // namespace sig2d::cli
