// sig2d: 2-d signature texture features, random-forest training and
// evaluation.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sig2d/commands.hpp"
#include "sig2d/parallel.hpp"

namespace {

using namespace sig2d;

std::string manifest_default(const std::string& data_dir) {
  return (data_dir.empty() ? default_data_dir() : data_dir) + "/manifest.json";
}

void add_forest_options(CLI::App* cmd, ForestParams& params, std::size_t& max_depth,
                        std::size_t& mtry) {
  cmd->add_option("--trees", params.n_trees, "Number of trees")->capture_default_str();
  cmd->add_option("--max-depth", max_depth, "Maximum tree depth (0 = unlimited)");
  cmd->add_option("--min-leaf", params.min_leaf, "Minimum samples per leaf")->capture_default_str();
  cmd->add_option("--mtry", mtry, "Features tried per split (0 = ceil(sqrt(F)))");
  cmd->add_option("--seed", params.seed, "Forest seed")->capture_default_str();
}

void finish_forest_options(ForestParams& params, std::size_t max_depth, std::size_t mtry) {
  if (max_depth > 0) params.max_depth = max_depth;
  if (mtry > 0) params.mtry = mtry;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-d signature features and random-forest texture classification"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: SIG2D_THREADS or all cores)");

  std::string data_dir;

  // synth
  cli::SynthOptions synth;
  std::string from_dir;
  auto* synth_cmd = app.add_subcommand("synth", "Generate texture sheets and a train/test manifest");
  synth_cmd->add_option("--classes", synth.n_classes, "Number of synthetic classes")->capture_default_str();
  synth_cmd->add_option("--train", synth.n_train, "Train patches per class")->capture_default_str();
  synth_cmd->add_option("--test", synth.n_test, "Test patches per class")->capture_default_str();
  synth_cmd->add_option("--patch", synth.patch_size, "Patch side in pixels")->capture_default_str();
  synth_cmd->add_option("--sheet", synth.sheet_size, "Synthetic sheet side in pixels")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Dataset seed")->capture_default_str();
  synth_cmd->add_option("--data-dir,--out", data_dir, "Output root (default: SIG2D_DATA_DIR or ./data)");
  synth_cmd->add_option("--from-dir", from_dir, "Use PNG/PPM images in this directory, one per class");
  synth_cmd->add_flag("--materialize", synth.materialize, "Also write every patch as a PPM file");

  // extract
  RunConfig run;
  std::string scheme = "forward";
  std::string manifest_path, features_out = "features.csv", pca_out;
  bool no_signatures = false;
  auto* extract_cmd = app.add_subcommand("extract", "Compute the feature CSV for a manifest");
  extract_cmd->add_option("--manifest", manifest_path, "Manifest JSON (default: <data-dir>/manifest.json)");
  extract_cmd->add_option("--data-dir", data_dir, "Data root");
  extract_cmd->add_option("--scheme", scheme, "Difference scheme for hat increments")
      ->check(CLI::IsMember({"forward", "central"}))
      ->capture_default_str();
  extract_cmd->add_flag("--symmetrize", run.symmetrize, "Average signatures over the 8 orientations");
  extract_cmd->add_flag("--no-signatures", no_signatures, "Omit the second-order signature columns");
  extract_cmd->add_flag("--first-order", run.include_first_order, "Add the 6 first-order columns");
  extract_cmd->add_flag("--cross-channels", run.cross_channels,
                        "Add off-diagonal (i1 != i2) second-order columns");
  extract_cmd->add_option("--pcs", run.n_pcs, "Principal components of raw pixels")->capture_default_str();
  extract_cmd->add_flag("--baseline", run.baseline, "Allow an empty feature set (chance baseline)");
  extract_cmd->add_option("--out", features_out, "Feature CSV path")->capture_default_str();
  extract_cmd->add_option("--pca-out", pca_out, "Write the fitted PCA model JSON here");

  // train
  ForestParams forest;
  std::size_t max_depth = 0, mtry = 0;
  std::string train_features = "features.csv", model_out = "model.json";
  auto* train_cmd = app.add_subcommand("train", "Train a random forest on the train rows");
  train_cmd->add_option("--features", train_features, "Feature CSV")->capture_default_str();
  train_cmd->add_option("--out", model_out, "Model JSON path")->capture_default_str();
  add_forest_options(train_cmd, forest, max_depth, mtry);

  // eval
  std::string model_path = "model.json", eval_features = "features.csv", confusion_out, split_name = "test";
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model; report accuracy and confusion matrix");
  eval_cmd->add_option("--model", model_path, "Model JSON")->capture_default_str();
  eval_cmd->add_option("--features", eval_features, "Feature CSV")->capture_default_str();
  eval_cmd->add_option("--split", split_name, "Rows to evaluate")
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  eval_cmd->add_option("--out", confusion_out, "Confusion matrix CSV path");

  // bench
  std::vector<std::size_t> sizes = {2, 8, 16, 32, 64, 128};
  std::uint64_t bench_seed = 7;
  std::size_t repeats = 5;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Time the prefix-sum path against the brute-force oracle");
  bench_cmd->add_option("--sizes", sizes, "Image sides in pixels")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--seed", bench_seed, "Image seed")->capture_default_str();
  bench_cmd->add_option("--repeats", repeats, "Timing repetitions (fast path)")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Also write the table as CSV");

  // sweep
  SweepConfig sweep;
  std::string sweep_out = "sweep.csv";
  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy grid over PCs, signatures, symmetry and train size");
  sweep_cmd->add_option("--manifest", manifest_path, "Manifest JSON (default: <data-dir>/manifest.json)");
  sweep_cmd->add_option("--data-dir", data_dir, "Data root");
  sweep_cmd->add_option("--pcs", sweep.pcs, "List of PC counts")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--train-sizes", sweep.train_sizes, "Train patches per class to try")->delimiter(',');
  sweep_cmd->add_option("--scheme", scheme, "Difference scheme")
      ->check(CLI::IsMember({"forward", "central"}));
  sweep_cmd->add_option("--out", sweep_out, "Accuracy grid CSV")->capture_default_str();
  add_forest_options(sweep_cmd, sweep.forest, max_depth, mtry);

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) set_num_threads(threads);

    if (*synth_cmd) {
      synth.data_dir = data_dir;
      if (!from_dir.empty()) synth.from_dir = from_dir;
      cli::cmd_synth(synth, std::cout);
    } else if (*extract_cmd) {
      run.scheme = parse_scheme(scheme);
      run.signatures = !no_signatures;
      if (manifest_path.empty()) manifest_path = manifest_default(data_dir);
      cli::cmd_extract(manifest_path, run, features_out,
                       pca_out.empty() ? std::nullopt : std::optional(pca_out), std::cout);
    } else if (*train_cmd) {
      finish_forest_options(forest, max_depth, mtry);
      cli::cmd_train(train_features, forest, model_out, std::cout);
    } else if (*eval_cmd) {
      cli::cmd_eval(model_path, eval_features, parse_split(split_name),
                    confusion_out.empty() ? std::nullopt : std::optional(confusion_out), std::cout);
    } else if (*bench_cmd) {
      return cli::cmd_bench(sizes, bench_seed, repeats,
                            bench_out.empty() ? std::nullopt : std::optional(bench_out), std::cout);
    } else if (*sweep_cmd) {
      finish_forest_options(sweep.forest, max_depth, mtry);
      sweep.scheme = parse_scheme(scheme);
      if (manifest_path.empty()) manifest_path = manifest_default(data_dir);
      cli::cmd_sweep(manifest_path, sweep, sweep_out, std::cout);
    }
  } catch (const ParameterError& e) {
    std::cerr << "sig2d: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "sig2d: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
