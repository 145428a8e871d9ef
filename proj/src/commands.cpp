#include "sig2d/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "sig2d/image_io.hpp"

namespace sig2d::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void ensure_parent(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  if (!parent.empty()) ensure_dir(parent);
}

std::vector<ImageField> sheets_for(const DatasetManifest& manifest, const std::string& manifest_path) {
  const fs::path root = fs::path(manifest_path).parent_path();
  return load_sheets(manifest, root.empty() ? "." : root.string());
}

}  // namespace

std::string cmd_synth(const SynthOptions& options, std::ostream& log) {
  if (options.n_classes < 2 && !options.from_dir) {
    throw ParameterError("classification needs at least 2 classes");
  }
  const fs::path root = options.data_dir.empty() ? fs::path(default_data_dir()) : fs::path(options.data_dir);
  ensure_dir(root);

  std::vector<std::string> names;
  std::vector<ImageField> sheets;
  std::vector<std::string> paths;
  if (options.from_dir) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(*options.from_dir, ec)) {
      const auto ext = entry.path().extension().string();
      if (entry.is_regular_file() && (ext == ".png" || ext == ".ppm" || ext == ".PNG" || ext == ".PPM")) {
        files.push_back(entry.path());
      }
    }
    if (ec) throw IoError("cannot list " + *options.from_dir + ": " + ec.message());
    std::sort(files.begin(), files.end());
    if (files.size() < 2) throw ParameterError(*options.from_dir + " holds fewer than 2 images");
    for (const auto& f : files) {
      names.push_back(f.stem().string());
      sheets.push_back(load_image(f.string()));
      paths.push_back(fs::absolute(f).string());
    }
  } else {
    ensure_dir(root / "sheets");
    for (auto& s : synth_textures(options.n_classes, options.sheet_size, options.seed)) {
      const std::string rel = "sheets/" + s.name + ".ppm";
      save_ppm(s.sheet, (root / rel).string());
      names.push_back(s.name);
      paths.push_back(rel);
      sheets.push_back(std::move(s.sheet));
    }
  }

  DatasetManifest manifest =
      build_manifest(sheets, names, options.n_train, options.n_test, options.patch_size, options.seed);
  manifest.sheet_paths = paths;
  const std::string manifest_path = (root / "manifest.json").string();
  save_manifest(manifest, manifest_path);

  if (options.materialize) {
    ensure_dir(root / "patches");
    for (const auto& e : manifest.entries) {
      save_ppm(materialize(manifest, e, sheets), (root / "patches" / patch_file_name(manifest, e)).string());
    }
  }

  log << "class  name                 sheet      train  test\n";
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::size_t tr = 0, te = 0;
    for (const auto& e : manifest.entries) {
      if (e.class_index == c) (e.split == Split::Train ? tr : te)++;
    }
    log << std::left << std::setw(7) << c << std::setw(21) << names[c] << std::setw(11)
        << (std::to_string(sheets[c].height()) + "x" + std::to_string(sheets[c].width()))
        << std::setw(7) << tr << te << '\n';
  }
  log << "manifest: " << manifest_path << '\n';
  return manifest_path;
}

std::string feature_meta_path(const std::string& features_path) {
  return features_path + ".meta.json";
}

FeatureTable cmd_extract(const std::string& manifest_path, const RunConfig& config,
                         const std::string& out, const std::optional<std::string>& pca_out,
                         std::ostream& log) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  const auto sheets = sheets_for(manifest, manifest_path);
  Extraction ex = extract_features(manifest, sheets, config);
  ensure_parent(out);
  save_feature_table(ex.table, out);
  write_text(feature_meta_path(out), run_config_to_json(config));
  if (pca_out && ex.pca) {
    ensure_parent(*pca_out);
    save_pca(*ex.pca, *pca_out);
  }
  log << "extracted " << ex.table.rows.size() << " rows x " << ex.table.header.size()
      << " features (scheme " << to_string(config.scheme)
      << (config.symmetrize ? ", symmetrized" : "") << ") -> " << out << '\n';
  if (ex.pca) {
    log << "pca explained variance ratio:";
    for (double r : ex.pca->explained_variance_ratio) log << ' ' << r;
    log << '\n';
  }
  return std::move(ex.table);
}

TrainReport cmd_train(const std::string& features_path, const ForestParams& params,
                      const std::string& out, std::ostream& log) {
  const FeatureTable table = load_feature_table(features_path);
  TrainReport report = train_on_table(table, params);
  ensure_parent(out);
  save_forest(report.model, out);
  log << "trained " << report.model.trees.size() << " trees on "
      << std::count_if(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.split == Split::Train; })
      << " rows, " << report.model.n_features() << " features, " << report.model.classes.size()
      << " classes; train accuracy " << report.train_accuracy << " -> " << out << '\n';
  return report;
}

EvalReport cmd_eval(const std::string& model_path, const std::string& features_path, Split split,
                    const std::optional<std::string>& confusion_out, std::ostream& log) {
  const ForestModel model = load_forest(model_path);
  const FeatureTable table = load_feature_table(features_path);
  EvalReport report = evaluate(model, table, split);
  if (confusion_out) {
    ensure_parent(*confusion_out);
    write_text(*confusion_out, confusion_to_csv(report));
  }
  log << "accuracy " << std::setprecision(6) << report.accuracy << " on " << report.n << ' '
      << to_string(split) << " rows (chance " << 1.0 / static_cast<double>(report.classes.size())
      << ")\n";
  return report;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::uint64_t seed, std::size_t repeats,
              const std::optional<std::string>& out, std::ostream& log) {
  const auto rows = run_bench(sizes, seed, repeats);
  const std::string csv = bench_to_csv(rows);
  if (out) {
    ensure_parent(*out);
    write_text(*out, csv);
  }
  log << csv;
  int status = 0;
  for (const auto& r : rows) {
    if (r.max_deviation > 1e-9) {
      log << "size " << r.size << ": fast path deviates from the oracle by " << r.max_deviation << '\n';
      status = 1;
    }
  }
  return status;
}

std::vector<SweepCell> cmd_sweep(const std::string& manifest_path, const SweepConfig& config,
                                 const std::string& out, std::ostream& log) {
  const DatasetManifest manifest = load_manifest(manifest_path);
  const auto sheets = sheets_for(manifest, manifest_path);
  auto cells = run_sweep(manifest, sheets, config);
  const std::string csv = sweep_to_csv(cells);
  ensure_parent(out);
  write_text(out, csv);
  log << csv;
  return cells;
}

}  // namespace sig2d::cli
