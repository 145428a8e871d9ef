#include "sig2d/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sig2d/parallel.hpp"
#include "sig2d/symmetry.hpp"

namespace sig2d {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("feature CSV line " + std::to_string(line_no) + ": bad number '" +
                    std::string(s) + "'");
  }
  return v;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::vector<double> signature_block(const ImageField& y, const RunConfig& config) {
  const Window w = full_window(y, config.scheme);
  const std::size_t d = y.channels();
  std::vector<double> out;
  if (config.signatures) {
    for (SignatureKind kind : kSecondOrderKinds) {
      for (std::size_t i = 0; i < d; ++i) out.push_back(sig_second(y, kind, i, i, w, config.scheme));
    }
  }
  if (config.cross_channels) {
    for (SignatureKind kind : kSecondOrderKinds) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          if (i != j) out.push_back(sig_second(y, kind, i, j, w, config.scheme));
        }
      }
    }
  }
  if (config.include_first_order) {
    for (std::size_t i = 0; i < d; ++i) out.push_back(sig_first_12(y, i, w));
    for (std::size_t i = 0; i < d; ++i) out.push_back(sig_first_hat(y, i, w, config.scheme));
  }
  return out;
}

}  // namespace

std::string feature_table_to_csv(const FeatureTable& table) {
  std::string out = "index,class,split";
  for (const auto& name : table.header) {
    if (name.find(',') != std::string::npos) throw DataError("feature name contains a comma");
    out += ',' + name;
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.values.size() != table.header.size()) throw DataError("feature row length mismatch");
    if (row.label.find(',') != std::string::npos) throw DataError("class label contains a comma");
    out += std::to_string(row.manifest_index) + ',' + row.label + ',' + to_string(row.split);
    for (double v : row.values) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

FeatureTable feature_table_from_csv(const std::string& text) {
  FeatureTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("feature CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split_line(line);
  if (head.size() < 3 || head[0] != "index" || head[1] != "class" || head[2] != "split") {
    throw DataError("feature CSV header must start with index,class,split");
  }
  for (std::size_t j = 3; j < head.size(); ++j) table.header.emplace_back(head[j]);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != head.size()) {
      throw DataError("feature CSV line " + std::to_string(line_no) + ": expected " +
                      std::to_string(head.size()) + " columns, got " + std::to_string(cells.size()));
    }
    FeatureRow row;
    row.manifest_index = static_cast<std::size_t>(parse_double(cells[0], line_no));
    row.label = std::string(cells[1]);
    row.split = parse_split(std::string(cells[2]));
    for (std::size_t j = 3; j < cells.size(); ++j) row.values.push_back(parse_double(cells[j], line_no));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void save_feature_table(const FeatureTable& table, const std::string& path) {
  write_text(path, feature_table_to_csv(table));
}

FeatureTable load_feature_table(const std::string& path) {
  return feature_table_from_csv(read_text(path));
}

void validate(const RunConfig& config) {
  const bool any = config.signatures || config.cross_channels || config.include_first_order ||
                   config.n_pcs > 0;
  if (!any && !config.baseline) {
    throw ParameterError("configuration selects no features (enable signatures, first-order, "
                         "PCs, or baseline mode)");
  }
}

std::string run_config_to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["scheme"] = to_string(config.scheme);
  j["signatures"] = config.signatures;
  j["symmetrize"] = config.symmetrize;
  j["first_order"] = config.include_first_order;
  j["cross_channels"] = config.cross_channels;
  j["n_pcs"] = config.n_pcs;
  j["baseline"] = config.baseline;
  return j.dump(1);
}

RunConfig run_config_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunConfig c;
    c.scheme = parse_scheme(j.at("scheme").get<std::string>());
    c.signatures = j.at("signatures").get<bool>();
    c.symmetrize = j.at("symmetrize").get<bool>();
    c.include_first_order = j.at("first_order").get<bool>();
    c.cross_channels = j.at("cross_channels").get<bool>();
    c.n_pcs = j.at("n_pcs").get<std::size_t>();
    c.baseline = j.at("baseline").get<bool>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad run config: ") + e.what());
  }
}

std::vector<std::string> feature_names(const RunConfig& config, std::size_t channels) {
  const std::string suffix = config.symmetrize ? ".sym" : "";
  std::vector<std::string> names;
  auto ch = [](std::size_t i) { return "ch" + std::to_string(i); };
  if (config.signatures) {
    for (SignatureKind kind : kSecondOrderKinds) {
      for (std::size_t i = 0; i < channels; ++i) {
        names.push_back("sig2." + std::string(kind_name(kind)) + "." + ch(i) + suffix);
      }
    }
  }
  if (config.cross_channels) {
    for (SignatureKind kind : kSecondOrderKinds) {
      for (std::size_t i = 0; i < channels; ++i) {
        for (std::size_t j = 0; j < channels; ++j) {
          if (i != j) names.push_back("sig2." + std::string(kind_name(kind)) + "." + ch(i) + ch(j) + suffix);
        }
      }
    }
  }
  if (config.include_first_order) {
    for (SignatureKind kind : {SignatureKind::First12, SignatureKind::FirstHat}) {
      for (std::size_t i = 0; i < channels; ++i) {
        names.push_back("sig1." + std::string(kind_name(kind)) + "." + ch(i) + suffix);
      }
    }
  }
  for (std::size_t j = 1; j <= config.n_pcs; ++j) names.push_back("pca." + std::to_string(j));
  return names;
}

std::vector<double> signature_features(const ImageField& patch, const RunConfig& config) {
  if (!config.signatures && !config.cross_channels && !config.include_first_order) return {};
  if (config.symmetrize) {
    return orientation_average(patch, [&](const ImageField& y) { return signature_block(y, config); });
  }
  return signature_block(patch, config);
}

Extraction extract_features(const DatasetManifest& manifest, std::span<const ImageField> sheets,
                            const RunConfig& config) {
  validate(config);
  Extraction result;
  if (config.n_pcs > 0) {
    std::vector<ImageField> train;
    for (const auto& e : manifest.entries) {
      if (e.split == Split::Train) train.push_back(materialize(manifest, e, sheets));
    }
    PcaModel pca = pca_fit(train, config.n_pcs);
    if (pca.n_components() < config.n_pcs) {
      throw ParameterError("training patches support only " + std::to_string(pca.n_components()) +
                           " principal components, " + std::to_string(config.n_pcs) + " requested");
    }
    result.pca = std::move(pca);
  }
  const std::size_t channels = sheets.empty() ? 3 : sheets.front().channels();
  result.table.header = feature_names(config, channels);
  result.table.rows.resize(manifest.entries.size());
  parallel_for(manifest.entries.size(), [&](std::size_t n) {
    const ManifestEntry& e = manifest.entries[n];
    const ImageField patch = materialize(manifest, e, sheets);
    FeatureRow& row = result.table.rows[n];
    row.manifest_index = n;
    row.label = manifest.classes.at(e.class_index);
    row.split = e.split;
    row.values = signature_features(patch, config);
    if (result.pca) {
      const auto coords = pca_transform(*result.pca, patch);
      row.values.insert(row.values.end(), coords.begin(), coords.end());
    }
    if (row.values.size() != result.table.header.size()) {
      throw DataError("feature count does not match header");
    }
  });
  return result;
}

LabeledData select_rows(const FeatureTable& table, Split split,
                        const std::vector<std::string>& classes) {
  LabeledData out;
  out.classes = classes;
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < out.classes.size(); ++c) index[out.classes[c]] = c;
  std::vector<const FeatureRow*> rows;
  for (const auto& row : table.rows) {
    if (row.split != split) continue;
    rows.push_back(&row);
    if (!index.contains(row.label)) {
      if (!classes.empty()) throw DataError("label '" + row.label + "' is not a model class");
      index[row.label] = out.classes.size();
      out.classes.push_back(row.label);
    }
  }
  out.features = Matrix(rows.size(), table.header.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i]->values.size() != table.header.size()) throw DataError("feature row length mismatch");
    std::copy(rows[i]->values.begin(), rows[i]->values.end(), out.features.row(i).begin());
    out.labels.push_back(index.at(rows[i]->label));
  }
  return out;
}

TrainReport train_on_table(const FeatureTable& table, const ForestParams& params) {
  LabeledData data = select_rows(table, Split::Train);
  if (data.features.rows == 0) throw DataError("feature table has no train rows");
  TrainReport report;
  report.model = train_forest(data.features, data.labels, data.classes, params, table.header);
  const auto pred = predict_batch(report.model, data.features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) hits += pred.labels[i] == data.labels[i];
  report.train_accuracy = static_cast<double>(hits) / static_cast<double>(data.labels.size());
  return report;
}

EvalReport evaluate(const ForestModel& model, const FeatureTable& table, Split split) {
  if (table.header != model.feature_names) {
    std::string detail;
    if (table.header.size() != model.feature_names.size()) {
      detail = std::to_string(table.header.size()) + " columns vs " +
               std::to_string(model.feature_names.size()) + " in the model";
    } else {
      for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] != model.feature_names[j]) {
          detail = "column " + std::to_string(j) + " is '" + table.header[j] + "', model expects '" +
                   model.feature_names[j] + "'";
          break;
        }
      }
    }
    throw DataError("feature header does not match the model: " + detail);
  }
  const LabeledData data = select_rows(table, split, model.classes);
  EvalReport report;
  report.classes = model.classes;
  report.n = data.features.rows;
  report.confusion.assign(model.classes.size(), std::vector<std::size_t>(model.classes.size(), 0));
  if (report.n == 0) throw DataError(std::string("feature table has no ") + to_string(split) + " rows");
  const auto pred = predict_batch(model, data.features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < report.n; ++i) {
    ++report.confusion[data.labels[i]][pred.labels[i]];
    hits += data.labels[i] == pred.labels[i];
  }
  report.accuracy = static_cast<double>(hits) / static_cast<double>(report.n);
  return report;
}

std::string confusion_to_csv(const EvalReport& report) {
  std::string out = "true\\predicted";
  for (const auto& c : report.classes) out += ',' + c;
  out += '\n';
  for (std::size_t t = 0; t < report.classes.size(); ++t) {
    out += report.classes[t];
    for (std::size_t p = 0; p < report.classes.size(); ++p) out += ',' + std::to_string(report.confusion[t][p]);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<SweepCell> run_sweep(const DatasetManifest& manifest,
                                 std::span<const ImageField> sheets, const SweepConfig& config) {
  const std::size_t n = manifest.entries.size();
  const std::size_t n_classes = manifest.classes.size();
  std::size_t max_pcs = 0;
  for (auto p : config.pcs) max_pcs = std::max(max_pcs, p);

  // Signature features do not depend on the train subset: compute once.
  std::vector<std::vector<double>> raw(n), sym(n);
  RunConfig sig_config;
  sig_config.scheme = config.scheme;
  parallel_for(n, [&](std::size_t j) {
    const ImageField patch = materialize(manifest, manifest.entries[j], sheets);
    RunConfig c = sig_config;
    c.symmetrize = false;
    raw[j] = signature_features(patch, c);
    c.symmetrize = true;
    sym[j] = signature_features(patch, c);
  });

  std::vector<std::size_t> per_class_train(n_classes, 0);
  for (const auto& e : manifest.entries) per_class_train[e.class_index] += e.split == Split::Train;
  std::vector<std::size_t> sizes = config.train_sizes;
  if (sizes.empty()) sizes.push_back(*std::max_element(per_class_train.begin(), per_class_train.end()));

  std::vector<SweepCell> cells;
  for (std::size_t m : sizes) {
    // Entries in the subset: first m train entries of each class, plus all test rows.
    std::vector<bool> in_train(n, false);
    std::vector<ImageField> train_patches;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& e = manifest.entries[j];
      if (e.split == Split::Train && e.index < m) {
        in_train[j] = true;
        if (max_pcs > 0) train_patches.push_back(materialize(manifest, e, sheets));
      }
    }
    std::vector<std::vector<double>> coords(n);
    if (max_pcs > 0) {
      const PcaModel pca = pca_fit(train_patches, max_pcs);
      if (pca.n_components() < max_pcs) throw ParameterError("train subset too small for requested PCs");
      parallel_for(n, [&](std::size_t j) {
        coords[j] = pca_transform(pca, materialize(manifest, manifest.entries[j], sheets));
      });
    }

    for (std::size_t pcs : config.pcs) {
      for (bool use_sig : config.signatures) {
        for (bool use_sym : config.symmetrize) {
          FeatureTable table;
          RunConfig c;
          c.signatures = use_sig;
          c.symmetrize = use_sym;
          c.n_pcs = pcs;
          c.baseline = true;
          table.header = feature_names(c);
          for (std::size_t j = 0; j < n; ++j) {
            const auto& e = manifest.entries[j];
            if (e.split == Split::Train && !in_train[j]) continue;
            FeatureRow row{j, manifest.classes[e.class_index], e.split, {}};
            if (use_sig) row.values = use_sym ? sym[j] : raw[j];
            row.values.insert(row.values.end(), coords[j].begin(),
                              coords[j].begin() + static_cast<std::ptrdiff_t>(pcs));
            table.rows.push_back(std::move(row));
          }
          const TrainReport trained = train_on_table(table, config.forest);
          const EvalReport eval = evaluate(trained.model, table, Split::Test);
          cells.push_back({pcs, use_sig, use_sym, m, table.header.size(), eval.accuracy});
        }
      }
    }
  }
  return cells;
}

std::string sweep_to_csv(std::span<const SweepCell> cells) {
  std::string out = "n_pcs,signatures,symmetrize,train_per_class,n_features,accuracy\n";
  for (const auto& c : cells) {
    out += std::to_string(c.n_pcs) + ',' + (c.signatures ? "on" : "off") + ',' +
           (c.symmetrize ? "on" : "off") + ',' + std::to_string(c.train_per_class) + ',' +
           std::to_string(c.n_features) + ',' + format_double(c.accuracy) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<BenchRow> run_bench(std::span<const std::size_t> sizes, std::uint64_t seed,
                                std::size_t repeats, std::size_t oracle_limit) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (std::size_t size : sizes) {
    if (size < 2) throw ParameterError("bench sizes must be at least 2");
    Rng rng = stream(seed, size);
    ImageField x(size, size, 3);
    for (double& v : x.values()) v = uniform01(rng);
    const Window w = full_window(x);

    BenchRow row;
    row.size = size;
    std::vector<double> fast;
    double best = INFINITY;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
      fast.clear();
      const auto t0 = clock::now();
      for (SignatureKind kind : kSecondOrderKinds) fast.push_back(sig_second(x, kind, 0, 0, w));
      best = std::min(best, std::chrono::duration<double>(clock::now() - t0).count());
    }
    row.fast_seconds = best;
    for (double v : fast) row.max_abs_fast = std::max(row.max_abs_fast, std::abs(v));

    if (size <= oracle_limit) {
      const auto t0 = clock::now();
      std::vector<double> oracle;
      for (SignatureKind kind : kSecondOrderKinds) oracle.push_back(brute_force_second(x, kind, 0, 0, w));
      row.oracle_seconds = std::chrono::duration<double>(clock::now() - t0).count();
      for (std::size_t k = 0; k < oracle.size(); ++k) {
        row.max_deviation = std::max(row.max_deviation,
                                     std::abs(fast[k] - oracle[k]) / (1.0 + std::abs(oracle[k])));
      }
      // Off-diagonal pairs are checked for agreement but not timed.
      for (SignatureKind kind : kSecondOrderKinds) {
        for (std::size_t i = 0; i < 3; ++i) {
          for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) continue;
            const double f = sig_second(x, kind, i, j, w);
            const double o = brute_force_second(x, kind, i, j, w);
            row.max_deviation = std::max(row.max_deviation, std::abs(f - o) / (1.0 + std::abs(o)));
          }
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string bench_to_csv(std::span<const BenchRow> rows) {
  std::string out = "size,fast_seconds,oracle_seconds,speedup,max_deviation\n";
  for (const auto& r : rows) {
    out += std::to_string(r.size) + ',' + format_double(r.fast_seconds) + ',';
    if (r.oracle_seconds) {
      out += format_double(*r.oracle_seconds) + ',' +
             format_double(r.fast_seconds > 0 ? *r.oracle_seconds / r.fast_seconds : 0.0);
    } else {
      out += ",";
    }
    out += ',' + (r.oracle_seconds ? format_double(r.max_deviation) : std::string()) + '\n';
  }
  return out;
}

}  // namespace sig2d
