#include "sig2d/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sig2d/image_io.hpp"

namespace sig2d {

using nlohmann::json;

PatchPosition sample_position(std::size_t sheet_height, std::size_t sheet_width, std::size_t size,
                              Rng& rng) {
  if (size == 0 || sheet_height < size || sheet_width < size) {
    throw ParameterError("sheet " + std::to_string(sheet_height) + "x" +
                         std::to_string(sheet_width) + " too small for " + std::to_string(size) +
                         "px patches");
  }
  const std::size_t row = uniform_index(rng, sheet_height - size + 1);
  const std::size_t col = uniform_index(rng, sheet_width - size + 1);
  return {row, col};
}

ImageField extract_patch(const ImageField& sheet, PatchPosition at, std::size_t size) {
  if (at.row + size > sheet.height() || at.col + size > sheet.width()) {
    throw IndexError("patch at (" + std::to_string(at.row) + ", " + std::to_string(at.col) +
                     ") of size " + std::to_string(size) + " leaves the sheet");
  }
  const std::size_t d = sheet.channels();
  ImageField patch(size, size, d);
  for (std::size_t k = 0; k < size; ++k) {
    const auto src = sheet.values().subspan(((at.row + k) * sheet.width() + at.col) * d, size * d);
    std::copy(src.begin(), src.end(), patch.values().begin() + k * size * d);
  }
  return patch;
}

std::vector<ImageField> sample_patches(const ImageField& sheet, std::size_t n, std::size_t size,
                                       std::uint64_t seed) {
  if (size == 0 || sheet.height() < size || sheet.width() < size) {
    throw ParameterError("sheet too small for " + std::to_string(size) + "px patches");
  }
  Rng rng(seed);
  std::vector<ImageField> patches;
  patches.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    patches.push_back(extract_patch(sheet, sample_position(sheet.height(), sheet.width(), size, rng), size));
  }
  return patches;
}

// ---------------------------------------------------------------------------

namespace {

using Palette = std::pair<std::array<double, 3>, std::array<double, 3>>;

constexpr std::array<Palette, 4> kPalettes = {{
    {{0.15, 0.10, 0.05}, {0.85, 0.70, 0.45}},
    {{0.05, 0.15, 0.10}, {0.55, 0.85, 0.60}},
    {{0.10, 0.10, 0.20}, {0.60, 0.65, 0.95}},
    {{0.20, 0.05, 0.05}, {0.90, 0.55, 0.50}},
}};

TextureSpec make_spec(std::string name, TextureFamily family, double scale, double shape,
                      std::size_t palette) {
  return {std::move(name), family, scale, shape, kPalettes[palette].first,
          kPalettes[palette].second};
}

std::vector<double> stripes(const TextureSpec& spec, std::size_t h, std::size_t w, Rng& rng) {
  const double phase = 2.0 * std::numbers::pi * uniform01(rng);
  const double theta = spec.shape * std::numbers::pi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  // Snap exact axis directions so angle 0 gives rows that are bit-identical.
  const double cc = std::abs(c) < 1e-15 ? 0.0 : c, ss = std::abs(s) < 1e-15 ? 0.0 : s;
  std::vector<double> t(h * w);
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t l = 0; l < w; ++l) {
      const double u = static_cast<double>(l) * cc + static_cast<double>(k) * ss;
      t[k * w + l] = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * u / spec.scale + phase);
    }
  }
  return t;
}

std::vector<double> checkerboard(const TextureSpec& spec, std::size_t h, std::size_t w, Rng& rng) {
  const auto cell = static_cast<std::size_t>(std::max(1.0, std::round(spec.scale)));
  const std::size_t off_r = uniform_index(rng, 2 * cell), off_c = uniform_index(rng, 2 * cell);
  std::vector<double> t(h * w);
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t l = 0; l < w; ++l) {
      t[k * w + l] = static_cast<double>(((k + off_r) / cell + (l + off_c) / cell) % 2);
    }
  }
  return t;
}

std::vector<double> gaussian_blur(const std::vector<double>& in, std::size_t h, std::size_t w,
                                  double sigma) {
  const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double norm = 0.0;
  for (long j = -radius; j <= radius; ++j) {
    kernel[j + radius] = std::exp(-0.5 * static_cast<double>(j * j) / (sigma * sigma));
    norm += kernel[j + radius];
  }
  for (double& v : kernel) v /= norm;
  auto reflect = [](long i, long n) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return static_cast<std::size_t>(i);
  };
  const long lh = static_cast<long>(h), lw = static_cast<long>(w);
  std::vector<double> tmp(h * w, 0.0), out(h * w, 0.0);
  for (long k = 0; k < lh; ++k) {
    for (long l = 0; l < lw; ++l) {
      double acc = 0.0;
      for (long j = -radius; j <= radius; ++j) acc += kernel[j + radius] * in[k * w + reflect(l + j, lw)];
      tmp[k * w + l] = acc;
    }
  }
  for (long k = 0; k < lh; ++k) {
    for (long l = 0; l < lw; ++l) {
      double acc = 0.0;
      for (long j = -radius; j <= radius; ++j) acc += kernel[j + radius] * tmp[reflect(k + j, lh) * w + l];
      out[k * w + l] = acc;
    }
  }
  return out;
}

std::vector<double> filtered_noise(const TextureSpec& spec, std::size_t h, std::size_t w, Rng& rng) {
  std::vector<double> white(h * w);
  for (double& v : white) v = 2.0 * uniform01(rng) - 1.0;
  // Gaussian low-pass whose frequency response falls to exp(-1/2) at the cutoff.
  const double sigma = 1.0 / (2.0 * std::numbers::pi * spec.scale);
  std::vector<double> t = gaussian_blur(white, h, w, sigma);
  double mean = 0.0, var = 0.0;
  for (double v : t) mean += v;
  mean /= static_cast<double>(t.size());
  for (double v : t) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(t.size()));
  for (double& v : t) v = std::clamp(0.5 + 0.18 * (v - mean) / sd, 0.0, 1.0);
  return t;
}

std::vector<double> blobs(const TextureSpec& spec, std::size_t h, std::size_t w, Rng& rng) {
  const double radius = spec.scale;
  const auto count = static_cast<std::size_t>(std::llround(spec.shape * static_cast<double>(h * w) / 1000.0));
  std::vector<double> t(h * w, 0.0);
  const long reach = static_cast<long>(std::ceil(4.0 * radius));
  for (std::size_t b = 0; b < count; ++b) {
    const double cr = uniform01(rng) * static_cast<double>(h);
    const double cc = uniform01(rng) * static_cast<double>(w);
    const long r0 = std::max(0L, static_cast<long>(cr) - reach);
    const long r1 = std::min(static_cast<long>(h) - 1, static_cast<long>(cr) + reach);
    const long c0 = std::max(0L, static_cast<long>(cc) - reach);
    const long c1 = std::min(static_cast<long>(w) - 1, static_cast<long>(cc) + reach);
    for (long k = r0; k <= r1; ++k) {
      for (long l = c0; l <= c1; ++l) {
        const double dr = static_cast<double>(k) - cr, dc = static_cast<double>(l) - cc;
        t[k * w + l] += std::exp(-(dr * dr + dc * dc) / (2.0 * radius * radius));
      }
    }
  }
  for (double& v : t) v = std::min(v, 1.0);
  return t;
}

}  // namespace

const std::vector<TextureSpec>& texture_catalog() {
  using F = TextureFamily;
  static const std::vector<TextureSpec> catalog = {
      make_spec("stripes_p6_a30", F::Stripes, 6.0, 30.0, 0),
      make_spec("checker_c5", F::Checkerboard, 5.0, 0.0, 0),
      make_spec("noise_f0.10", F::Noise, 0.10, 0.0, 0),
      make_spec("blobs_r4_d6", F::Blobs, 4.0, 6.0, 0),
      make_spec("stripes_p14_a75", F::Stripes, 14.0, 75.0, 1),
      make_spec("checker_c12", F::Checkerboard, 12.0, 0.0, 1),
      make_spec("noise_f0.40", F::Noise, 0.40, 0.0, 1),
      make_spec("blobs_r6_d3", F::Blobs, 6.0, 3.0, 1),
      make_spec("stripes_p9_a0", F::Stripes, 9.0, 0.0, 2),
      make_spec("checker_c3", F::Checkerboard, 3.0, 0.0, 2),
      make_spec("noise_f0.20", F::Noise, 0.20, 0.0, 2),
      make_spec("blobs_r3_d12", F::Blobs, 3.0, 12.0, 2),
      make_spec("stripes_p20_a45", F::Stripes, 20.0, 45.0, 3),
      make_spec("checker_c8", F::Checkerboard, 8.0, 0.0, 3),
      make_spec("noise_f0.05", F::Noise, 0.05, 0.0, 3),
      make_spec("blobs_r10_d1", F::Blobs, 10.0, 1.0, 3),
  };
  return catalog;
}

ImageField render_texture(const TextureSpec& spec, std::size_t height, std::size_t width,
                          std::uint64_t seed) {
  if (height == 0 || width == 0) throw ParameterError("texture sheet must be non-empty");
  if (!(spec.scale > 0.0)) throw ParameterError("texture scale must be positive");
  Rng rng(seed);
  std::vector<double> t;
  switch (spec.family) {
    case TextureFamily::Stripes: t = stripes(spec, height, width, rng); break;
    case TextureFamily::Checkerboard: t = checkerboard(spec, height, width, rng); break;
    case TextureFamily::Noise: t = filtered_noise(spec, height, width, rng); break;
    case TextureFamily::Blobs: t = blobs(spec, height, width, rng); break;
  }
  ImageField sheet(height, width, 3);
  for (std::size_t k = 0; k < height; ++k) {
    for (std::size_t l = 0; l < width; ++l) {
      const double v = t[k * width + l];
      for (std::size_t i = 0; i < 3; ++i) {
        // Quantized to 8 bits so a sheet survives a PPM round trip unchanged.
        const double c = std::clamp(spec.low[i] + (spec.high[i] - spec.low[i]) * v, 0.0, 1.0);
        sheet(k, l, i) = std::round(c * 255.0) / 255.0;
      }
    }
  }
  return sheet;
}

std::vector<NamedSheet> synth_textures(std::size_t n_classes, std::size_t sheet_size,
                                       std::uint64_t seed) {
  const auto& catalog = texture_catalog();
  if (n_classes < 2) throw ParameterError("need at least 2 texture classes");
  if (n_classes > catalog.size()) {
    throw ParameterError("requested " + std::to_string(n_classes) + " classes, only " +
                         std::to_string(catalog.size()) + " texture variants are available");
  }
  std::vector<NamedSheet> out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    Rng rng = stream(seed, c);
    out.push_back({catalog[c].name, render_texture(catalog[c], sheet_size, sheet_size, rng())});
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(Split split) { return split == Split::Train ? "train" : "test"; }

Split parse_split(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  throw DataError("unknown split '" + name + "'");
}

DatasetManifest build_manifest(std::span<const ImageField> sheets,
                               std::vector<std::string> classes, std::size_t n_train,
                               std::size_t n_test, std::size_t patch_size, std::uint64_t seed) {
  if (sheets.size() != classes.size()) throw ParameterError("one sheet per class is required");
  if (patch_size == 0) throw ParameterError("patch size must be positive");
  DatasetManifest manifest;
  manifest.classes = std::move(classes);
  manifest.patch_size = patch_size;
  manifest.seed = seed;
  for (std::size_t c = 0; c < sheets.size(); ++c) {
    const ImageField& sheet = sheets[c];
    Rng rng = stream(seed, c);
    std::set<PatchPosition> taken;
    for (std::size_t j = 0; j < n_train; ++j) {
      const PatchPosition p = sample_position(sheet.height(), sheet.width(), patch_size, rng);
      taken.insert(p);
      manifest.entries.push_back({c, Split::Train, c, p, j});
    }
    const std::size_t positions =
        (sheet.height() - patch_size + 1) * (sheet.width() - patch_size + 1);
    if (n_test > 0 && taken.size() >= positions) {
      throw ParameterError("class '" + manifest.classes[c] +
                           "': every patch position is used for training; the sheet is too small");
    }
    for (std::size_t j = 0; j < n_test; ++j) {
      PatchPosition p;
      do {
        p = sample_position(sheet.height(), sheet.width(), patch_size, rng);
      } while (taken.contains(p));
      manifest.entries.push_back({c, Split::Test, c, p, j});
    }
  }
  return manifest;
}

ImageField materialize(const DatasetManifest& manifest, const ManifestEntry& entry,
                       std::span<const ImageField> sheets) {
  if (entry.sheet >= sheets.size()) throw DataError("manifest entry refers to a missing sheet");
  return extract_patch(sheets[entry.sheet], entry.position, manifest.patch_size);
}

std::string patch_file_name(const DatasetManifest& manifest, const ManifestEntry& entry) {
  return manifest.classes.at(entry.class_index) + "_" + to_string(entry.split) + "_" +
         std::to_string(entry.index) + ".ppm";
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"class", e.class_index},
                       {"split", to_string(e.split)},
                       {"sheet", e.sheet},
                       {"row", e.position.row},
                       {"col", e.position.col},
                       {"index", e.index}});
  }
  json j{{"classes", manifest.classes},
         {"sheets", manifest.sheet_paths},
         {"patch_size", manifest.patch_size},
         {"seed", manifest.seed},
         {"entries", entries}};
  return j.dump(1);
}

DatasetManifest manifest_from_json(const std::string& text) {
  DatasetManifest m;
  try {
    const json j = json::parse(text);
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.sheet_paths = j.at("sheets").get<std::vector<std::string>>();
    m.patch_size = j.at("patch_size").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const json& e : j.at("entries")) {
      ManifestEntry entry;
      entry.class_index = e.at("class").get<std::size_t>();
      entry.split = parse_split(e.at("split").get<std::string>());
      entry.sheet = e.at("sheet").get<std::size_t>();
      entry.position = {e.at("row").get<std::size_t>(), e.at("col").get<std::size_t>()};
      entry.index = e.at("index").get<std::size_t>();
      if (entry.class_index >= m.classes.size()) throw DataError("manifest: class index out of range");
      m.entries.push_back(entry);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << manifest_to_json(manifest) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

std::vector<ImageField> load_sheets(const DatasetManifest& manifest, const std::string& root) {
  std::vector<ImageField> sheets;
  for (const auto& rel : manifest.sheet_paths) {
    std::filesystem::path p(rel);
    if (p.is_relative()) p = std::filesystem::path(root) / p;
    sheets.push_back(load_image(p.string()));
  }
  return sheets;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("SIG2D_DATA_DIR"); env && *env) return env;
  return "data";
}

}  // namespace sig2d
