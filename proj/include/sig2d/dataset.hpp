#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sig2d/image.hpp"
#include "sig2d/random.hpp"

namespace sig2d {

// ---------------------------------------------------------------------------
// Patch sampling

struct PatchPosition {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const PatchPosition&) const = default;
  auto operator<=>(const PatchPosition&) const = default;
};

/// Top-left corner drawn uniformly over the (H - size + 1) x (W - size + 1)
/// valid positions.
PatchPosition sample_position(std::size_t sheet_height, std::size_t sheet_width, std::size_t size,
                              Rng& rng);

ImageField extract_patch(const ImageField& sheet, PatchPosition at, std::size_t size);

/// n patches of size x size at uniformly drawn positions (overlap allowed).
/// Throws ParameterError if the sheet is smaller than the patch.
std::vector<ImageField> sample_patches(const ImageField& sheet, std::size_t n, std::size_t size,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic textures

enum class TextureFamily { Stripes, Checkerboard, Noise, Blobs };

/// One procedural texture class. The meaning of `scale` and `shape` depends
/// on the family:
///   Stripes       scale = period (px),            shape = angle (degrees)
///   Checkerboard  scale = cell size (px),         shape = unused
///   Noise         scale = low-pass cutoff (cycles/px), shape = unused
///   Blobs         scale = blob radius (px),       shape = blobs per 1000 px
/// The pattern t in [0, 1] is mapped to color low + (high - low) * t.
struct TextureSpec {
  std::string name;
  TextureFamily family = TextureFamily::Stripes;
  double scale = 8.0;
  double shape = 0.0;
  std::array<double, 3> low{0.0, 0.0, 0.0};
  std::array<double, 3> high{1.0, 1.0, 1.0};
};

/// The built-in texture classes, in the order synth_textures uses them.
const std::vector<TextureSpec>& texture_catalog();

/// Deterministic sheet for (spec, size, seed), quantized to multiples of
/// 1/255.
ImageField render_texture(const TextureSpec& spec, std::size_t height, std::size_t width,
                          std::uint64_t seed);

struct NamedSheet {
  std::string name;
  ImageField sheet;
};

/// The first n_classes catalog entries rendered as square sheets. Class c
/// uses stream (seed, c). Throws ParameterError for n_classes < 2 or more
/// than the catalog holds.
std::vector<NamedSheet> synth_textures(std::size_t n_classes, std::size_t sheet_size,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Manifests

enum class Split { Train, Test };
const char* to_string(Split split);
Split parse_split(const std::string& name);

struct ManifestEntry {
  std::size_t class_index = 0;
  Split split = Split::Train;
  std::size_t sheet = 0;
  PatchPosition position;
  std::size_t index = 0;  // running index within (class, split)

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<std::string> classes;
  std::vector<std::string> sheet_paths;  // relative to the data root; may be empty in memory
  std::vector<ManifestEntry> entries;
  std::size_t patch_size = 0;
  std::uint64_t seed = 0;

  bool operator==(const DatasetManifest&) const = default;
};

/// For each class c (one sheet per class), draws n_train then n_test
/// positions from stream (seed, c). A test position identical to one of the
/// class's train positions is redrawn.
DatasetManifest build_manifest(std::span<const ImageField> sheets,
                               std::vector<std::string> classes, std::size_t n_train,
                               std::size_t n_test, std::size_t patch_size, std::uint64_t seed);

ImageField materialize(const DatasetManifest& manifest, const ManifestEntry& entry,
                       std::span<const ImageField> sheets);

/// "{class}_{split}_{index}.ppm"
std::string patch_file_name(const DatasetManifest& manifest, const ManifestEntry& entry);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);
void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

/// Loads every sheet named in the manifest, resolving paths against `root`.
std::vector<ImageField> load_sheets(const DatasetManifest& manifest, const std::string& root);

/// SIG2D_DATA_DIR if set, else "data".
std::string default_data_dir();

}  // namespace sig2d
