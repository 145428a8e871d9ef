#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sig2d/image.hpp"

namespace sig2d {

/// Principal components of mean-centered, flattened images (eigenfaces
/// style, no per-pixel scaling).
struct PcaModel {
  std::array<std::size_t, 3> dims{};  // K, L, d
  std::vector<double> mean;           // length K*L*d
  std::vector<std::vector<double>> components;  // rows, descending variance
  std::vector<double> explained_variance_ratio;
  // Set when the data had fewer usable directions than requested.
  bool rank_deficient = false;

  std::size_t n_components() const { return components.size(); }
  std::size_t pixel_count() const { return dims[0] * dims[1] * dims[2]; }
};

/// Fits up to n_components directions from the thin SVD of the centered
/// data matrix. Each component is signed so that its largest-magnitude entry
/// is positive.
///
/// Throws ParameterError when fewer than 2 images are given or n_components
/// is outside [1, min(#images - 1, K*L*d)], DataError on mismatched image
/// dimensions. If the centered data has rank r < n_components only r
/// components are returned and rank_deficient is set.
PcaModel pca_fit(std::span<const ImageField> images, std::size_t n_components);

/// Coordinates <flatten(x) - mean, component_j>.
std::vector<double> pca_transform(const PcaModel& model, const ImageField& x);

/// mean + sum_j coords[j] * component_j, reshaped to the training dimensions.
ImageField pca_reconstruct(const PcaModel& model, std::span<const double> coords);

std::string pca_to_json(const PcaModel& model);
PcaModel pca_from_json(const std::string& text);
void save_pca(const PcaModel& model, const std::string& path);
PcaModel load_pca(const std::string& path);

}  // namespace sig2d
