#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sig2d/errors.hpp"

namespace sig2d {

/// K x L grid of d-channel real pixels, stored row-major with channels
/// interleaved: value(k, l, i) lives at (k * L + l) * d + i. Row 0 is the top.
class ImageField {
 public:
  ImageField() = default;
  ImageField(std::size_t height, std::size_t width, std::size_t channels = 3, double fill = 0.0);
  ImageField(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t k, std::size_t l, std::size_t i) const {
    return values_[(k * width_ + l) * channels_ + i];
  }
  double& operator()(std::size_t k, std::size_t l, std::size_t i) {
    return values_[(k * width_ + l) * channels_ + i];
  }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// True when every value is finite and in [0, 1].
  bool normalized() const;

  bool operator==(const ImageField&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> values_;
};

/// Pixel-index rectangle [row_begin, row_end] x [col_begin, col_end]. The
/// cells it spans are [row_begin, row_end - 1] x [col_begin, col_end - 1].
struct Window {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;

  std::size_t cell_rows() const { return row_end - row_begin; }
  std::size_t cell_cols() const { return col_end - col_begin; }

  bool operator==(const Window&) const = default;
};

enum class DifferenceScheme { Forward, Central };

const char* to_string(DifferenceScheme scheme);
DifferenceScheme parse_scheme(const std::string& name);

/// Throws IndexError unless 0 <= row_begin < row_end <= K-1 (same for columns).
void check_window(const ImageField& x, const Window& w);

/// Throws MarginError unless the window keeps a one-pixel margin:
/// 1 <= row_begin and row_end <= K-2 (same for columns).
void check_central_margin(const ImageField& x, const Window& w);

void check_channel(const ImageField& x, std::size_t channel);

/// Largest window usable with the scheme: the whole image for Forward, the
/// image minus a one-pixel border for Central.
Window full_window(const ImageField& x, DifferenceScheme scheme = DifferenceScheme::Forward);

}  // namespace sig2d
