#include "sig2d/image.hpp"

#include <cmath>
#include <string>

namespace sig2d {

ImageField::ImageField(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels), values_(height * width * channels, fill) {}

ImageField::ImageField(std::size_t height, std::size_t width, std::size_t channels,
                       std::vector<double> values)
    : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
  if (values_.size() != height * width * channels) {
    throw DataError("ImageField: expected " + std::to_string(height * width * channels) +
                    " values, got " + std::to_string(values_.size()));
  }
}

bool ImageField::normalized() const {
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) return false;
  }
  return true;
}

const char* to_string(DifferenceScheme scheme) {
  return scheme == DifferenceScheme::Forward ? "forward" : "central";
}

DifferenceScheme parse_scheme(const std::string& name) {
  if (name == "forward") return DifferenceScheme::Forward;
  if (name == "central") return DifferenceScheme::Central;
  throw ParameterError("unknown difference scheme '" + name + "' (expected forward|central)");
}

namespace {

std::string describe(const Window& w) {
  return "(" + std::to_string(w.row_begin) + ", " + std::to_string(w.row_end) + "; " +
         std::to_string(w.col_begin) + ", " + std::to_string(w.col_end) + ")";
}

}  // namespace

void check_window(const ImageField& x, const Window& w) {
  if (x.height() < 2 || x.width() < 2) {
    throw IndexError("image must be at least 2x2 to hold a cell");
  }
  if (w.row_begin >= w.row_end || w.row_end > x.height() - 1 || w.col_begin >= w.col_end ||
      w.col_end > x.width() - 1) {
    throw IndexError("window " + describe(w) + " out of range for " + std::to_string(x.height()) +
                     "x" + std::to_string(x.width()) + " image");
  }
}

void check_central_margin(const ImageField& x, const Window& w) {
  check_window(x, w);
  if (w.row_begin < 1 || w.col_begin < 1 || w.row_end + 2 > x.height() ||
      w.col_end + 2 > x.width()) {
    throw MarginError("central differences need a one-pixel margin; window " + describe(w) +
                      " touches the image border");
  }
}

void check_channel(const ImageField& x, std::size_t channel) {
  if (channel >= x.channels()) {
    throw IndexError("channel " + std::to_string(channel) + " out of range (" +
                     std::to_string(x.channels()) + " channels)");
  }
}

Window full_window(const ImageField& x, DifferenceScheme scheme) {
  if (scheme == DifferenceScheme::Forward) {
    if (x.height() < 2 || x.width() < 2) throw IndexError("image must be at least 2x2");
    return {0, x.height() - 1, 0, x.width() - 1};
  }
  if (x.height() < 4 || x.width() < 4) {
    throw MarginError("central scheme needs an image of at least 4x4");
  }
  return {1, x.height() - 2, 1, x.width() - 2};
}

}  // namespace sig2d
