#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>

#include "sig2d/image.hpp"
#include "sig2d/random.hpp"
#include "sig2d/sigcore.hpp"

namespace sig2d::testing {

inline ImageField random_image(std::size_t h, std::size_t w, std::uint64_t seed,
                               std::size_t channels = 3) {
  Rng rng(seed);
  ImageField x(h, w, channels);
  for (double& v : x.values()) v = uniform01(rng);
  return x;
}

inline ImageField from_function(std::size_t h, std::size_t w,
                                const std::function<double(double, double)>& f,
                                std::size_t channels = 1) {
  ImageField x(h, w, channels);
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t l = 0; l < w; ++l) {
      for (std::size_t i = 0; i < channels; ++i) x(k, l, i) = f(double(k), double(l));
    }
  }
  return x;
}

// Cell differentials written out from their definitions, independent of the
// library's helpers.
inline double oracle_box(const ImageField& x, std::size_t i, std::size_t k, std::size_t l) {
  return (x(k + 1, l + 1, i) - x(k + 1, l, i)) - (x(k, l + 1, i) - x(k, l, i));
}

inline double oracle_hat(const ImageField& x, std::size_t i, std::size_t k, std::size_t l,
                         bool central) {
  if (central) {
    return ((x(k + 1, l, i) - x(k - 1, l, i)) / 2.0) * ((x(k, l + 1, i) - x(k, l - 1, i)) / 2.0);
  }
  return (x(k + 1, l, i) - x(k, l, i)) * (x(k, l + 1, i) - x(k, l, i));
}

// Enumerates every ordered pair of cells in the window and keeps those with
// k1 < k2 and l1 < l2.
inline double oracle_second(const ImageField& x, SignatureKind kind, std::size_t i1,
                            std::size_t i2, const Window& w, bool central) {
  const bool inner_hat = kind == SignatureKind::SecondHatHat || kind == SignatureKind::SecondMixHat1;
  const bool outer_hat = kind == SignatureKind::SecondHatHat || kind == SignatureKind::SecondMix1Hat;
  double total = 0.0;
  for (std::size_t k1 = w.row_begin; k1 < w.row_end; ++k1)
    for (std::size_t l1 = w.col_begin; l1 < w.col_end; ++l1)
      for (std::size_t k2 = w.row_begin; k2 < w.row_end; ++k2)
        for (std::size_t l2 = w.col_begin; l2 < w.col_end; ++l2) {
          if (!(k1 < k2 && l1 < l2)) continue;
          const double a = inner_hat ? oracle_hat(x, i1, k1, l1, central) : oracle_box(x, i1, k1, l1);
          const double b = outer_hat ? oracle_hat(x, i2, k2, l2, central) : oracle_box(x, i2, k2, l2);
          total += a * b;
        }
  return total;
}

struct ScalingSlopes {
  double first = 0.0;
  double second = 0.0;
};

// Least-squares slope of log(magnitude) against log(h) for windows of side
// h in {1/4, 1/8, 1/16} (normalized coordinates) anchored at (1/2, 1/2) on
// x(k, l) = sin(k / K) sin(l / L). Magnitudes sum the absolute values of the
// first-order (resp. second-order diagonal) increments.
inline ScalingSlopes scaling_slopes(std::size_t resolution = 256) {
  const double n = static_cast<double>(resolution);
  const ImageField x = from_function(resolution + 1, resolution + 1, [n](double k, double l) {
    return std::sin(k / n) * std::sin(l / n);
  });
  const std::array<double, 3> hs = {1.0 / 4, 1.0 / 8, 1.0 / 16};
  std::array<double, 3> lh{}, lf{}, ls{};
  for (std::size_t j = 0; j < hs.size(); ++j) {
    const auto begin = resolution / 2;
    const auto side = static_cast<std::size_t>(hs[j] * n);
    const Window w{begin, begin + side, begin, begin + side};
    lh[j] = std::log(hs[j]);
    lf[j] = std::log(std::abs(sig_first_12(x, 0, w)) + std::abs(sig_first_hat(x, 0, w)));
    double second = 0.0;
    for (SignatureKind kind : kSecondOrderKinds) second += std::abs(sig_second(x, kind, 0, 0, w));
    ls[j] = std::log(second);
  }
  auto slope = [&](const std::array<double, 3>& y) {
    double mx = 0, my = 0;
    for (std::size_t j = 0; j < 3; ++j) { mx += lh[j] / 3; my += y[j] / 3; }
    double sxy = 0, sxx = 0;
    for (std::size_t j = 0; j < 3; ++j) { sxy += (lh[j] - mx) * (y[j] - my); sxx += (lh[j] - mx) * (lh[j] - mx); }
    return sxy / sxx;
  };
  return {slope(lf), slope(ls)};
}

}  // namespace sig2d::testing
