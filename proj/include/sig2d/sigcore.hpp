#pragma once

// Discrete first- and second-order 2-d signature increments of an image
// window.
//
// Two cell-level differentials are used throughout. For the cell with
// top-left pixel (k, l):
//
//   box(k, l) = x[k+1][l+1] - x[k][l+1] - x[k+1][l] + x[k][l]
//   hat(k, l) = dk(k, l) * dl(k, l)
//
// where dk, dl are forward differences (x[k+1][l] - x[k][l], ...) or half
// central differences ((x[k+1][l] - x[k-1][l]) / 2, ...).
//
// Second-order increments sum outer(k2, l2) * inner(k1, l1) over cell pairs
// with k1 < k2 and l1 < l2 (strict in both axes).

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "sig2d/image.hpp"

namespace sig2d {

enum class SignatureKind {
  First12,        // sum of box
  FirstHat,       // sum of hat
  Second1122,     // inner box, outer box
  SecondHatHat,   // inner hat, outer hat
  SecondMix1Hat,  // inner box, outer hat
  SecondMixHat1,  // inner hat, outer box
};

inline constexpr std::array<SignatureKind, 6> kAllKinds = {
    SignatureKind::First12,      SignatureKind::FirstHat,      SignatureKind::Second1122,
    SignatureKind::SecondHatHat, SignatureKind::SecondMix1Hat, SignatureKind::SecondMixHat1};

inline constexpr std::array<SignatureKind, 4> kSecondOrderKinds = {
    SignatureKind::Second1122, SignatureKind::SecondHatHat, SignatureKind::SecondMix1Hat,
    SignatureKind::SecondMixHat1};

constexpr int order(SignatureKind kind) {
  return kind == SignatureKind::First12 || kind == SignatureKind::FirstHat ? 1 : 2;
}

/// Short stable name used in feature column headers ("box", "hathat", ...).
std::string_view kind_name(SignatureKind kind);

/// 6 kinds x d channels, kind-major: entry (kind, channel) is at
/// index(kind) * channels + channel. For RGB that is 18 entries.
struct SignatureVector {
  std::size_t channels = 3;
  std::vector<double> entries;

  double at(SignatureKind kind, std::size_t channel) const {
    return entries[static_cast<std::size_t>(kind) * channels + channel];
  }
  double& at(SignatureKind kind, std::size_t channel) {
    return entries[static_cast<std::size_t>(kind) * channels + channel];
  }
};

/// Corner formula x[k^][l^] - x[k][l^] - x[k^][l] + x[k][l].
double rect_increment(const ImageField& x, std::size_t channel, const Window& w);

/// Double sum of unit-cell box increments over the window. Telescopes to
/// rect_increment.
double sig_first_12(const ImageField& x, std::size_t channel, const Window& w);

double sig_first_hat(const ImageField& x, std::size_t channel, const Window& w,
                     DifferenceScheme scheme = DifferenceScheme::Forward);

/// Second-order increment via a running 2-d prefix of the inner
/// differential, O(#cells). `kind` must be second order.
double sig_second(const ImageField& x, SignatureKind kind, std::size_t inner_channel,
                  std::size_t outer_channel, const Window& w,
                  DifferenceScheme scheme = DifferenceScheme::Forward);

/// Literal quadruple loop over (k1, l1, k2, l2); O(#cells^2). Reference for
/// sig_second, intended for windows up to a few thousand cells.
double brute_force_second(const ImageField& x, SignatureKind kind, std::size_t inner_channel,
                          std::size_t outer_channel, const Window& w,
                          DifferenceScheme scheme = DifferenceScheme::Forward);

/// Both first-order kinds and the four diagonal (i1 = i2) second-order kinds
/// for every channel.
SignatureVector signature_vector(const ImageField& x, const Window& w,
                                 DifferenceScheme scheme = DifferenceScheme::Forward);

}  // namespace sig2d
