#include "sig2d/sigcore.hpp"

#include <string>

namespace sig2d {

namespace {

inline double box(const ImageField& x, std::size_t i, std::size_t k, std::size_t l) {
  return x(k + 1, l + 1, i) - x(k, l + 1, i) - x(k + 1, l, i) + x(k, l, i);
}

inline double hat(const ImageField& x, std::size_t i, std::size_t k, std::size_t l,
                  DifferenceScheme scheme) {
  if (scheme == DifferenceScheme::Forward) {
    return (x(k + 1, l, i) - x(k, l, i)) * (x(k, l + 1, i) - x(k, l, i));
  }
  return 0.5 * (x(k + 1, l, i) - x(k - 1, l, i)) * 0.5 * (x(k, l + 1, i) - x(k, l - 1, i));
}

bool inner_is_hat(SignatureKind kind) {
  return kind == SignatureKind::SecondHatHat || kind == SignatureKind::SecondMixHat1;
}

bool outer_is_hat(SignatureKind kind) {
  return kind == SignatureKind::SecondHatHat || kind == SignatureKind::SecondMix1Hat;
}

void validate_second(const ImageField& x, SignatureKind kind, std::size_t inner_channel,
                     std::size_t outer_channel, const Window& w, DifferenceScheme scheme) {
  if (order(kind) != 2) {
    throw ParameterError("second-order increment requested for first-order kind '" +
                         std::string(kind_name(kind)) + "'");
  }
  check_window(x, w);
  check_channel(x, inner_channel);
  check_channel(x, outer_channel);
  if (scheme == DifferenceScheme::Central && (inner_is_hat(kind) || outer_is_hat(kind))) {
    check_central_margin(x, w);
  }
}

}  // namespace

std::string_view kind_name(SignatureKind kind) {
  switch (kind) {
    case SignatureKind::First12: return "box";
    case SignatureKind::FirstHat: return "hat";
    case SignatureKind::Second1122: return "boxbox";
    case SignatureKind::SecondHatHat: return "hathat";
    case SignatureKind::SecondMix1Hat: return "boxhat";
    case SignatureKind::SecondMixHat1: return "hatbox";
  }
  return "?";
}

double rect_increment(const ImageField& x, std::size_t channel, const Window& w) {
  check_window(x, w);
  check_channel(x, channel);
  return x(w.row_end, w.col_end, channel) - x(w.row_begin, w.col_end, channel) -
         x(w.row_end, w.col_begin, channel) + x(w.row_begin, w.col_begin, channel);
}

double sig_first_12(const ImageField& x, std::size_t channel, const Window& w) {
  check_window(x, w);
  check_channel(x, channel);
  double sum = 0.0;
  for (std::size_t k = w.row_begin; k < w.row_end; ++k) {
    for (std::size_t l = w.col_begin; l < w.col_end; ++l) sum += box(x, channel, k, l);
  }
  return sum;
}

double sig_first_hat(const ImageField& x, std::size_t channel, const Window& w,
                     DifferenceScheme scheme) {
  check_window(x, w);
  check_channel(x, channel);
  if (scheme == DifferenceScheme::Central) check_central_margin(x, w);
  double sum = 0.0;
  for (std::size_t k = w.row_begin; k < w.row_end; ++k) {
    for (std::size_t l = w.col_begin; l < w.col_end; ++l) sum += hat(x, channel, k, l, scheme);
  }
  return sum;
}

double sig_second(const ImageField& x, SignatureKind kind, std::size_t inner_channel,
                  std::size_t outer_channel, const Window& w, DifferenceScheme scheme) {
  validate_second(x, kind, inner_channel, outer_channel, w, scheme);
  const bool ihat = inner_is_hat(kind);
  const bool ohat = outer_is_hat(kind);
  const std::size_t cols = w.cell_cols();

  // above[c] = sum of inner over rows already visited and columns <= c.
  std::vector<double> above(cols, 0.0);
  double total = 0.0;
  for (std::size_t k = w.row_begin; k < w.row_end; ++k) {
    for (std::size_t c = 1; c < cols; ++c) {
      const std::size_t l = w.col_begin + c;
      const double outer =
          ohat ? hat(x, outer_channel, k, l, scheme) : box(x, outer_channel, k, l);
      total += outer * above[c - 1];
    }
    double run = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t l = w.col_begin + c;
      run += ihat ? hat(x, inner_channel, k, l, scheme) : box(x, inner_channel, k, l);
      above[c] += run;
    }
  }
  return total;
}

double brute_force_second(const ImageField& x, SignatureKind kind, std::size_t inner_channel,
                          std::size_t outer_channel, const Window& w, DifferenceScheme scheme) {
  validate_second(x, kind, inner_channel, outer_channel, w, scheme);
  const bool central = scheme == DifferenceScheme::Central;

  auto differential = [&](bool use_hat, std::size_t i, std::size_t k, std::size_t l) {
    if (!use_hat) {
      return x(k + 1, l + 1, i) - x(k, l + 1, i) - x(k + 1, l, i) + x(k, l, i);
    }
    const double dk = central ? (x(k + 1, l, i) - x(k - 1, l, i)) / 2 : x(k + 1, l, i) - x(k, l, i);
    const double dl = central ? (x(k, l + 1, i) - x(k, l - 1, i)) / 2 : x(k, l + 1, i) - x(k, l, i);
    return dk * dl;
  };

  double total = 0.0;
  for (std::size_t k2 = w.row_begin; k2 < w.row_end; ++k2) {
    for (std::size_t l2 = w.col_begin; l2 < w.col_end; ++l2) {
      double inner = 0.0;
      for (std::size_t k1 = w.row_begin; k1 < k2; ++k1) {
        for (std::size_t l1 = w.col_begin; l1 < l2; ++l1) {
          inner += differential(inner_is_hat(kind), inner_channel, k1, l1);
        }
      }
      total += inner * differential(outer_is_hat(kind), outer_channel, k2, l2);
    }
  }
  return total;
}

SignatureVector signature_vector(const ImageField& x, const Window& w, DifferenceScheme scheme) {
  check_window(x, w);
  if (scheme == DifferenceScheme::Central) check_central_margin(x, w);
  SignatureVector out;
  out.channels = x.channels();
  out.entries.assign(kAllKinds.size() * x.channels(), 0.0);
  for (std::size_t i = 0; i < x.channels(); ++i) {
    out.at(SignatureKind::First12, i) = sig_first_12(x, i, w);
    out.at(SignatureKind::FirstHat, i) = sig_first_hat(x, i, w, scheme);
    for (SignatureKind kind : kSecondOrderKinds) {
      out.at(kind, i) = sig_second(x, kind, i, i, w, scheme);
    }
  }
  return out;
}

}  // namespace sig2d
