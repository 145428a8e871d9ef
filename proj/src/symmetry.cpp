#include "sig2d/symmetry.hpp"

namespace sig2d {

namespace {

// Each element as a signed permutation matrix acting on centered
// coordinates (u, v) = (k - (K-1)/2, l - (L-1)/2).
struct Matrix2 {
  int a, b, c, d;  // [[a, b], [c, d]]
  bool operator==(const Matrix2&) const = default;
};

constexpr Matrix2 matrix_of(D4Element g) {
  switch (g) {
    case D4Element::Id: return {1, 0, 0, 1};
    case D4Element::Rot90: return {0, -1, 1, 0};
    case D4Element::Rot180: return {-1, 0, 0, -1};
    case D4Element::Rot270: return {0, 1, -1, 0};
    case D4Element::FlipH: return {1, 0, 0, -1};
    case D4Element::FlipV: return {-1, 0, 0, 1};
    case D4Element::Transpose: return {0, 1, 1, 0};
    case D4Element::AntiTranspose: return {0, -1, -1, 0};
  }
  return {1, 0, 0, 1};
}

constexpr Matrix2 multiply(const Matrix2& p, const Matrix2& q) {
  return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d, p.c * q.a + p.d * q.c,
          p.c * q.b + p.d * q.d};
}

D4Element element_of(const Matrix2& m) {
  for (D4Element g : kD4Elements) {
    if (matrix_of(g) == m) return g;
  }
  throw Error("matrix is not a D4 element");
}

}  // namespace

std::string_view element_name(D4Element g) {
  switch (g) {
    case D4Element::Id: return "id";
    case D4Element::Rot90: return "rot90";
    case D4Element::Rot180: return "rot180";
    case D4Element::Rot270: return "rot270";
    case D4Element::FlipH: return "fliph";
    case D4Element::FlipV: return "flipv";
    case D4Element::Transpose: return "transpose";
    case D4Element::AntiTranspose: return "antitranspose";
  }
  return "?";
}

D4Element compose(D4Element second, D4Element first) {
  return element_of(multiply(matrix_of(second), matrix_of(first)));
}

D4Element inverse(D4Element g) {
  const Matrix2 m = matrix_of(g);
  return element_of({m.a, m.c, m.b, m.d});  // orthogonal: inverse is transpose
}

ImageField apply_d4(const ImageField& x, D4Element g) {
  const Matrix2 m = matrix_of(g);
  const bool swaps = m.a == 0;
  const std::size_t h = x.height();
  const std::size_t w = x.width();
  const std::size_t oh = swaps ? w : h;
  const std::size_t ow = swaps ? h : w;
  const std::size_t d = x.channels();
  ImageField out(oh, ow, d);
  // Doubled centered coordinates keep everything integral.
  const long hm = static_cast<long>(h) - 1, wm = static_cast<long>(w) - 1;
  const long ohm = static_cast<long>(oh) - 1, owm = static_cast<long>(ow) - 1;
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t l = 0; l < w; ++l) {
      const long u = 2 * static_cast<long>(k) - hm;
      const long v = 2 * static_cast<long>(l) - wm;
      const long u2 = m.a * u + m.b * v;
      const long v2 = m.c * u + m.d * v;
      const auto k2 = static_cast<std::size_t>((u2 + ohm) / 2);
      const auto l2 = static_cast<std::size_t>((v2 + owm) / 2);
      for (std::size_t i = 0; i < d; ++i) out(k2, l2, i) = x(k, l, i);
    }
  }
  return out;
}

std::vector<double> orientation_average(
    const ImageField& x, const std::function<std::vector<double>(const ImageField&)>& f) {
  std::vector<double> sum;
  for (D4Element g : kD4Elements) {
    std::vector<double> v = f(apply_d4(x, g));
    if (sum.empty()) {
      sum = std::move(v);
    } else {
      if (v.size() != sum.size()) throw DataError("orientation_average: inconsistent sizes");
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += v[j];
    }
  }
  for (double& s : sum) s /= static_cast<double>(kD4Elements.size());
  return sum;
}

SignatureVector symmetrized_signature(const ImageField& x, DifferenceScheme scheme) {
  SignatureVector out;
  out.channels = x.channels();
  out.entries = orientation_average(x, [scheme](const ImageField& y) {
    return signature_vector(y, full_window(y, scheme), scheme).entries;
  });
  return out;
}

}  // namespace sig2d
