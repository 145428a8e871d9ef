#pragma once

#include <array>
#include <functional>
#include <string_view>
#include <vector>

#include "sig2d/image.hpp"
#include "sig2d/sigcore.hpp"

namespace sig2d {

/// The 8 symmetries of the square. Conventions: row 0 is the top of the
/// image, Rot90 turns the picture counterclockwise, FlipH reverses columns,
/// FlipV reverses rows, Transpose swaps (k, l), AntiTranspose reflects about
/// the other diagonal.
enum class D4Element { Id, Rot90, Rot180, Rot270, FlipH, FlipV, Transpose, AntiTranspose };

inline constexpr std::array<D4Element, 8> kD4Elements = {
    D4Element::Id,    D4Element::Rot90, D4Element::Rot180,    D4Element::Rot270,
    D4Element::FlipH, D4Element::FlipV, D4Element::Transpose, D4Element::AntiTranspose};

std::string_view element_name(D4Element g);

/// The element acting as `first` followed by `second`.
D4Element compose(D4Element second, D4Element first);
D4Element inverse(D4Element g);

/// Transformed copy of x. Rot90, Rot270, Transpose and AntiTranspose swap the
/// height and width.
ImageField apply_d4(const ImageField& x, D4Element g);

/// Entrywise mean of f(g . x) over the 8 elements, summed in kD4Elements
/// order.
std::vector<double> orientation_average(
    const ImageField& x, const std::function<std::vector<double>(const ImageField&)>& f);

/// Mean of signature_vector(g . x, full window) over the group.
SignatureVector symmetrized_signature(const ImageField& x,
                                      DifferenceScheme scheme = DifferenceScheme::Forward);

}  // namespace sig2d
