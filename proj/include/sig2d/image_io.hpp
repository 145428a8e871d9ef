#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sig2d/image.hpp"

namespace sig2d {

/// Reads an 8-bit PNG or binary PPM (P6) into a 3-channel field normalized
/// by 1/255. Grayscale PNGs are replicated to three channels and alpha is
/// dropped. Throws IoError naming the path on any failure.
ImageField load_image(const std::string& path);

/// Decodes an in-memory P6 image. `context` prefixes error messages.
ImageField decode_ppm(std::span<const std::uint8_t> bytes, const std::string& context = "<memory>");

/// Encodes a 3-channel field as P6, rounding value * 255 to the nearest byte.
std::vector<std::uint8_t> encode_ppm(const ImageField& x);
void save_ppm(const ImageField& x, const std::string& path);

}  // namespace sig2d
