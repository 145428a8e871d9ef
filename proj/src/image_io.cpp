#include "sig2d/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace sig2d {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PnmHeaderReader {
 public:
  PnmHeaderReader(std::span<const std::uint8_t> bytes, const std::string& context)
      : bytes_(bytes), context_(context) {}

  std::size_t next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw IoError(context_ + ": malformed PPM header");
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1u << 24)) throw IoError(context_ + ": PPM header value too large");
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw IoError(context_ + ": malformed PPM header");
    }
    return pos_ + 1;
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  const std::string& context_;
  std::size_t pos_ = 0;
};

ImageField load_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError(path + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw IoError(path + ": unsupported bit depth (only 8-bit PNG is supported)");
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  png_color black{0, 0, 0};
  if (!png_image_finish_read(&image, &black, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path + ": " + msg);
  }
  ImageField x(image.height, image.width, 3);
  auto values = x.values();
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = buffer[j] / 255.0;
  return x;
}

}  // namespace

ImageField decode_ppm(std::span<const std::uint8_t> bytes, const std::string& context) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw IoError(context + ": not a binary PPM (P6)");
  }
  PnmHeaderReader header(bytes, context);
  header.skip(2);
  const std::size_t width = header.next_int();
  const std::size_t height = header.next_int();
  const std::size_t maxval = header.next_int();
  if (width == 0 || height == 0) throw IoError(context + ": empty image");
  if (maxval != 255) {
    throw IoError(context + ": unsupported bit depth (maxval " + std::to_string(maxval) +
                  ", only 255 is supported)");
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t needed = width * height * 3;
  if (bytes.size() < offset + needed) {
    throw IoError(context + ": truncated PPM raster (" + std::to_string(bytes.size() - offset) +
                  " of " + std::to_string(needed) + " bytes)");
  }
  ImageField x(height, width, 3);
  auto values = x.values();
  for (std::size_t j = 0; j < needed; ++j) values[j] = bytes[offset + j] / 255.0;
  return x;
}

ImageField load_image(const std::string& path) {
  std::vector<std::uint8_t> bytes = read_file(path);
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, bytes.begin())) {
    return load_png(path);
  }
  return decode_ppm(bytes, path);
}

std::vector<std::uint8_t> encode_ppm(const ImageField& x) {
  if (x.channels() != 3) throw DataError("PPM output needs 3 channels");
  const std::string header =
      "P6\n" + std::to_string(x.width()) + " " + std::to_string(x.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + x.size());
  for (double v : x.values()) {
    out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  return out;
}

void save_ppm(const ImageField& x, const std::string& path) {
  const auto bytes = encode_ppm(x);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace sig2d
