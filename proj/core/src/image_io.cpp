#include "minmax_match/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include <fmt/format.h>
#include <png.h>

#include "minmax_match/error.hpp"

namespace minmax_match {
namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, fmt::format("no such file: {}", path.string()));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Token reader for the ASCII part of a PNM header; '#' starts a comment
// running to end of line.
class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::optional<unsigned long> next_uint() {
    skip_space_and_comments();
    std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000UL) return std::nullopt;
      ++pos_;
    }
    if (pos_ == start) return std::nullopt;
    return value;
  }

  std::size_t position() const noexcept { return pos_; }
  void seek(std::size_t pos) noexcept { pos_ = pos; }

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
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw Error(ErrorCode::UnsupportedFormat, "unknown image magic");
  }
  const char kind = static_cast<char>(bytes[1]);
  if (kind == '3' || kind == '6') {
    throw Error(ErrorCode::UnsupportedFormat, "color PPM images are not supported");
  }
  if (kind != '2' && kind != '5') {
    throw Error(ErrorCode::UnsupportedFormat, fmt::format("unsupported PNM variant P{}", kind));
  }

  PnmHeaderReader reader(bytes);
  reader.seek(2);
  const auto width = reader.next_uint();
  const auto height = reader.next_uint();
  const auto maxval = reader.next_uint();
  if (!width || !height || !maxval || *width == 0 || *height == 0 || *maxval == 0) {
    throw Error(ErrorCode::CorruptData, "malformed PGM header");
  }
  if (*maxval > 255) {
    throw Error(ErrorCode::UnsupportedFormat,
                fmt::format("PGM maxval {} exceeds 8-bit depth", *maxval));
  }

  const std::size_t count = *width * *height;
  std::vector<double> pixels;
  pixels.reserve(count);
  if (kind == '5') {
    // Exactly one whitespace byte separates the header from the payload.
    const std::size_t data_start = reader.position() + 1;
    if (data_start > bytes.size() || bytes.size() - data_start < count) {
      throw Error(ErrorCode::CorruptData,
                  fmt::format("truncated P5 payload: expected {} bytes", count));
    }
    for (std::size_t k = 0; k < count; ++k) {
      const std::uint8_t v = bytes[data_start + k];
      if (v > *maxval) throw Error(ErrorCode::CorruptData, "sample exceeds maxval");
      pixels.push_back(v);
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const auto v = reader.next_uint();
      if (!v) {
        throw Error(ErrorCode::CorruptData,
                    fmt::format("truncated P2 payload: got {} of {} samples", k, count));
      }
      if (*v > *maxval) throw Error(ErrorCode::CorruptData, "sample exceeds maxval");
      pixels.push_back(static_cast<double>(*v));
    }
  }
  return GrayImage(*width, *height, std::move(pixels));
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  // Inspect IHDR directly: the simplified libpng API hides bit depth.
  // Layout: signature(8) length(4) "IHDR"(4) width(4) height(4) depth(1) color(1).
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngSignature, 8) != 0) {
    throw Error(ErrorCode::UnsupportedFormat, "not a PNG file");
  }
  if (bytes.size() < 26 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
    throw Error(ErrorCode::CorruptData, "PNG is missing its IHDR chunk");
  }
  const int bit_depth = bytes[24];
  const int color_type = bytes[25];
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    throw Error(ErrorCode::UnsupportedFormat,
                fmt::format("PNG color type {} is not plain grayscale", color_type));
  }
  if (bit_depth != 8) {
    throw Error(ErrorCode::UnsupportedFormat, fmt::format("PNG bit depth {} is not 8", bit_depth));
  }

  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::CorruptData, fmt::format("PNG header: {}", image.message));
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::CorruptData, fmt::format("PNG payload: {}", message));
  }
  return GrayImage(image.width, image.height, std::vector<double>(buffer.begin(), buffer.end()));
}

GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    return decode_pgm(bytes);
  }
  throw Error(ErrorCode::UnsupportedFormat,
              fmt::format("{}: unrecognized image format", path.string()));
}

std::uint8_t quantize_pixel(double value) noexcept {
  const double clamped = std::clamp(value, 0.0, 255.0);
  return static_cast<std::uint8_t>(std::floor(clamped + 0.5));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header = fmt::format("P5\n{} {}\n255\n", img.width(), img.height());
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.size());
  for (double p : img.pixels()) out.push_back(quantize_pixel(p));
  return out;
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, fmt::format("cannot open {} for writing", path.string()));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::IoError, fmt::format("write to {} failed", path.string()));
  }
}

}  // namespace minmax_match
