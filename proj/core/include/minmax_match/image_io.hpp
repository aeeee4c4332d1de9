#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "minmax_match/image.hpp"

namespace minmax_match {

/// Reads an 8-bit grayscale PGM (P2 or P5, maxval <= 255) or an 8-bit
/// grayscale PNG. Format is chosen by magic bytes, not by extension.
///
/// Errors: FileNotFound, UnsupportedFormat (color, >8-bit, unknown magic),
/// CorruptData (bad header, truncated payload, sample above maxval).
[[nodiscard]] GrayImage load_image(const std::filesystem::path& path);

/// Writes a binary P5 PGM. Pixels are clamped to [0, 255] and rounded
/// half-up. Throws Error{IoError} if the file cannot be written.
void save_image(const GrayImage& img, const std::filesystem::path& path);

[[nodiscard]] GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
[[nodiscard]] GrayImage decode_png(std::span<const std::uint8_t> bytes);
[[nodiscard]] std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

/// The clamp + round-half-up rule used by encode_pgm.
[[nodiscard]] std::uint8_t quantize_pixel(double value) noexcept;

}  // namespace minmax_match
