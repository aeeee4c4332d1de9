#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace minmax_match {

/// Single-channel image of real-valued pixels stored row-major.
///
/// Rows are indexed by `i` (0..height-1), columns by `j` (0..width-1).
/// Pixels decoded from 8-bit files keep their integer values as doubles;
/// every later stage works on reals. Construction validates the shape and
/// rejects non-finite values, so a GrayImage is always well formed.
class GrayImage {
 public:
  GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels);
  /// Image filled with `value`.
  GrayImage(std::size_t width, std::size_t height, double value = 0.0);

  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }

  [[nodiscard]] double at(std::size_t row, std::size_t col) const noexcept {
    return pixels_[row * width_ + col];
  }
  [[nodiscard]] std::span<const double> pixels() const noexcept { return pixels_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(pixels_).subspan(i * width_, width_);
  }

  /// Releases the pixel buffer; the image is left empty and must not be used.
  [[nodiscard]] std::vector<double> take_pixels() && noexcept { return std::move(pixels_); }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> pixels_;
};

struct CropRect {
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

/// Crop used for 256x256 JAFFE frames when no explicit rectangle is given:
/// a 101 (w) x 114 (h) face window.
inline constexpr CropRect kJaffeDefaultCrop{70, 78, 114, 101};

/// Throws Error{OutOfBounds} if `rect` is empty or leaves the image.
[[nodiscard]] GrayImage crop(const GrayImage& img, const CropRect& rect);

/// Maps every pixel p to gain * p + offset without clamping.
/// Throws Error{InvalidGain} when gain <= 0.
[[nodiscard]] GrayImage affine_intensity(const GrayImage& img, double gain, double offset);

/// Linear stretch of [min, max] onto [0, 255] for viewing intermediate
/// real-valued maps. A constant image maps to zeros.
[[nodiscard]] GrayImage rescale_for_display(const GrayImage& img);

}  // namespace minmax_match
