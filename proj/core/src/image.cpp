#include "minmax_match/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "minmax_match/error.hpp"

namespace minmax_match {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("image dimensions must be positive, got {}x{}", width_, height_));
  }
  if (pixels_.size() != width_ * height_) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("pixel count {} does not match {}x{}", pixels_.size(), width_, height_));
  }
  if (!std::all_of(pixels_.begin(), pixels_.end(), [](double p) { return std::isfinite(p); })) {
    throw Error(ErrorCode::InvalidParams, "image contains non-finite pixel values");
  }
}

GrayImage::GrayImage(std::size_t width, std::size_t height, double value)
    : GrayImage(width, height, std::vector<double>(width * height, value)) {}

GrayImage crop(const GrayImage& img, const CropRect& rect) {
  if (rect.height == 0 || rect.width == 0 || rect.top + rect.height > img.height() ||
      rect.left + rect.width > img.width()) {
    throw Error(ErrorCode::OutOfBounds,
                fmt::format("crop rect (top={}, left={}, h={}, w={}) exceeds {}x{} image", rect.top,
                            rect.left, rect.height, rect.width, img.width(), img.height()));
  }
  std::vector<double> out;
  out.reserve(rect.width * rect.height);
  for (std::size_t i = 0; i < rect.height; ++i) {
    auto src = img.row(rect.top + i).subspan(rect.left, rect.width);
    out.insert(out.end(), src.begin(), src.end());
  }
  return GrayImage(rect.width, rect.height, std::move(out));
}

GrayImage affine_intensity(const GrayImage& img, double gain, double offset) {
  if (!(gain > 0.0)) {
    throw Error(ErrorCode::InvalidGain, fmt::format("gain must be > 0, got {}", gain));
  }
  std::vector<double> out(img.pixels().begin(), img.pixels().end());
  for (double& p : out) p = gain * p + offset;
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage rescale_for_display(const GrayImage& img) {
  const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
  const double range = *hi - *lo;
  std::vector<double> out(img.size(), 0.0);
  if (range > 0.0) {
    const double low = *lo;
    std::transform(img.pixels().begin(), img.pixels().end(), out.begin(),
                   [&](double p) { return (p - low) * 255.0 / range; });
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

}  // namespace minmax_match
