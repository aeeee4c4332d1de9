#pragma once

#include <cstddef>
#include <vector>

#include "minmax_match/image.hpp"

namespace minmax_match {

/// Odd square window edge length (>= 3) and its half-width (size - 1) / 2.
class WindowSpec {
 public:
  /// Throws Error{InvalidWindow} for even sizes or sizes below 3.
  static WindowSpec of(int size);

  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] int half() const noexcept { return (size_ - 1) / 2; }
  [[nodiscard]] int area() const noexcept { return size_ * size_; }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;

 private:
  explicit WindowSpec(int size) : size_(size) {}
  int size_;
};

enum class StatsBackend {
  Naive,          ///< Direct double loop over every window; the reference.
  IntegralImage,  ///< Summed-area tables; O(1) per pixel.
};

/// Summed-area tables of an image and of its squared pixels.
///
/// `sum_at(i, j)` is the sum over all pixels with row <= i and column <= j.
/// Internally a leading zero row and column are stored so that window sums
/// need no branches.
class IntegralTables {
 public:
  IntegralTables(std::size_t width, std::size_t height);

  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t height() const noexcept { return height_; }

  [[nodiscard]] double sum_at(std::size_t i, std::size_t j) const noexcept {
    return sum_[(i + 1) * stride_ + (j + 1)];
  }
  [[nodiscard]] double sum_sq_at(std::size_t i, std::size_t j) const noexcept {
    return sum_sq_[(i + 1) * stride_ + (j + 1)];
  }

  /// Sum over rows [row0, row1) and columns [col0, col1), four lookups.
  [[nodiscard]] double window_sum(std::size_t row0, std::size_t col0, std::size_t row1,
                                  std::size_t col1) const noexcept {
    return lookup(sum_, row0, col0, row1, col1);
  }
  [[nodiscard]] double window_sum_sq(std::size_t row0, std::size_t col0, std::size_t row1,
                                     std::size_t col1) const noexcept {
    return lookup(sum_sq_, row0, col0, row1, col1);
  }

 private:
  friend IntegralTables build_integral(const GrayImage& img);

  [[nodiscard]] double lookup(const std::vector<double>& t, std::size_t row0, std::size_t col0,
                              std::size_t row1, std::size_t col1) const noexcept {
    return t[row1 * stride_ + col1] - t[row0 * stride_ + col1] - t[row1 * stride_ + col0] +
           t[row0 * stride_ + col0];
  }

  std::size_t width_;
  std::size_t height_;
  std::size_t stride_;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
};

[[nodiscard]] IntegralTables build_integral(const GrayImage& img);

struct LocalMoments {
  GrayImage mean;
  GrayImage std;
};

/// Windowed mean and population standard deviation (divisor size^2) at every
/// pixel. Windows overhanging the border see clamp-to-edge replicated pixels,
/// so outputs have the input's dimensions.
[[nodiscard]] LocalMoments local_moments(const GrayImage& img, WindowSpec window,
                                         StatsBackend backend = StatsBackend::IntegralImage);

[[nodiscard]] GrayImage local_mean(const GrayImage& img, WindowSpec window,
                                   StatsBackend backend = StatsBackend::IntegralImage);

[[nodiscard]] GrayImage local_std(const GrayImage& img, WindowSpec window,
                                  StatsBackend backend = StatsBackend::IntegralImage);

/// `img` extended by `margin` pixels on each side with replicated borders.
[[nodiscard]] GrayImage pad_replicate(const GrayImage& img, std::size_t margin);

}  // namespace minmax_match
