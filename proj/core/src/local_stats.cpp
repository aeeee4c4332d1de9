#include "minmax_match/local_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "minmax_match/error.hpp"

namespace minmax_match {

WindowSpec WindowSpec::of(int size) {
  if (size < 3) {
    throw Error(ErrorCode::InvalidWindow, fmt::format("window size must be >= 3, got {}", size));
  }
  if (size % 2 == 0) {
    throw Error(ErrorCode::InvalidWindow, fmt::format("window size must be odd, got {}", size));
  }
  return WindowSpec(size);
}

IntegralTables::IntegralTables(std::size_t width, std::size_t height)
    : width_(width),
      height_(height),
      stride_(width + 1),
      sum_((width + 1) * (height + 1), 0.0),
      sum_sq_((width + 1) * (height + 1), 0.0) {}

IntegralTables build_integral(const GrayImage& img) {
  IntegralTables t(img.width(), img.height());
  const std::size_t stride = t.stride_;
  for (std::size_t i = 0; i < img.height(); ++i) {
    double row_sum = 0.0;
    double row_sum_sq = 0.0;
    const auto src = img.row(i);
    for (std::size_t j = 0; j < img.width(); ++j) {
      row_sum += src[j];
      row_sum_sq += src[j] * src[j];
      const std::size_t at = (i + 1) * stride + (j + 1);
      t.sum_[at] = t.sum_[at - stride] + row_sum;
      t.sum_sq_[at] = t.sum_sq_[at - stride] + row_sum_sq;
    }
  }
  return t;
}

GrayImage pad_replicate(const GrayImage& img, std::size_t margin) {
  const std::size_t w = img.width() + 2 * margin;
  const std::size_t h = img.height() + 2 * margin;
  std::vector<double> out(w * h);
  const auto last_row = static_cast<std::ptrdiff_t>(img.height()) - 1;
  const auto last_col = static_cast<std::ptrdiff_t>(img.width()) - 1;
  const auto m = static_cast<std::ptrdiff_t>(margin);
  for (std::size_t i = 0; i < h; ++i) {
    const auto src_i = std::clamp(static_cast<std::ptrdiff_t>(i) - m, std::ptrdiff_t{0}, last_row);
    const auto src = img.row(static_cast<std::size_t>(src_i));
    for (std::size_t j = 0; j < w; ++j) {
      const auto src_j =
          std::clamp(static_cast<std::ptrdiff_t>(j) - m, std::ptrdiff_t{0}, last_col);
      out[i * w + j] = src[static_cast<std::size_t>(src_j)];
    }
  }
  return GrayImage(w, h, std::move(out));
}

namespace {

LocalMoments moments_naive(const GrayImage& img, WindowSpec window) {
  const auto h = static_cast<std::ptrdiff_t>(img.height());
  const auto w = static_cast<std::ptrdiff_t>(img.width());
  const int half = window.half();
  const double area = window.area();
  std::vector<double> mean(img.size());
  std::vector<double> sd(img.size());

  auto sample = [&](std::ptrdiff_t r, std::ptrdiff_t c) {
    return img.at(static_cast<std::size_t>(std::clamp(r, std::ptrdiff_t{0}, h - 1)),
                  static_cast<std::size_t>(std::clamp(c, std::ptrdiff_t{0}, w - 1)));
  };

  for (std::ptrdiff_t i = 0; i < h; ++i) {
    for (std::ptrdiff_t j = 0; j < w; ++j) {
      double sum = 0.0;
      for (int k = -half; k <= half; ++k) {
        for (int l = -half; l <= half; ++l) sum += sample(i + k, j + l);
      }
      const double mu = sum / area;
      double dev = 0.0;
      for (int k = -half; k <= half; ++k) {
        for (int l = -half; l <= half; ++l) {
          const double d = sample(i + k, j + l) - mu;
          dev += d * d;
        }
      }
      const auto at = static_cast<std::size_t>(i * w + j);
      mean[at] = mu;
      sd[at] = std::sqrt(dev / area);
    }
  }
  return {GrayImage(img.width(), img.height(), std::move(mean)),
          GrayImage(img.width(), img.height(), std::move(sd))};
}

LocalMoments moments_integral(const GrayImage& img, WindowSpec window) {
  const std::size_t half = static_cast<std::size_t>(window.half());
  const std::size_t size = static_cast<std::size_t>(window.size());
  const double area = window.area();

  // Centering on the global mean shrinks the table magnitudes, which is what
  // bounds the cancellation error of E[x^2] - E[x]^2.
  const double shift =
      std::accumulate(img.pixels().begin(), img.pixels().end(), 0.0) / static_cast<double>(img.size());
  GrayImage padded = pad_replicate(img, half);
  const std::size_t pw = padded.width();
  const std::size_t ph = padded.height();
  std::vector<double> centered = std::move(padded).take_pixels();
  for (double& p : centered) p -= shift;
  const IntegralTables tables = build_integral(GrayImage(pw, ph, std::move(centered)));

  // Window variances below the tables' rounding floor cannot be told apart
  // from zero; such windows are treated as exactly flat.
  const double total_sq = tables.sum_sq_at(ph - 1, pw - 1);
  const double var_floor =
      4.0 * static_cast<double>(pw + ph) * std::numeric_limits<double>::epsilon() * total_sq / area;

  std::vector<double> mean(img.size());
  std::vector<double> sd(img.size());
  for (std::size_t i = 0; i < img.height(); ++i) {
    for (std::size_t j = 0; j < img.width(); ++j) {
      // Window centered at (i, j) in image coords spans padded rows [i, i + size).
      const double s = tables.window_sum(i, j, i + size, j + size);
      const double s2 = tables.window_sum_sq(i, j, i + size, j + size);
      const double m = s / area;
      const double var = s2 / area - m * m;
      const std::size_t at = i * img.width() + j;
      if (var <= var_floor) {
        // A flat window's mean is its center value.
        mean[at] = img.at(i, j);
        sd[at] = 0.0;
      } else {
        mean[at] = m + shift;
        sd[at] = std::sqrt(var);
      }
    }
  }
  return {GrayImage(img.width(), img.height(), std::move(mean)),
          GrayImage(img.width(), img.height(), std::move(sd))};
}

}  // namespace

LocalMoments local_moments(const GrayImage& img, WindowSpec window, StatsBackend backend) {
  switch (backend) {
    case StatsBackend::Naive: return moments_naive(img, window);
    case StatsBackend::IntegralImage: return moments_integral(img, window);
  }
  throw Error(ErrorCode::InvalidParams, "unknown statistics backend");
}

GrayImage local_mean(const GrayImage& img, WindowSpec window, StatsBackend backend) {
  return local_moments(img, window, backend).mean;
}

GrayImage local_std(const GrayImage& img, WindowSpec window, StatsBackend backend) {
  return local_moments(img, window, backend).std;
}

}  // namespace minmax_match
