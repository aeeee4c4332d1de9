#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "minmax_match/image.hpp"
#include "minmax_match/local_stats.hpp"

namespace minmax_match {

/// Where to crop an input before normalization.
class CropPolicy {
 public:
  enum class Kind { Auto, None, Fixed };

  /// kJaffeDefaultCrop for 256x256 frames, no crop otherwise.
  static CropPolicy automatic() noexcept { return CropPolicy(Kind::Auto, {}); }
  static CropPolicy none() noexcept { return CropPolicy(Kind::None, {}); }
  static CropPolicy fixed(CropRect rect) noexcept { return CropPolicy(Kind::Fixed, rect); }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const CropRect& rect() const noexcept { return rect_; }
  [[nodiscard]] std::optional<CropRect> resolve(std::size_t width, std::size_t height) const;

  friend bool operator==(const CropPolicy&, const CropPolicy&) = default;

 private:
  CropPolicy(Kind kind, CropRect rect) : kind_(kind), rect_(rect) {}
  Kind kind_;
  CropRect rect_;
};

struct PipelineConfig {
  WindowSpec norm_window = WindowSpec::of(11);  ///< N: normalization window
  WindowSpec feat_window = WindowSpec::of(11);  ///< M: feature-detection window
  double alpha = 3.0;                           ///< Min-Max exponent, used by the classifier
  double sigma_floor = 1e-8;                    ///< lower bound on the normalization denominator's sigma
  CropPolicy crop = CropPolicy::automatic();
  StatsBackend backend = StatsBackend::IntegralImage;

  /// Throws Error{InvalidParams} unless alpha > 0 and sigma_floor > 0.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Row-major flattening of a feature map: non-negative local deviations.
class FeatureVector {
 public:
  FeatureVector(std::size_t rows, std::size_t cols, std::vector<double> values);
  explicit FeatureVector(const GrayImage& feature_map);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t k) const noexcept { return values_[k]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// y = (x - mu) / (6 * max(sigma, sigma_floor)) with mu, sigma over the
/// N x N window. Removes local intensity offsets and gains.
[[nodiscard]] GrayImage normalize(const GrayImage& img, const PipelineConfig& cfg);

/// Local standard deviation of the normalized image over the M x M window.
[[nodiscard]] GrayImage feature_map(const GrayImage& normalized, const PipelineConfig& cfg);

[[nodiscard]] FeatureVector detect_features(const GrayImage& normalized, const PipelineConfig& cfg);

/// Intermediate images of one preprocess run, kept for inspection.
struct PreprocessStages {
  GrayImage cropped;
  GrayImage normalized;
  GrayImage features;
};

[[nodiscard]] PreprocessStages preprocess_stages(const GrayImage& img, const PipelineConfig& cfg);

/// crop -> normalize -> detect_features.
[[nodiscard]] FeatureVector preprocess(const GrayImage& img, const PipelineConfig& cfg);

}  // namespace minmax_match
