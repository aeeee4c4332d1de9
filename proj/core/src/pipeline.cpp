#include "minmax_match/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "minmax_match/error.hpp"

namespace minmax_match {

std::optional<CropRect> CropPolicy::resolve(std::size_t width, std::size_t height) const {
  switch (kind_) {
    case Kind::None: return std::nullopt;
    case Kind::Fixed: return rect_;
    case Kind::Auto:
      if (width == 256 && height == 256) return kJaffeDefaultCrop;
      return std::nullopt;
  }
  return std::nullopt;
}

void PipelineConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidParams, fmt::format("alpha must be > 0, got {}", alpha));
  }
  if (!(sigma_floor > 0.0) || !std::isfinite(sigma_floor)) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("sigma_floor must be > 0, got {}", sigma_floor));
  }
}

FeatureVector::FeatureVector(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("feature length {} does not match {}x{}", values_.size(), rows_, cols_));
  }
  if (!std::all_of(values_.begin(), values_.end(),
                   [](double v) { return v >= 0.0 && std::isfinite(v); })) {
    throw Error(ErrorCode::NegativeInput, "feature values must be finite and non-negative");
  }
}

FeatureVector::FeatureVector(const GrayImage& feature_map)
    : FeatureVector(feature_map.height(), feature_map.width(),
                    std::vector<double>(feature_map.pixels().begin(), feature_map.pixels().end())) {}

GrayImage normalize(const GrayImage& img, const PipelineConfig& cfg) {
  cfg.validate();
  const LocalMoments m = local_moments(img, cfg.norm_window, cfg.backend);
  std::vector<double> out(img.size());
  const auto x = img.pixels();
  const auto mu = m.mean.pixels();
  const auto sigma = m.std.pixels();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (x[k] - mu[k]) / (6.0 * std::max(sigma[k], cfg.sigma_floor));
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage feature_map(const GrayImage& normalized, const PipelineConfig& cfg) {
  return local_std(normalized, cfg.feat_window, cfg.backend);
}

FeatureVector detect_features(const GrayImage& normalized, const PipelineConfig& cfg) {
  return FeatureVector(feature_map(normalized, cfg));
}

PreprocessStages preprocess_stages(const GrayImage& img, const PipelineConfig& cfg) {
  const auto rect = cfg.crop.resolve(img.width(), img.height());
  GrayImage cropped = rect ? crop(img, *rect) : img;
  GrayImage normalized = normalize(cropped, cfg);
  GrayImage features = feature_map(normalized, cfg);
  return {std::move(cropped), std::move(normalized), std::move(features)};
}

FeatureVector preprocess(const GrayImage& img, const PipelineConfig& cfg) {
  const auto rect = cfg.crop.resolve(img.width(), img.height());
  if (rect) return detect_features(normalize(crop(img, *rect), cfg), cfg);
  return detect_features(normalize(img, cfg), cfg);
}

}  // namespace minmax_match
