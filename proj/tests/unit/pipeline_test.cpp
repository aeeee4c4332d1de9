#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "minmax_match/error.hpp"
#include "minmax_match/pipeline.hpp"
#include "support/oracles.hpp"

namespace minmax_match {
namespace {

PipelineConfig config(int n, int m, StatsBackend backend = StatsBackend::IntegralImage) {
  PipelineConfig cfg;
  cfg.norm_window = WindowSpec::of(n);
  cfg.feat_window = WindowSpec::of(m);
  cfg.crop = CropPolicy::none();
  cfg.backend = backend;
  return cfg;
}

TEST(PipelineConfig, Defaults) {
  const PipelineConfig cfg;
  EXPECT_EQ(cfg.norm_window.size(), 11);
  EXPECT_EQ(cfg.feat_window.size(), 11);
  EXPECT_EQ(cfg.alpha, 3.0);
  EXPECT_EQ(cfg.sigma_floor, 1e-8);
  EXPECT_EQ(cfg.crop, CropPolicy::automatic());
}

TEST(PipelineConfig, Validation) {
  PipelineConfig cfg;
  cfg.alpha = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.alpha = 3.0;
  cfg.sigma_floor = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(CropPolicy, AutoAppliesOnlyToJaffeFrames) {
  EXPECT_EQ(CropPolicy::automatic().resolve(256, 256), kJaffeDefaultCrop);
  EXPECT_EQ(CropPolicy::automatic().resolve(48, 48), std::nullopt);
  EXPECT_EQ(CropPolicy::none().resolve(256, 256), std::nullopt);
  const CropRect r{1, 2, 3, 4};
  EXPECT_EQ(CropPolicy::fixed(r).resolve(10, 10), r);
}

TEST(Normalize, ConstantImageIsZero) {
  const GrayImage out = normalize(GrayImage(9, 7, 77.0), config(11, 11));
  EXPECT_EQ(out, GrayImage(9, 7, 0.0));
}

TEST(Normalize, ThreePixelExample) {
  for (StatsBackend b : {StatsBackend::Naive, StatsBackend::IntegralImage}) {
    const GrayImage out = normalize(GrayImage(3, 1, std::vector<double>{0, 0, 6}), config(3, 3, b));
    // mu = 2, sigma = sqrt(8): (0 - 2) / (6 sqrt 8)
    EXPECT_NEAR(out.at(0, 1), -2.0 / (6.0 * std::sqrt(8.0)), 1e-12);
    EXPECT_NEAR(out.at(0, 1), -0.11785113019775792, 1e-12);
  }
}

TEST(Normalize, OffsetOfTenCancels) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const GrayImage x = oracle::random_image(rng, 20, 24);
    const auto cfg = config(11, 11);
    const GrayImage y = normalize(x, cfg);
    EXPECT_LE(oracle::max_abs_diff(normalize(affine_intensity(x, 1.0, 10.0), cfg).pixels(), y.pixels()), 1e-9);
    EXPECT_LE(oracle::max_abs_diff(normalize(affine_intensity(x, 1.0, -10.0), cfg).pixels(), y.pixels()), 1e-9);
  }
}

TEST(Normalize, SigmaFloorKeepsFlatRegionsFinite) {
  std::vector<double> px(30 * 30, 50.0);
  for (std::size_t k = 0; k < 30; ++k) px[k] = 200.0;  // one bright row
  const GrayImage out = normalize(GrayImage(30, 30, std::move(px)), config(5, 5));
  for (double v : out.pixels()) ASSERT_TRUE(std::isfinite(v));
  EXPECT_EQ(out.at(20, 20), 0.0);
}

TEST(DetectFeatures, ZeroInZeroOut) {
  const FeatureVector f = detect_features(GrayImage(8, 5, 0.0), config(3, 5));
  EXPECT_EQ(f.size(), 40u);
  for (double v : f.values()) EXPECT_EQ(v, 0.0);
}

TEST(DetectFeatures, NonNegativeAndRowMajor) {
  std::mt19937_64 rng(4);
  const GrayImage y = oracle::random_image(rng, 12, 7, -1.0, 1.0);
  const auto cfg = config(3, 3);
  const FeatureVector f = detect_features(y, cfg);
  const GrayImage map = feature_map(y, cfg);
  EXPECT_EQ(f.rows(), 7u);
  EXPECT_EQ(f.cols(), 12u);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 12; ++j) {
      EXPECT_EQ(f[i * 12 + j], map.at(i, j));
      EXPECT_GE(f[i * 12 + j], 0.0);
    }
}

TEST(FeatureVector, RejectsNegativeAndMisshapen) {
  EXPECT_THROW(FeatureVector(1, 2, {0.5, -0.1}), Error);
  EXPECT_THROW(FeatureVector(2, 2, {0.5}), Error);
}

TEST(Preprocess, JaffeFrameGivesCroppedLength) {
  std::mt19937_64 rng(6);
  const FeatureVector f = preprocess(oracle::random_image(rng, 256, 256), PipelineConfig{});
  EXPECT_EQ(f.size(), 11514u);
  EXPECT_EQ(f.rows(), 114u);
  EXPECT_EQ(f.cols(), 101u);
}

TEST(Preprocess, LengthIndependentOfWindows) {
  std::mt19937_64 rng(7);
  const GrayImage img = oracle::random_image(rng, 17, 13);
  for (int n : {3, 11, 21})
    for (int m : {3, 9, 21}) EXPECT_EQ(preprocess(img, config(n, m)).size(), 17u * 13u);
}

TEST(Preprocess, OffsetMinusTenInvariant) {
  std::mt19937_64 rng(8);
  const GrayImage img = oracle::random_image(rng, 256, 256);
  const PipelineConfig cfg;
  EXPECT_LE(oracle::max_abs_diff(preprocess(img, cfg).values(),
                                 preprocess(affine_intensity(img, 1.0, -10.0), cfg).values()),
            1e-7);
}

TEST(Preprocess, Deterministic) {
  std::mt19937_64 rng(9);
  const GrayImage img = oracle::random_image(rng, 30, 30);
  EXPECT_EQ(preprocess(img, config(11, 11)), preprocess(GrayImage(img), config(11, 11)));
}

TEST(Preprocess, MatchesScalarOracle) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const GrayImage img = oracle::random_image(rng, 8 + rng() % 15, 8 + rng() % 15);
    for (auto [n, m] : {std::pair{3, 3}, std::pair{11, 11}, std::pair{5, 9}}) {
      const auto expected = oracle::features(img, n, m);
      for (StatsBackend b : {StatsBackend::Naive, StatsBackend::IntegralImage}) {
        ASSERT_LE(oracle::max_abs_diff(preprocess(img, config(n, m, b)).values(), expected), 1e-9);
      }
    }
  }
}

TEST(Preprocess, AffineInvarianceOnRandomImages) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayImage x = oracle::random_image(rng, 10 + rng() % 30, 10 + rng() % 30);
    const auto cfg = config(11, 11);
    const FeatureVector base = preprocess(x, cfg);
    for (double a : {0.5, 1.0, 2.0})
      for (double b : {-10.0, 0.0, 10.0})
        ASSERT_LE(oracle::max_abs_diff(preprocess(affine_intensity(x, a, b), cfg).values(), base.values()),
                  1e-7);
  }
}

TEST(PreprocessStages, ExposesIntermediates) {
  std::mt19937_64 rng(13);
  const GrayImage img = oracle::random_image(rng, 256, 256);
  const PreprocessStages s = preprocess_stages(img, PipelineConfig{});
  EXPECT_EQ(s.cropped, crop(img, kJaffeDefaultCrop));
  EXPECT_EQ(s.normalized, normalize(s.cropped, PipelineConfig{}));
  EXPECT_EQ(FeatureVector(s.features), preprocess(img, PipelineConfig{}));
}

TEST(Preprocess, CropOutOfBoundsPropagates) {
  PipelineConfig cfg;
  cfg.crop = CropPolicy::fixed({0, 0, 50, 50});
  EXPECT_THROW((void)preprocess(GrayImage(20, 20, 1.0), cfg), Error);
}

}  // namespace
}  // namespace minmax_match
