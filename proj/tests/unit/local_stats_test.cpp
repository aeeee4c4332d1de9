#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "minmax_match/error.hpp"
#include "minmax_match/local_stats.hpp"
#include "support/oracles.hpp"

namespace minmax_match {
namespace {

constexpr StatsBackend kBackends[] = {StatsBackend::Naive, StatsBackend::IntegralImage};

const GrayImage kOneToNine(3, 3, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});

TEST(WindowSpec, OddSizesOnly) {
  EXPECT_EQ(WindowSpec::of(3).half(), 1);
  EXPECT_EQ(WindowSpec::of(11).half(), 5);
  EXPECT_EQ(WindowSpec::of(21).area(), 441);
  for (int bad : {-1, 0, 1, 2, 4, 10}) {
    try {
      (void)WindowSpec::of(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidWindow);
    }
  }
}

TEST(BuildIntegral, PrefixSums) {
  const IntegralTables t = build_integral(GrayImage(2, 2, std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(t.sum_at(0, 0), 1);
  EXPECT_EQ(t.sum_at(0, 1), 3);
  EXPECT_EQ(t.sum_at(1, 0), 4);
  EXPECT_EQ(t.sum_at(1, 1), 10);
  EXPECT_EQ(t.sum_sq_at(0, 0), 1);
  EXPECT_EQ(t.sum_sq_at(0, 1), 5);
  EXPECT_EQ(t.sum_sq_at(1, 0), 10);
  EXPECT_EQ(t.sum_sq_at(1, 1), 30);
  EXPECT_EQ(t.window_sum(0, 0, 2, 2), 10);
  EXPECT_EQ(t.window_sum(1, 1, 2, 2), 4);
  EXPECT_EQ(t.window_sum_sq(0, 1, 2, 2), 20);
}

TEST(BuildIntegral, AnyRectangleFromFourLookups) {
  std::mt19937_64 rng(5);
  const GrayImage img = oracle::random_image(rng, 13, 9);
  const IntegralTables t = build_integral(img);
  for (std::size_t r0 = 0; r0 < 9; ++r0)
    for (std::size_t r1 = r0 + 1; r1 <= 9; ++r1)
      for (std::size_t c0 = 0; c0 < 13; c0 += 3)
        for (std::size_t c1 = c0 + 1; c1 <= 13; c1 += 2) {
          double direct = 0.0;
          for (std::size_t i = r0; i < r1; ++i)
            for (std::size_t j = c0; j < c1; ++j) direct += img.at(i, j);
          ASSERT_NEAR(t.window_sum(r0, c0, r1, c1), direct, 1e-9);
        }
}

TEST(LocalMean, Examples) {
  for (StatsBackend b : kBackends) {
    const GrayImage mean = local_mean(kOneToNine, WindowSpec::of(3), b);
    EXPECT_NEAR(mean.at(1, 1), 5.0, 1e-12);
    // Clamp-padded corner window: 1 1 2 / 1 1 2 / 4 4 5.
    EXPECT_NEAR(mean.at(0, 0), 21.0 / 9.0, 1e-12);
    EXPECT_NEAR(mean.at(0, 0), oracle::window_mean(oracle::grid_of(kOneToNine), 0, 0, 3), 1e-12);
    EXPECT_EQ(local_mean(GrayImage(6, 4, 42.5), WindowSpec::of(5), b), GrayImage(6, 4, 42.5));
  }
}

TEST(LocalStd, Examples) {
  const GrayImage line(3, 1, std::vector<double>{0, 0, 6});
  for (StatsBackend b : kBackends) {
    const LocalMoments m = local_moments(line, WindowSpec::of(3), b);
    EXPECT_NEAR(m.mean.at(0, 1), 2.0, 1e-12);
    EXPECT_NEAR(m.std.at(0, 1), std::sqrt(8.0), 1e-12);
    EXPECT_NEAR(m.std.at(0, 1), oracle::window_std(oracle::grid_of(line), 0, 1, 3), 1e-12);
    EXPECT_EQ(local_std(GrayImage(7, 3, 200.0), WindowSpec::of(11), b), GrayImage(7, 3, 0.0));
  }
}

TEST(LocalStats, WindowLargerThanImage) {
  std::mt19937_64 rng(1);
  const GrayImage img = oracle::random_image(rng, 4, 2);
  const auto g = oracle::grid_of(img);
  for (StatsBackend b : kBackends) {
    const LocalMoments m = local_moments(img, WindowSpec::of(21), b);
    for (long i = 0; i < 2; ++i)
      for (long j = 0; j < 4; ++j) {
        EXPECT_NEAR(m.mean.at(i, j), oracle::window_mean(g, i, j, 21), 1e-9);
        EXPECT_NEAR(m.std.at(i, j), oracle::window_std(g, i, j, 21), 1e-7);
      }
  }
}

TEST(LocalStats, NaiveMatchesOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const GrayImage img = oracle::random_image(rng, 3 + rng() % 12, 3 + rng() % 12);
    const auto g = oracle::grid_of(img);
    for (int size : {3, 5, 7}) {
      const LocalMoments m = local_moments(img, WindowSpec::of(size), StatsBackend::Naive);
      for (long i = 0; i < static_cast<long>(img.height()); ++i)
        for (long j = 0; j < static_cast<long>(img.width()); ++j) {
          ASSERT_NEAR(m.mean.at(i, j), oracle::window_mean(g, i, j, size), 1e-12);
          ASSERT_NEAR(m.std.at(i, j), oracle::window_std(g, i, j, size), 1e-10);
        }
    }
  }
}

TEST(LocalStats, BackendsAgreeOnRandomImages) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const GrayImage img = oracle::random_image(rng, 5 + rng() % 36, 5 + rng() % 36);
    for (int size : {3, 5, 11, 21}) {
      const auto w = WindowSpec::of(size);
      const LocalMoments naive = local_moments(img, w, StatsBackend::Naive);
      const LocalMoments fast = local_moments(img, w, StatsBackend::IntegralImage);
      ASSERT_LE(oracle::max_abs_diff(naive.mean.pixels(), fast.mean.pixels()), 1e-9);
      ASSERT_LE(oracle::max_abs_diff(naive.std.pixels(), fast.std.pixels()), 1e-7);
    }
  }
}

// A flat patch inside a textured, bright image must come out exactly flat
// from the integral backend too: mean equal to the patch value, std zero.
TEST(LocalStats, IntegralBackendExactOnFlatWindows) {
  std::mt19937_64 rng(4);
  std::vector<double> px(40 * 30);
  for (std::size_t k = 0; k < px.size(); ++k) px[k] = static_cast<double>(rng() % 256);
  for (std::size_t i = 5; i < 20; ++i)
    for (std::size_t j = 10; j < 30; ++j) px[i * 40 + j] = 231.0;
  const GrayImage img(40, 30, std::move(px));
  const LocalMoments m = local_moments(img, WindowSpec::of(5), StatsBackend::IntegralImage);
  for (std::size_t i = 7; i < 18; ++i)
    for (std::size_t j = 12; j < 28; ++j) {
      ASSERT_EQ(m.std.at(i, j), 0.0);
      ASSERT_EQ(m.mean.at(i, j), 231.0);
    }
}

TEST(LocalStats, AffineEquivariance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> gain(0.2, 4.0), offset(-100.0, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayImage x = oracle::random_image(rng, 6 + rng() % 20, 6 + rng() % 20);
    const double a = gain(rng);
    const double b = offset(rng);
    for (StatsBackend backend : kBackends) {
      for (int size : {3, 11}) {
        const auto w = WindowSpec::of(size);
        const LocalMoments base = local_moments(x, w, backend);
        const LocalMoments moved = local_moments(affine_intensity(x, a, b), w, backend);
        const LocalMoments shifted = local_moments(affine_intensity(x, 1.0, b), w, backend);
        const LocalMoments scaled = local_moments(affine_intensity(x, a, 0.0), w, backend);
        for (std::size_t k = 0; k < x.size(); ++k) {
          ASSERT_NEAR(shifted.mean.pixels()[k], base.mean.pixels()[k] + b, 1e-9);
          ASSERT_NEAR(scaled.mean.pixels()[k], a * base.mean.pixels()[k], 1e-9);
          ASSERT_NEAR(moved.std.pixels()[k], a * base.std.pixels()[k], 1e-7);
          ASSERT_GE(base.std.pixels()[k], 0.0);
        }
      }
    }
  }
}

TEST(PadReplicate, ReplicatesBorders) {
  const GrayImage padded = pad_replicate(GrayImage(2, 1, std::vector<double>{3, 9}), 2);
  ASSERT_EQ(padded.width(), 6u);
  ASSERT_EQ(padded.height(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(padded.at(i, 0), 3);
    EXPECT_EQ(padded.at(i, 2), 3);
    EXPECT_EQ(padded.at(i, 3), 9);
    EXPECT_EQ(padded.at(i, 5), 9);
  }
}

}  // namespace
}  // namespace minmax_match
