#include "minmax_match/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "minmax_match/error.hpp"

namespace minmax_match {
namespace {

void check_query(const Gallery& gallery, std::size_t test_length) {
  if (gallery.empty()) throw Error(ErrorCode::EmptyGallery, "gallery has no rows");
  if (test_length != gallery.feature_length()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("test vector has {} features, gallery rows have {}", test_length,
                            gallery.feature_length()));
  }
}

// Inputs are known non-negative here; the exponent is dispatched once per
// row so the common integer cases avoid pow().
template <typename Power>
double row_weight(std::span<const double> train, std::span<const double> test, Power power) {
  double z = 0.0;
  for (std::size_t j = 0; j < train.size(); ++j) {
    const double a = train[j];
    const double b = test[j];
    if (a == b) {
      z += 1.0;
    } else {
      z += power(std::min(a, b) / std::max(a, b));
    }
  }
  return z;
}

double row_weight(std::span<const double> train, std::span<const double> test, double alpha) {
  if (alpha == 1.0) return row_weight(train, test, [](double r) { return r; });
  if (alpha == 2.0) return row_weight(train, test, [](double r) { return r * r; });
  if (alpha == 3.0) return row_weight(train, test, [](double r) { return r * r * r; });
  return row_weight(train, test, [alpha](double r) { return std::pow(r, alpha); });
}

}  // namespace

void Gallery::add(const FeatureVector& features, EmotionClass label, SourceId source) {
  if (features.size() != feature_length_) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("gallery row has {} features, expected {}", features.size(),
                            feature_length_));
  }
  features_.insert(features_.end(), features.values().begin(), features.values().end());
  labels_.push_back(std::move(label));
  sources_.push_back(std::move(source));
}

double minmax_similarity(double a, double b, double alpha) {
  if (a < 0.0 || b < 0.0) {
    throw Error(ErrorCode::NegativeInput,
                fmt::format("similarity inputs must be non-negative, got ({}, {})", a, b));
  }
  if (a == b) return 1.0;
  return std::pow(std::min(a, b) / std::max(a, b), alpha);
}

ScoreVector score(const Gallery& gallery, std::span<const double> test, double alpha) {
  if (test.size() != gallery.feature_length()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("test vector has {} features, gallery rows have {}", test.size(),
                            gallery.feature_length()));
  }
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::InvalidParams, fmt::format("alpha must be > 0, got {}", alpha));
  }
  ScoreVector out;
  out.weights.resize(gallery.rows());
  for (std::size_t t = 0; t < gallery.rows(); ++t) {
    out.weights[t] = row_weight(gallery.row(t), test, alpha);
  }
  return out;
}

ScoreVector score(const Gallery& gallery, const FeatureVector& test, double alpha) {
  return score(gallery, test.values(), alpha);
}

MinMaxMatch classify_minmax(const Gallery& gallery, const FeatureVector& test, double alpha) {
  check_query(gallery, test.size());
  MinMaxMatch match;
  match.scores = score(gallery, test, alpha);
  const auto& z = match.scores.weights;
  // max_element returns the first maximum, i.e. the lowest row on ties.
  match.row = static_cast<std::size_t>(std::distance(z.begin(), std::max_element(z.begin(), z.end())));
  match.label = gallery.label(match.row);
  return match;
}

NearestMatch classify_nn_euclidean(const Gallery& gallery, const FeatureVector& test) {
  check_query(gallery, test.size());
  NearestMatch match;
  match.distances.resize(gallery.rows());
  const auto q = test.values();
  for (std::size_t t = 0; t < gallery.rows(); ++t) {
    const auto r = gallery.row(t);
    double d2 = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double d = r[j] - q[j];
      d2 += d * d;
    }
    match.distances[t] = std::sqrt(d2);
  }
  const auto& d = match.distances;
  match.row = static_cast<std::size_t>(std::distance(d.begin(), std::min_element(d.begin(), d.end())));
  match.label = gallery.label(match.row);
  return match;
}

std::vector<std::pair<std::size_t, double>> top_matches(const ScoreVector& scores, std::size_t k) {
  std::vector<std::size_t> order(scores.weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores.weights[a] > scores.weights[b];
  });
  order.resize(std::min(k, order.size()));
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(order.size());
  for (std::size_t t : order) out.emplace_back(t, scores.weights[t]);
  return out;
}

}  // namespace minmax_match
