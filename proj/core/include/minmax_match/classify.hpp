#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "minmax_match/pipeline.hpp"

namespace minmax_match {

struct EmotionClass {
  int id = 0;
  std::string name;

  friend bool operator==(const EmotionClass&, const EmotionClass&) = default;
};

/// Where a gallery row came from.
struct SourceId {
  std::string subject;
  std::string expression;
  int index = 0;            ///< replicate number within (subject, expression)
  std::size_t sample = 0;   ///< position in the owning Dataset

  friend bool operator==(const SourceId&, const SourceId&) = default;
};

/// Labeled training feature array: one row per training image.
class Gallery {
 public:
  explicit Gallery(std::size_t feature_length) : feature_length_(feature_length) {}

  /// Throws Error{DimensionMismatch} if `features` has the wrong length.
  void add(const FeatureVector& features, EmotionClass label, SourceId source);

  [[nodiscard]] std::size_t rows() const noexcept { return labels_.size(); }
  [[nodiscard]] bool empty() const noexcept { return labels_.empty(); }
  [[nodiscard]] std::size_t feature_length() const noexcept { return feature_length_; }
  [[nodiscard]] std::span<const double> row(std::size_t t) const noexcept {
    return std::span<const double>(features_).subspan(t * feature_length_, feature_length_);
  }
  [[nodiscard]] const EmotionClass& label(std::size_t t) const noexcept { return labels_[t]; }
  [[nodiscard]] const SourceId& source(std::size_t t) const noexcept { return sources_[t]; }

 private:
  std::size_t feature_length_;
  std::vector<double> features_;
  std::vector<EmotionClass> labels_;
  std::vector<SourceId> sources_;
};

/// Per-row similarity weights of one test vector against a gallery.
struct ScoreVector {
  std::vector<double> weights;
};

/// (min(a, b) / max(a, b))^alpha, in [0, 1]. Equal inputs (0 and 0
/// included) score exactly 1. Throws Error{NegativeInput} for a or b < 0.
[[nodiscard]] double minmax_similarity(double a, double b, double alpha);

/// weights[t] = sum_j minmax_similarity(gallery[t][j], test[j], alpha).
[[nodiscard]] ScoreVector score(const Gallery& gallery, std::span<const double> test, double alpha);
[[nodiscard]] ScoreVector score(const Gallery& gallery, const FeatureVector& test, double alpha);

struct MinMaxMatch {
  EmotionClass label;
  ScoreVector scores;
  std::size_t row = 0;
};

/// Label of the highest-weight row; the lowest row index wins ties.
[[nodiscard]] MinMaxMatch classify_minmax(const Gallery& gallery, const FeatureVector& test,
                                          double alpha);

struct NearestMatch {
  EmotionClass label;
  std::vector<double> distances;  ///< Euclidean distance to every row
  std::size_t row = 0;
};

/// 1-NN under the Euclidean norm; the lowest row index wins ties.
[[nodiscard]] NearestMatch classify_nn_euclidean(const Gallery& gallery, const FeatureVector& test);

/// The `k` largest weights as (row, weight), descending; equal weights keep
/// row order.
[[nodiscard]] std::vector<std::pair<std::size_t, double>> top_matches(const ScoreVector& scores,
                                                                      std::size_t k);

}  // namespace minmax_match
