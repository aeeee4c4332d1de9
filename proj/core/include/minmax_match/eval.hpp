#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minmax_match/classify.hpp"
#include "minmax_match/dataset.hpp"
#include "minmax_match/pipeline.hpp"

namespace minmax_match {

enum class ClassifierKind { MinMax, NearestEuclidean };

/// Paper: each trial holds out one random image per (subject, expression)
/// pair. PerSample: classic leave-one-sample-out, one deterministic pass.
enum class Protocol { Paper, PerSample };

[[nodiscard]] std::string_view to_string(ClassifierKind kind) noexcept;
[[nodiscard]] std::string_view to_string(Protocol protocol) noexcept;

struct TrialSplit {
  std::vector<std::size_t> test_ids;   ///< ascending sample positions
  std::vector<std::size_t> train_ids;  ///< ascending sample positions
};

/// Seed of trial `trial` (0-based) of a run seeded with `seed`.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, int trial) noexcept;

/// Picks one test image uniformly at random from every (subject, expression)
/// pair with at least two images; everything else trains. Pairs with a
/// single image are never tested.
[[nodiscard]] TrialSplit make_trial_split(const Dataset& ds, std::uint64_t trial_seed);

/// Human-readable notes about pairs that can never be tested.
[[nodiscard]] std::vector<std::string> single_image_pairs(const Dataset& ds);

/// Preprocessed features of every sample of a dataset under one config.
/// Immutable once built, so concurrent reads are safe.
class FeatureCache {
 public:
  /// Errors from decoding or preprocessing any sample propagate.
  static FeatureCache build(const Dataset& ds, const PipelineConfig& cfg, unsigned threads = 0);

  [[nodiscard]] std::size_t size() const noexcept { return features_.size(); }
  [[nodiscard]] const FeatureVector& at(std::size_t k) const noexcept { return features_[k]; }
  [[nodiscard]] const PipelineConfig& config() const noexcept { return cfg_; }

 private:
  FeatureCache(PipelineConfig cfg, std::vector<FeatureVector> features)
      : cfg_(std::move(cfg)), features_(std::move(features)) {}
  PipelineConfig cfg_;
  std::vector<FeatureVector> features_;
};

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct EvalOptions {
  ClassifierKind classifier = ClassifierKind::MinMax;
  Protocol protocol = Protocol::Paper;
  int trials = 30;
  std::uint64_t seed = 0;
  unsigned threads = 0;    ///< 0: resolve_threads()
  bool use_cache = true;   ///< false recomputes features inside every trial
  /// Called after each completed trial, in trial order.
  std::function<void(const TrialResult&)> on_trial;
};

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

struct EvalReport {
  std::vector<TrialResult> trials;
  std::vector<double> per_trial_accuracy;
  double mean_accuracy = 0.0;
  ConfusionMatrix confusion;           ///< rows: true class, columns: predicted
  std::vector<EmotionClass> classes;   ///< row/column order of `confusion`
  std::vector<std::size_t> test_counts;  ///< times each sample was tested
  std::vector<std::string> warnings;
  PipelineConfig config;
  ClassifierKind classifier = ClassifierKind::MinMax;
  Protocol protocol = Protocol::Paper;
  std::uint64_t seed = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Repeated hold-out evaluation. Throws Error{InvalidParams} for trials < 1
/// and Error{EmptyDataset} when no sample is eligible for testing.
[[nodiscard]] EvalReport run_eval(const Dataset& ds, const PipelineConfig& cfg,
                                  const EvalOptions& options);

/// As above, reusing features that were already computed for `ds`.
[[nodiscard]] EvalReport run_eval(const Dataset& ds, const FeatureCache& cache,
                                  const EvalOptions& options);

[[nodiscard]] const ConfusionMatrix& confusion_matrix(const EvalReport& report) noexcept;

enum class SweepMode {
  FixNormVaryFeat,  ///< N from the base config, M over the sizes
  VaryBoth,         ///< N = M over the sizes
};

struct SweepRow {
  int norm_window = 0;
  int feat_window = 0;
  double mean_accuracy = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Sizes must be odd and within [3, 21] (Error{InvalidWindow} otherwise).
/// Every row uses the same seed, hence the same splits.
[[nodiscard]] std::vector<SweepRow> sweep_windows(const Dataset& ds, const PipelineConfig& base,
                                                  SweepMode mode, std::span<const int> sizes,
                                                  const EvalOptions& options);

/// First row with the highest mean accuracy.
[[nodiscard]] std::optional<SweepRow> best_row(std::span<const SweepRow> rows);

/// Accuracy values with 9 decimals, enough for the >= 6 significant digits
/// the CSV consumers expect.
[[nodiscard]] std::string format_accuracy(double value);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_confusion_csv(std::ostream& out, const EvalReport& report);
void write_coverage_csv(std::ostream& out, const EvalReport& report, const Dataset& ds);

}  // namespace minmax_match
