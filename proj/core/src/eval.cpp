#include "minmax_match/eval.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "minmax_match/error.hpp"
#include "minmax_match/parallel.hpp"
#include "minmax_match/random.hpp"

namespace minmax_match {

std::string_view to_string(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::MinMax: return "minmax";
    case ClassifierKind::NearestEuclidean: return "nn";
  }
  return "unknown";
}

std::string_view to_string(Protocol protocol) noexcept {
  switch (protocol) {
    case Protocol::Paper: return "paper";
    case Protocol::PerSample: return "per-sample";
  }
  return "unknown";
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) noexcept {
  return derive_seed(seed, static_cast<std::uint64_t>(trial));
}

namespace {

// Samples are sorted by (subject, class, index), so each pair is one
// contiguous run [first, last).
struct PairRange {
  std::size_t first;
  std::size_t last;
};

std::vector<PairRange> pair_ranges(const Dataset& ds) {
  std::vector<PairRange> out;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= ds.size(); ++k) {
    if (k == ds.size() || ds.sample(k).subject != ds.sample(start).subject ||
        ds.sample(k).expression.id != ds.sample(start).expression.id) {
      out.push_back({start, k});
      start = k;
    }
  }
  return out;
}

SourceId source_of(const Dataset& ds, std::size_t k) {
  const Sample& s = ds.sample(k);
  return {s.subject, s.expression.name, s.index, k};
}

std::size_t best_row_excluding(std::span<const double> values, std::size_t excluded, bool maximize) {
  std::size_t best = values.size();
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (t == excluded) continue;
    if (best == values.size() || (maximize ? values[t] > values[best] : values[t] < values[best])) {
      best = t;
    }
  }
  return best;
}

struct Outcome {
  std::size_t sample;
  int predicted_class;
};

std::vector<Outcome> run_paper_trial(const Dataset& ds, const FeatureCache& features,
                                     const TrialSplit& split, const EvalOptions& options,
                                     unsigned threads) {
  std::vector<bool> is_test(ds.size(), false);
  for (std::size_t k : split.test_ids) is_test[k] = true;

  Gallery gallery(features.at(0).size());
  for (std::size_t k : split.train_ids) {
    if (is_test[k]) throw std::logic_error("test sample leaked into the gallery");
    gallery.add(features.at(k), ds.sample(k).expression, source_of(ds, k));
  }
  for (std::size_t t = 0; t < gallery.rows(); ++t) {
    if (is_test[gallery.source(t).sample]) throw std::logic_error("test sample leaked into the gallery");
  }

  std::vector<Outcome> out(split.test_ids.size());
  const double alpha = features.config().alpha;
  parallel_for(split.test_ids.size(), threads, [&](std::size_t q) {
    const std::size_t k = split.test_ids[q];
    const EmotionClass predicted = options.classifier == ClassifierKind::MinMax
                                       ? classify_minmax(gallery, features.at(k), alpha).label
                                       : classify_nn_euclidean(gallery, features.at(k)).label;
    out[q] = {k, predicted.id};
  });
  return out;
}

// Every sample against the full gallery minus itself. Excluding the row at
// argmax time is equivalent to removing it and keeps the lowest-index rule.
std::vector<Outcome> run_per_sample_pass(const Dataset& ds, const FeatureCache& features,
                                         const EvalOptions& options, unsigned threads) {
  if (ds.size() < 2) throw Error(ErrorCode::EmptyDataset, "per-sample protocol needs >= 2 images");
  Gallery gallery(features.at(0).size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    gallery.add(features.at(k), ds.sample(k).expression, source_of(ds, k));
  }
  std::vector<Outcome> out(ds.size());
  const double alpha = features.config().alpha;
  parallel_for(ds.size(), threads, [&](std::size_t k) {
    std::size_t row = 0;
    if (options.classifier == ClassifierKind::MinMax) {
      row = best_row_excluding(score(gallery, features.at(k), alpha).weights, k, true);
    } else {
      row = best_row_excluding(classify_nn_euclidean(gallery, features.at(k)).distances, k, false);
    }
    out[k] = {k, gallery.label(row).id};
  });
  return out;
}

}  // namespace

TrialSplit make_trial_split(const Dataset& ds, std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  TrialSplit split;
  for (const PairRange& pair : pair_ranges(ds)) {
    const std::size_t n = pair.last - pair.first;
    const std::size_t chosen = n >= 2 ? pair.first + uniform_index(rng, n) : ds.size();
    for (std::size_t k = pair.first; k < pair.last; ++k) {
      (k == chosen ? split.test_ids : split.train_ids).push_back(k);
    }
  }
  return split;
}

std::vector<std::string> single_image_pairs(const Dataset& ds) {
  std::vector<std::string> out;
  for (const PairRange& pair : pair_ranges(ds)) {
    if (pair.last - pair.first == 1) {
      const Sample& s = ds.sample(pair.first);
      out.push_back(fmt::format("pair ({}, {}) has a single image ({}); it is only used for training",
                                s.subject, s.expression.name, s.name));
    }
  }
  return out;
}

FeatureCache FeatureCache::build(const Dataset& ds, const PipelineConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<std::optional<FeatureVector>> slots(ds.size());
  parallel_for(ds.size(), resolve_threads(threads),
               [&](std::size_t k) { slots[k].emplace(preprocess(ds.image(k), cfg)); });
  std::vector<FeatureVector> features;
  features.reserve(ds.size());
  for (auto& slot : slots) features.push_back(std::move(*slot));
  return FeatureCache(cfg, std::move(features));
}

namespace {

// With `cache` null every trial recomputes all features from the images.
EvalReport run_eval_impl(const Dataset& ds, const PipelineConfig& cfg, const FeatureCache* cache,
                         const EvalOptions& options) {
  if (options.trials < 1) {
    throw Error(ErrorCode::InvalidParams, fmt::format("trials must be >= 1, got {}", options.trials));
  }
  if (cache && cache->size() != ds.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature cache does not belong to this dataset");
  }
  cfg.validate();
  const unsigned threads = resolve_threads(options.threads);

  EvalReport report;
  report.config = cfg;
  report.classifier = options.classifier;
  report.protocol = options.protocol;
  report.seed = options.seed;
  report.classes = ds.classes();
  report.confusion.assign(ds.classes().size(), std::vector<std::size_t>(ds.classes().size(), 0));
  report.test_counts.assign(ds.size(), 0);
  if (options.protocol == Protocol::Paper) report.warnings = single_image_pairs(ds);

  const int passes = options.protocol == Protocol::Paper ? options.trials : 1;
  for (int trial = 0; trial < passes; ++trial) {
    std::optional<FeatureCache> fresh;
    if (!cache) fresh.emplace(FeatureCache::build(ds, cfg, threads));
    const FeatureCache& features = cache ? *cache : *fresh;

    TrialResult result;
    result.trial = trial;
    std::vector<Outcome> outcomes;
    if (options.protocol == Protocol::Paper) {
      result.seed = trial_seed(options.seed, trial);
      const TrialSplit split = make_trial_split(ds, result.seed);
      if (split.test_ids.empty()) {
        throw Error(ErrorCode::EmptyDataset,
                    "no (subject, expression) pair has two or more images to hold out");
      }
      outcomes = run_paper_trial(ds, features, split, options, threads);
    } else {
      outcomes = run_per_sample_pass(ds, features, options, threads);
    }

    for (const Outcome& o : outcomes) {
      const int truth = ds.sample(o.sample).expression.id;
      const auto row = static_cast<std::size_t>(ds.class_position(truth));
      const auto col = static_cast<std::size_t>(ds.class_position(o.predicted_class));
      ++report.confusion[row][col];
      ++report.test_counts[o.sample];
      ++result.total;
      if (o.predicted_class == truth) ++result.correct;
    }
    result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.total);
    report.trials.push_back(result);
    if (options.on_trial) options.on_trial(result);
    report.per_trial_accuracy.push_back(result.accuracy);
  }
  report.mean_accuracy =
      std::accumulate(report.per_trial_accuracy.begin(), report.per_trial_accuracy.end(), 0.0) /
      static_cast<double>(report.per_trial_accuracy.size());
  return report;
}

}  // namespace

EvalReport run_eval(const Dataset& ds, const PipelineConfig& cfg, const EvalOptions& options) {
  if (!options.use_cache) return run_eval_impl(ds, cfg, nullptr, options);
  const FeatureCache cache = FeatureCache::build(ds, cfg, options.threads);
  return run_eval_impl(ds, cfg, &cache, options);
}

EvalReport run_eval(const Dataset& ds, const FeatureCache& cache, const EvalOptions& options) {
  return run_eval_impl(ds, cache.config(), &cache, options);
}

const ConfusionMatrix& confusion_matrix(const EvalReport& report) noexcept {
  return report.confusion;
}

std::vector<SweepRow> sweep_windows(const Dataset& ds, const PipelineConfig& base, SweepMode mode,
                                    std::span<const int> sizes, const EvalOptions& options) {
  if (sizes.empty()) throw Error(ErrorCode::InvalidParams, "sweep needs at least one window size");
  for (int size : sizes) {
    (void)WindowSpec::of(size);
    if (size > 21) {
      throw Error(ErrorCode::InvalidWindow,
                  fmt::format("sweep window sizes must lie in [3, 21], got {}", size));
    }
  }
  std::vector<SweepRow> rows;
  for (int size : sizes) {
    PipelineConfig cfg = base;
    cfg.feat_window = WindowSpec::of(size);
    if (mode == SweepMode::VaryBoth) cfg.norm_window = WindowSpec::of(size);
    const EvalReport report = run_eval(ds, cfg, options);
    rows.push_back({cfg.norm_window.size(), cfg.feat_window.size(), report.mean_accuracy,
                    static_cast<int>(report.trials.size()), options.seed});
  }
  return rows;
}

std::optional<SweepRow> best_row(std::span<const SweepRow> rows) {
  if (rows.empty()) return std::nullopt;
  const auto it = std::max_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.mean_accuracy < b.mean_accuracy;
  });
  return *it;
}

std::string format_accuracy(double value) { return fmt::format("{:.9f}", value); }

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "N,M,mean_accuracy,trials,seed\n";
  for (const SweepRow& r : rows) {
    out << fmt::format("{},{},{},{},{}\n", r.norm_window, r.feat_window,
                       format_accuracy(r.mean_accuracy), r.trials, r.seed);
  }
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "trial,trial_seed,correct,total,accuracy\n";
  for (const TrialResult& t : report.trials) {
    out << fmt::format("{},{},{},{},{}\n", t.trial, t.seed, t.correct, t.total,
                       format_accuracy(t.accuracy));
  }
}

void write_confusion_csv(std::ostream& out, const EvalReport& report) {
  out << "true\\predicted";
  for (const EmotionClass& c : report.classes) out << ',' << c.name;
  out << '\n';
  for (std::size_t r = 0; r < report.classes.size(); ++r) {
    out << report.classes[r].name;
    for (std::size_t count : report.confusion[r]) out << ',' << count;
    out << '\n';
  }
}

void write_coverage_csv(std::ostream& out, const EvalReport& report, const Dataset& ds) {
  out << "sample,subject,class,index,times_tested\n";
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const Sample& s = ds.sample(k);
    out << fmt::format("{},{},{},{},{}\n", s.name, s.subject, s.expression.name, s.index,
                       report.test_counts[k]);
  }
}

}  // namespace minmax_match
