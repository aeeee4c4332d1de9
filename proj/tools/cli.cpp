#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "minmax_match/classify.hpp"
#include "minmax_match/dataset.hpp"
#include "minmax_match/error.hpp"
#include "minmax_match/eval.hpp"
#include "minmax_match/image_io.hpp"
#include "minmax_match/pipeline.hpp"

namespace minmax_match::cli {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string dataset;
  std::string image;
  std::string crop = "auto";
  std::string out = ".";
  std::string classifier = "minmax";
  std::string protocol = "paper";
  std::string backend = "integral";
  std::string mode = "fix-n";
  std::string sizes = "3,5,7,9,11,13,15,17,19,21";
  int norm_window = 11;
  int feat_window = 11;
  double alpha = 3.0;
  int trials = 30;
  std::uint64_t seed = 0;
  std::size_t top = 5;

  int classes = 7;
  int subjects = 3;
  int replicates = 3;
  std::size_t width = 48;
  std::size_t height = 48;
  double noise = 0.0;
};

// Thrown for malformed flag values; reported like any input error.
Error usage(const std::string& message) { return Error(ErrorCode::InvalidParams, message); }

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    parts.emplace_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

template <typename Int>
Int parse_int(const std::string& text, std::string_view what) {
  Int value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw usage(fmt::format("invalid {} '{}'", what, text));
  return value;
}

CropPolicy parse_crop(const std::string& text) {
  if (text == "auto") return CropPolicy::automatic();
  if (text == "none") return CropPolicy::none();
  const auto parts = split_commas(text);
  if (parts.size() != 4) throw usage(fmt::format("--crop expects auto, none or T,L,H,W; got '{}'", text));
  return CropPolicy::fixed({parse_int<std::size_t>(parts[0], "crop top"),
                            parse_int<std::size_t>(parts[1], "crop left"),
                            parse_int<std::size_t>(parts[2], "crop height"),
                            parse_int<std::size_t>(parts[3], "crop width")});
}

ClassifierKind parse_classifier(const std::string& text) {
  if (text == "minmax") return ClassifierKind::MinMax;
  if (text == "nn") return ClassifierKind::NearestEuclidean;
  throw usage(fmt::format("--classifier must be minmax or nn, got '{}'", text));
}

Protocol parse_protocol(const std::string& text) {
  if (text == "paper") return Protocol::Paper;
  if (text == "per-sample") return Protocol::PerSample;
  throw usage(fmt::format("--protocol must be paper or per-sample, got '{}'", text));
}

StatsBackend parse_backend(const std::string& text) {
  if (text == "integral") return StatsBackend::IntegralImage;
  if (text == "naive") return StatsBackend::Naive;
  throw usage(fmt::format("--backend must be integral or naive, got '{}'", text));
}

PipelineConfig pipeline_config(const Flags& f) {
  PipelineConfig cfg;
  cfg.norm_window = WindowSpec::of(f.norm_window);
  cfg.feat_window = WindowSpec::of(f.feat_window);
  cfg.alpha = f.alpha;
  cfg.crop = parse_crop(f.crop);
  cfg.backend = parse_backend(f.backend);
  cfg.validate();
  return cfg;
}

EvalOptions eval_options(const Flags& f) {
  EvalOptions options;
  options.classifier = parse_classifier(f.classifier);
  options.protocol = parse_protocol(f.protocol);
  options.trials = f.trials;
  options.seed = f.seed;
  if (f.trials < 1) throw usage(fmt::format("--trials must be >= 1, got {}", f.trials));
  return options;
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot open {} for writing", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write to {} failed", path.string()));
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, fmt::format("cannot create {}: {}", dir, ec.message()));
  return fs::path(dir);
}

Dataset load_reported(const std::string& dir, std::ostream& err) {
  if (dir.empty()) throw usage("--dataset is required");
  LoadSummary summary;
  Dataset ds = load_dataset(dir, summary);
  for (const auto& name : summary.skipped) err << "warning: skipping " << name << " (not a JAFFE-style name)\n";
  for (const auto& failure : summary.failed) err << "warning: cannot use " << failure << '\n';
  err << fmt::format("loaded {} images ({} subjects, {} classes) from {}\n", summary.images,
                     summary.subjects, summary.classes, dir);
  return ds;
}

void add_pipeline_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--crop", f.crop, "auto | none | T,L,H,W")->capture_default_str();
  cmd.add_option("-N,--norm-window", f.norm_window, "normalization window size (odd)")
      ->capture_default_str();
  cmd.add_option("-M,--feat-window", f.feat_window, "feature window size (odd)")->capture_default_str();
  cmd.add_option("--backend", f.backend, "local statistics backend: integral | naive")
      ->capture_default_str();
}

void add_eval_flags(CLI::App& cmd, Flags& f) {
  add_pipeline_flags(cmd, f);
  cmd.add_option("--dataset", f.dataset, "directory of JAFFE-style images")->required();
  cmd.add_option("--alpha", f.alpha, "Min-Max exponent")->capture_default_str();
  cmd.add_option("--trials", f.trials, "number of hold-out trials")->capture_default_str();
  cmd.add_option("--seed", f.seed, "base random seed")->capture_default_str();
  cmd.add_option("--classifier", f.classifier, "minmax | nn")->capture_default_str();
  cmd.add_option("--protocol", f.protocol, "paper | per-sample")->capture_default_str();
  cmd.add_option("--out", f.out, "output directory")->capture_default_str();
}

std::string feature_csv(const FeatureVector& fv) {
  std::string text;
  for (std::size_t i = 0; i < fv.rows(); ++i) {
    for (std::size_t j = 0; j < fv.cols(); ++j) {
      if (j > 0) text += ',';
      text += fmt::format("{:.10g}", fv[i * fv.cols() + j]);
    }
    text += '\n';
  }
  return text;
}

int cmd_preprocess(const Flags& f, std::ostream& out) {
  const PipelineConfig cfg = pipeline_config(f);
  const GrayImage img = load_image(f.image);
  const PreprocessStages stages = preprocess_stages(img, cfg);
  const FeatureVector features(stages.features);

  // Everything is computed before the first write, so failures leave no
  // partial output behind.
  const auto normalized_pgm = encode_pgm(rescale_for_display(stages.normalized));
  const auto features_pgm = encode_pgm(rescale_for_display(stages.features));
  const std::string csv = feature_csv(features);

  const fs::path dir = ensure_dir(f.out);
  const std::string stem = fs::path(f.image).stem().string();
  const fs::path paths[] = {dir / (stem + ".normalized.pgm"), dir / (stem + ".features.pgm"),
                            dir / (stem + ".features.csv")};
  write_file(paths[0], std::string_view(reinterpret_cast<const char*>(normalized_pgm.data()),
                                        normalized_pgm.size()));
  write_file(paths[1], std::string_view(reinterpret_cast<const char*>(features_pgm.data()),
                                        features_pgm.size()));
  write_file(paths[2], csv);
  out << fmt::format("features={}x{}\n", features.rows(), features.cols());
  for (const auto& p : paths) out << "wrote " << p.string() << '\n';
  return kExitOk;
}

int cmd_classify(const Flags& f, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = pipeline_config(f);
  const ClassifierKind kind = parse_classifier(f.classifier);
  const Dataset ds = load_reported(f.dataset, err);
  const FeatureVector test = preprocess(load_image(f.image), cfg);
  const FeatureCache cache = FeatureCache::build(ds, cfg);

  Gallery gallery(test.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const Sample& s = ds.sample(k);
    gallery.add(cache.at(k), s.expression, {s.subject, s.expression.name, s.index, k});
  }

  std::vector<std::pair<std::size_t, double>> ranked;
  std::string_view measure;
  if (kind == ClassifierKind::MinMax) {
    const MinMaxMatch match = classify_minmax(gallery, test, cfg.alpha);
    out << "predicted=" << match.label.name << '\n';
    ranked = top_matches(match.scores, f.top);
    measure = "weight";
  } else {
    const NearestMatch match = classify_nn_euclidean(gallery, test);
    out << "predicted=" << match.label.name << '\n';
    ScoreVector negated;
    for (double d : match.distances) negated.weights.push_back(-d);
    for (auto [row, v] : top_matches(negated, f.top)) ranked.emplace_back(row, -v);
    measure = "distance";
  }
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto [row, value] = ranked[r];
    out << fmt::format("rank={} row={} file={} class={} {}={:.6f}\n", r + 1, row,
                       ds.sample(row).name, gallery.label(row).name, measure, value);
  }
  return kExitOk;
}

// Errors after the dataset has loaded abort the run (exit 1); errors before
// are input errors (exit 2). A dataset with nothing to test is an input error.
template <typename Body>
int run_aborting(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyDataset) throw;
    err << "error: evaluation aborted: " << e.what() << '\n';
    return kExitAborted;
  } catch (const std::exception& e) {
    err << "error: evaluation aborted: " << e.what() << '\n';
    return kExitAborted;
  }
}

int cmd_evaluate(const Flags& f, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = pipeline_config(f);
  EvalOptions options = eval_options(f);
  const Dataset ds = load_reported(f.dataset, err);
  const fs::path dir = ensure_dir(f.out);
  options.on_trial = [&](const TrialResult& t) {
    err << fmt::format("trial {}: accuracy={:.6f} ({}/{})\n", t.trial + 1, t.accuracy, t.correct, t.total);
  };
  return run_aborting(err, [&] {
    const EvalReport report = run_eval(ds, cfg, options);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    std::ostringstream report_csv, confusion_csv, coverage_csv;
    write_report_csv(report_csv, report);
    write_confusion_csv(confusion_csv, report);
    write_coverage_csv(coverage_csv, report, ds);
    write_file(dir / "report.csv", report_csv.str());
    write_file(dir / "confusion.csv", confusion_csv.str());
    write_file(dir / "coverage.csv", coverage_csv.str());

    std::size_t covered = 0;
    for (std::size_t c : report.test_counts) covered += c > 0 ? 1 : 0;
    out << fmt::format("mean_accuracy={:.6f}\n", report.mean_accuracy);
    out << fmt::format("tested_samples={}/{}\n", covered, ds.size());
    return kExitOk;
  });
}

int cmd_sweep(const Flags& f, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = pipeline_config(f);
  const EvalOptions options = eval_options(f);
  SweepMode mode;
  if (f.mode == "fix-n") {
    mode = SweepMode::FixNormVaryFeat;
  } else if (f.mode == "vary-both") {
    mode = SweepMode::VaryBoth;
  } else {
    throw usage(fmt::format("--mode must be fix-n or vary-both, got '{}'", f.mode));
  }
  std::vector<int> sizes;
  for (const auto& part : split_commas(f.sizes)) {
    const int size = parse_int<int>(part, "window size");
    (void)WindowSpec::of(size);
    if (size > 21) throw Error(ErrorCode::InvalidWindow, fmt::format("sweep window sizes must lie in [3, 21], got {}", size));
    sizes.push_back(size);
  }
  const Dataset ds = load_reported(f.dataset, err);
  const fs::path dir = ensure_dir(f.out);
  return run_aborting(err, [&] {
    const auto rows = sweep_windows(ds, cfg, mode, sizes, options);
    for (const SweepRow& r : rows) {
      err << fmt::format("N={} M={} mean_accuracy={:.6f}\n", r.norm_window, r.feat_window, r.mean_accuracy);
    }
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_file(dir / "sweep.csv", csv.str());
    const SweepRow best = *best_row(rows);
    out << fmt::format("best N={} M={} mean_accuracy={:.6f}\n", best.norm_window, best.feat_window,
                       best.mean_accuracy);
    return kExitOk;
  });
}

int cmd_synth(const Flags& f, std::ostream& out) {
  if (f.classes > static_cast<int>(std::size(kJaffeExpressions))) {
    throw usage(fmt::format("at most {} classes can be written with JAFFE file names, got {}",
                            std::size(kJaffeExpressions), f.classes));
  }
  SyntheticParams params;
  params.classes = f.classes;
  params.subjects = f.subjects;
  params.replicates = f.replicates;
  params.width = f.width;
  params.height = f.height;
  params.noise_sigma = f.noise;
  params.seed = f.seed;
  const Dataset ds = generate_synthetic(params);
  const nlohmann::json generator = {
      {"generator",
       {{"classes", params.classes}, {"subjects", params.subjects}, {"replicates", params.replicates},
        {"width", params.width}, {"height", params.height}, {"noise_sigma", params.noise_sigma},
        {"seed", params.seed}}}};
  write_dataset(ds, f.out, generator);
  out << fmt::format("wrote {} images and {} to {}\n", ds.size(), kManifestName, f.out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Facial expression template matching with a Min-Max similarity classifier",
               "minmax-match"};
  app.require_subcommand(1);

  auto* preprocess_cmd = app.add_subcommand("preprocess", "normalize one image and dump its feature map");
  add_pipeline_flags(*preprocess_cmd, f);
  preprocess_cmd->add_option("image", f.image, "input PGM or PNG")->required();
  preprocess_cmd->add_option("--out", f.out, "output directory")->capture_default_str();

  auto* classify_cmd = app.add_subcommand("classify", "classify one image against a gallery directory");
  add_pipeline_flags(*classify_cmd, f);
  classify_cmd->add_option("image", f.image, "test image")->required();
  classify_cmd->add_option("--dataset", f.dataset, "gallery directory")->required();
  classify_cmd->add_option("--alpha", f.alpha, "Min-Max exponent")->capture_default_str();
  classify_cmd->add_option("--classifier", f.classifier, "minmax | nn")->capture_default_str();
  classify_cmd->add_option("--top", f.top, "number of matches to list")->capture_default_str();

  auto* evaluate_cmd = app.add_subcommand("evaluate", "repeated hold-out evaluation of a dataset");
  add_eval_flags(*evaluate_cmd, f);

  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate over a range of window sizes");
  add_eval_flags(*sweep_cmd, f);
  sweep_cmd->add_option("--mode", f.mode, "fix-n | vary-both")->capture_default_str();
  sweep_cmd->add_option("--sizes", f.sizes, "comma-separated odd window sizes in [3, 21]")
      ->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic labeled dataset");
  synth_cmd->add_option("--classes", f.classes, "number of classes (2-7)")->capture_default_str();
  synth_cmd->add_option("--subjects", f.subjects, "number of subjects")->capture_default_str();
  synth_cmd->add_option("--replicates", f.replicates, "images per (subject, class)")->capture_default_str();
  synth_cmd->add_option("--width", f.width, "image width")->capture_default_str();
  synth_cmd->add_option("--height", f.height, "image height")->capture_default_str();
  synth_cmd->add_option("--noise", f.noise, "white noise standard deviation")->capture_default_str();
  synth_cmd->add_option("--seed", f.seed, "random seed")->capture_default_str();
  synth_cmd->add_option("--out", f.out, "output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*preprocess_cmd) return cmd_preprocess(f, out);
    if (*classify_cmd) return cmd_classify(f, out, err);
    if (*evaluate_cmd) return cmd_evaluate(f, out, err);
    if (*sweep_cmd) return cmd_sweep(f, out, err);
    if (*synth_cmd) return cmd_synth(f, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace minmax_match::cli
