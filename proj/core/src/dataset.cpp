#include "minmax_match/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "minmax_match/error.hpp"
#include "minmax_match/image_io.hpp"
#include "minmax_match/random.hpp"

namespace minmax_match {

EmotionClass jaffe_class(int id) {
  if (id < 0 || id >= static_cast<int>(std::size(kJaffeExpressions))) {
    throw Error(ErrorCode::InvalidParams, fmt::format("no JAFFE expression with id {}", id));
  }
  return {id, std::string(kJaffeExpressions[id].name)};
}

JaffeName parse_jaffe_filename(std::string_view name) {
  static const std::regex pattern(R"(^([A-Za-z0-9]+)\.([A-Za-z]{2})([0-9]+)\.([0-9]+)\.[A-Za-z0-9]+$)");
  std::cmatch m;
  if (!std::regex_match(name.data(), name.data() + name.size(), m, pattern)) {
    throw Error(ErrorCode::UnparseableName,
                fmt::format("'{}' does not match <SUBJ>.<EXPR><k>.<n>.<ext>", name));
  }
  const std::string code = m[2].str();
  int id = -1;
  for (std::size_t k = 0; k < std::size(kJaffeExpressions); ++k) {
    if (kJaffeExpressions[k].code == code) id = static_cast<int>(k);
  }
  if (id < 0) {
    throw Error(ErrorCode::UnknownExpressionCode,
                fmt::format("'{}': unknown expression code '{}'", name, code));
  }
  JaffeName out;
  out.subject = m[1].str();
  out.expression = jaffe_class(id);
  try {
    out.index = std::stoi(m[3].str());
    out.serial = std::stoi(m[4].str());
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::UnparseableName, fmt::format("'{}': number out of range", name));
  }
  if (out.index < 1) {
    throw Error(ErrorCode::UnparseableName, fmt::format("'{}': replicate index must be >= 1", name));
  }
  return out;
}

std::string format_jaffe_filename(const JaffeName& name, std::string_view ext) {
  const EmotionClass cls = jaffe_class(name.expression.id);
  return fmt::format("{}.{}{}.{}.{}", name.subject, kJaffeExpressions[cls.id].code, name.index,
                     name.serial, ext);
}

Dataset::Dataset(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no samples");
  std::sort(samples_.begin(), samples_.end(), [](const Sample& a, const Sample& b) {
    return std::tie(a.subject, a.expression.id, a.index, a.name) <
           std::tie(b.subject, b.expression.id, b.index, b.name);
  });
  std::map<int, std::string> names;
  std::set<std::string> subjects;
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const Sample& s = samples_[k];
    if (k > 0) {
      const Sample& prev = samples_[k - 1];
      if (prev.subject == s.subject && prev.expression.id == s.expression.id && prev.index == s.index) {
        throw Error(ErrorCode::InvalidParams,
                    fmt::format("duplicate sample ({}, {}, {})", s.subject, s.expression.name, s.index));
      }
    }
    auto [it, inserted] = names.emplace(s.expression.id, s.expression.name);
    if (!inserted && it->second != s.expression.name) {
      throw Error(ErrorCode::InvalidParams,
                  fmt::format("class id {} named both '{}' and '{}'", s.expression.id, it->second,
                              s.expression.name));
    }
    subjects.insert(s.subject);
  }
  for (const auto& [id, name] : names) classes_.push_back({id, name});
  subjects_.assign(subjects.begin(), subjects.end());
}

int Dataset::class_position(int class_id) const noexcept {
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    if (classes_[k].id == class_id) return static_cast<int>(k);
  }
  return -1;
}

GrayImage Dataset::image(std::size_t k) const {
  const Sample& s = samples_[k];
  if (s.pixels) return *s.pixels;
  return load_image(s.path);
}

void Dataset::materialize() {
  for (Sample& s : samples_) {
    if (!s.pixels) s.pixels = std::make_shared<const GrayImage>(load_image(s.path));
  }
}

Dataset load_dataset(const std::filesystem::path& dir, LoadSummary& summary) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::FileNotFound, fmt::format("no such directory: {}", dir.string()));
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  summary = LoadSummary{};
  std::vector<Sample> samples;
  std::set<std::tuple<std::string, int, int>> seen;
  for (const fs::path& file : files) {
    const std::string name = file.filename().string();
    if (name == kManifestName) continue;
    JaffeName parsed;
    try {
      parsed = parse_jaffe_filename(name);
    } catch (const Error&) {
      summary.skipped.push_back(name);
      continue;
    }
    // Decode once so broken files are reported here rather than mid-run;
    // the pixels themselves are read again on demand.
    try {
      (void)load_image(file);
    } catch (const Error& e) {
      summary.failed.push_back(fmt::format("{}: {}", name, e.what()));
      continue;
    }
    if (!seen.emplace(parsed.subject, parsed.expression.id, parsed.index).second) {
      summary.failed.push_back(fmt::format("{}: duplicate (subject, expression, index)", name));
      continue;
    }
    Sample s;
    s.subject = parsed.subject;
    s.expression = parsed.expression;
    s.index = parsed.index;
    s.name = name;
    s.path = file;
    samples.push_back(std::move(s));
  }
  if (samples.empty()) {
    throw Error(ErrorCode::EmptyDataset,
                fmt::format("no loadable JAFFE-style images in {}", dir.string()));
  }
  Dataset ds(std::move(samples));
  summary.images = ds.size();
  summary.subjects = ds.subjects().size();
  summary.classes = ds.classes().size();
  return ds;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  LoadSummary summary;
  return load_dataset(dir, summary);
}

namespace {

constexpr int kGrid = 4;
constexpr std::uint64_t kLayoutStream = 0x1A70;
constexpr std::uint64_t kBiasStream = 0xB1A5'0000;
constexpr std::uint64_t kNoiseStream = 0x0015E'0000'0000;

struct Patch {
  int cell = 0;
  int period = 2;
  int pattern = 0;  // 0 checker, 1 horizontal stripes, 2 vertical stripes
  double contrast = 30.0;
};

void validate(const SyntheticParams& p) {
  if (p.classes < 2 || p.subjects < 1 || p.replicates < 2) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("synthetic dataset needs classes >= 2, subjects >= 1, replicates >= 2 "
                            "(got {}, {}, {})",
                            p.classes, p.subjects, p.replicates));
  }
  if (p.height < kMinSyntheticSide || p.width < kMinSyntheticSide) {
    throw Error(ErrorCode::InvalidParams,
                fmt::format("synthetic images must be at least {0}x{0}, got {1}x{2}",
                            kMinSyntheticSide, p.width, p.height));
  }
  if (!(p.noise_sigma >= 0.0) || !std::isfinite(p.noise_sigma)) {
    throw Error(ErrorCode::InvalidParams, "noise_sigma must be finite and >= 0");
  }
}

// Two cells are shared by every class; each class then owns two further
// cells plus its own period, pattern and contrast.
std::vector<Patch> class_patches(const SyntheticParams& p, int class_id) {
  const std::vector<int> shared = {kGrid + 1, kGrid + 2};
  std::vector<int> pool;
  for (int c = 0; c < kGrid * kGrid; ++c) {
    if (std::find(shared.begin(), shared.end(), c) == shared.end()) pool.push_back(c);
  }
  std::mt19937_64 layout(derive_seed(p.seed, kLayoutStream));
  for (std::size_t k = pool.size() - 1; k > 0; --k) {
    std::swap(pool[k], pool[uniform_index(layout, k + 1)]);
  }

  std::vector<Patch> patches;
  for (int cell : shared) patches.push_back({cell, 2, 0, 30.0});

  std::mt19937_64 style(derive_seed(p.seed, kLayoutStream + 1 + static_cast<std::uint64_t>(class_id)));
  const auto n = pool.size();
  for (int k = 0; k < 2; ++k) {
    Patch patch;
    patch.cell = pool[(2 * static_cast<std::size_t>(class_id) + static_cast<std::size_t>(k)) % n];
    patch.period = 2 + (class_id + k) % 3;
    patch.pattern = (class_id / 3 + k) % 3;
    patch.contrast = uniform_real(style, 25.0, 60.0);
    patches.push_back(patch);
  }
  return patches;
}

}  // namespace

GrayImage synthetic_prototype(const SyntheticParams& params, int class_id) {
  validate(params);
  const std::size_t m = params.height;
  const std::size_t n = params.width;
  std::vector<double> px(m * n, 128.0);
  const std::size_t cell_h = m / kGrid;
  const std::size_t cell_w = n / kGrid;
  for (const Patch& patch : class_patches(params, class_id)) {
    const std::size_t top = static_cast<std::size_t>(patch.cell / kGrid) * cell_h;
    const std::size_t left = static_cast<std::size_t>(patch.cell % kGrid) * cell_w;
    const auto period = static_cast<std::size_t>(patch.period);
    // One-pixel margin inside the cell keeps neighbouring patches apart.
    for (std::size_t i = top + 1; i + 1 < top + cell_h; ++i) {
      for (std::size_t j = left + 1; j + 1 < left + cell_w; ++j) {
        const std::size_t bi = (i - top) / period;
        const std::size_t bj = (j - left) / period;
        bool on = false;
        switch (patch.pattern) {
          case 0: on = (bi + bj) % 2 == 0; break;
          case 1: on = bi % 2 == 0; break;
          default: on = bj % 2 == 0; break;
        }
        px[i * n + j] += on ? patch.contrast : -patch.contrast;
      }
    }
  }
  return GrayImage(n, m, std::move(px));
}

GrayImage synthetic_bias(const SyntheticParams& params, int subject) {
  validate(params);
  std::mt19937_64 rng(derive_seed(params.seed, kBiasStream + static_cast<std::uint64_t>(subject)));
  const double offset = uniform_real(rng, -20.0, 20.0);
  const double ramp = uniform_real(rng, -15.0, 15.0);
  const double angle = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
  const double wave = uniform_real(rng, 0.0, 6.0);
  const double phase = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);

  const std::size_t m = params.height;
  const std::size_t n = params.width;
  const double extent = static_cast<double>(std::max(m, n));
  std::vector<double> px(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double y = (static_cast<double>(i) - 0.5 * static_cast<double>(m)) / extent;
      const double x = (static_cast<double>(j) - 0.5 * static_cast<double>(n)) / extent;
      const double along = x * std::cos(angle) + y * std::sin(angle);
      px[i * n + j] = offset + ramp * along + wave * std::sin(std::numbers::pi * (x + y) + phase);
    }
  }
  return GrayImage(n, m, std::move(px));
}

Dataset generate_synthetic(const SyntheticParams& params) {
  validate(params);
  std::vector<EmotionClass> classes;
  for (int c = 0; c < params.classes; ++c) {
    classes.push_back(params.classes <= static_cast<int>(std::size(kJaffeExpressions))
                          ? jaffe_class(c)
                          : EmotionClass{c, fmt::format("class{}", c)});
  }
  std::vector<GrayImage> prototypes;
  for (int c = 0; c < params.classes; ++c) prototypes.push_back(synthetic_prototype(params, c));

  std::vector<Sample> samples;
  int serial = 1;
  for (int s = 0; s < params.subjects; ++s) {
    const GrayImage bias = synthetic_bias(params, s);
    const std::string subject = fmt::format("S{:02}", s + 1);
    for (int c = 0; c < params.classes; ++c) {
      for (int r = 1; r <= params.replicates; ++r) {
        const auto stream = (static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(params.classes) +
                             static_cast<std::uint64_t>(c)) *
                                static_cast<std::uint64_t>(params.replicates) +
                            static_cast<std::uint64_t>(r);
        std::mt19937_64 rng(derive_seed(params.seed, kNoiseStream + stream));
        std::vector<double> px(prototypes[c].size());
        for (std::size_t k = 0; k < px.size(); ++k) {
          px[k] = prototypes[c].pixels()[k] + bias.pixels()[k];
          if (params.noise_sigma > 0.0) px[k] += params.noise_sigma * standard_normal(rng);
        }
        Sample sample;
        sample.subject = subject;
        sample.expression = classes[c];
        sample.index = r;
        sample.name = c < static_cast<int>(std::size(kJaffeExpressions))
                          ? format_jaffe_filename({subject, classes[c], r, serial})
                          : fmt::format("{}.{}{}.{}.pgm", subject, classes[c].name, r, serial);
        sample.pixels = std::make_shared<const GrayImage>(params.width, params.height, std::move(px));
        samples.push_back(std::move(sample));
        ++serial;
      }
    }
  }
  return Dataset(std::move(samples));
}

nlohmann::json manifest_json(const Dataset& ds) {
  nlohmann::json files = nlohmann::json::array();
  for (const Sample& s : ds.samples()) {
    files.push_back({{"filename", s.name},
                     {"subject", s.subject},
                     {"class", s.expression.name},
                     {"index", s.index}});
  }
  return nlohmann::json{{"files", std::move(files)}};
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir, const nlohmann::json& extra) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
  for (std::size_t k = 0; k < ds.size(); ++k) {
    (void)parse_jaffe_filename(ds.sample(k).name);  // only JAFFE-style names can be reloaded
    save_image(ds.image(k), dir / ds.sample(k).name);
  }
  nlohmann::json manifest = manifest_json(ds);
  for (const auto& [key, value] : extra.items()) manifest[key] = value;
  std::ofstream out(dir / std::string(kManifestName), std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace minmax_match
