#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "minmax_match/classify.hpp"
#include "minmax_match/image.hpp"

namespace minmax_match {

/// The seven JAFFE expression classes, in canonical id order.
struct JaffeExpression {
  std::string_view code;
  std::string_view name;
};
inline constexpr JaffeExpression kJaffeExpressions[] = {
    {"AN", "anger"},   {"DI", "disgust"}, {"FE", "fear"},     {"HA", "happiness"},
    {"NE", "neutral"}, {"SA", "sadness"}, {"SU", "surprise"},
};

[[nodiscard]] EmotionClass jaffe_class(int id);

struct JaffeName {
  std::string subject;
  EmotionClass expression;
  int index = 0;   ///< replicate number k in <EXPR><k>
  int serial = 0;  ///< trailing image number
};

/// Parses `<SUBJ>.<EXPR><k>.<n>.<ext>`, e.g. "KA.AN1.39.pgm".
/// Errors: UnparseableName, UnknownExpressionCode.
[[nodiscard]] JaffeName parse_jaffe_filename(std::string_view name);

/// Inverse of parse_jaffe_filename. `expression.id` must be a JAFFE id.
[[nodiscard]] std::string format_jaffe_filename(const JaffeName& name, std::string_view ext = "pgm");

struct Sample {
  std::string subject;
  EmotionClass expression;
  int index = 1;
  std::string name;  ///< file name (JAFFE style)

  // Exactly one of these is set: a path decoded on demand, or pixels held
  // in memory.
  std::filesystem::path path;
  std::shared_ptr<const GrayImage> pixels;
};

/// Labeled image collection. Samples are kept sorted by
/// (subject, class id, index), so contents never depend on ingestion order.
class Dataset {
 public:
  /// Throws Error{EmptyDataset} for no samples and Error{InvalidParams} for
  /// duplicate (subject, class, index) keys or inconsistent class names.
  explicit Dataset(std::vector<Sample> samples);

  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] const Sample& sample(std::size_t k) const noexcept { return samples_[k]; }
  [[nodiscard]] const std::vector<Sample>& samples() const noexcept { return samples_; }
  /// Classes present, ordered by id.
  [[nodiscard]] const std::vector<EmotionClass>& classes() const noexcept { return classes_; }
  [[nodiscard]] const std::vector<std::string>& subjects() const noexcept { return subjects_; }

  /// Position of a class id within classes(); -1 if absent.
  [[nodiscard]] int class_position(int class_id) const noexcept;

  /// Pixels of sample k, decoding from disk if not held in memory.
  [[nodiscard]] GrayImage image(std::size_t k) const;

  /// Decodes every on-disk sample into memory.
  void materialize();

 private:
  std::vector<Sample> samples_;
  std::vector<EmotionClass> classes_;
  std::vector<std::string> subjects_;
};

struct LoadSummary {
  std::size_t images = 0;
  std::size_t subjects = 0;
  std::size_t classes = 0;
  std::vector<std::string> skipped;  ///< names that are not JAFFE style
  std::vector<std::string> failed;   ///< "name: reason" for undecodable files
};

inline constexpr std::string_view kManifestName = "manifest.json";

/// Loads every parseable grayscale image in `dir` (non-recursive). Bad names
/// are skipped and bad files counted in `summary`; both are non-fatal.
/// Errors: FileNotFound (no such directory), EmptyDataset.
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& dir, LoadSummary& summary);
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& dir);

struct SyntheticParams {
  int classes = 7;
  int subjects = 3;
  int replicates = 3;
  std::size_t height = 32;
  std::size_t width = 32;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
};

/// Smallest accepted synthetic image side: the default window edge.
inline constexpr std::size_t kMinSyntheticSide = 11;

/// Class prototype image before any subject bias or noise.
[[nodiscard]] GrayImage synthetic_prototype(const SyntheticParams& params, int class_id);

/// Smooth additive offset field of one subject.
[[nodiscard]] GrayImage synthetic_bias(const SyntheticParams& params, int subject);

/// Each sample = class prototype + subject bias + N(0, noise_sigma^2)
/// white noise. Classes use JAFFE names when there are at most seven.
/// Throws Error{InvalidParams} when classes < 2, subjects < 1,
/// replicates < 2, or a side is below kMinSyntheticSide.
[[nodiscard]] Dataset generate_synthetic(const SyntheticParams& params);

/// {"files": [{"filename", "subject", "class", "index"}, ...]}
[[nodiscard]] nlohmann::json manifest_json(const Dataset& ds);

/// Writes every sample as a P5 PGM named by sample.name plus
/// manifest.json (with `extra` merged at top level).
void write_dataset(const Dataset& ds, const std::filesystem::path& dir,
                   const nlohmann::json& extra = nlohmann::json::object());

}  // namespace minmax_match
