#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace minmax_match {

enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  CorruptData,
  IoError,
  OutOfBounds,
  InvalidGain,
  InvalidWindow,
  InvalidParams,
  NegativeInput,
  DimensionMismatch,
  EmptyGallery,
  EmptyDataset,
  UnparseableName,
  UnknownExpressionCode,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` identifies the failure
/// class; `what()` carries a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace minmax_match
