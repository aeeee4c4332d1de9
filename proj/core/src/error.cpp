#include "minmax_match/error.hpp"

namespace minmax_match {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptData: return "CorruptData";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidGain: return "InvalidGain";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyGallery: return "EmptyGallery";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnparseableName: return "UnparseableName";
    case ErrorCode::UnknownExpressionCode: return "UnknownExpressionCode";
  }
  return "Unknown";
}

}  // namespace minmax_match
