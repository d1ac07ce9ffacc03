#include "ggmc/error.hpp"

namespace ggmc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroVarianceColumn: return "ZeroVarianceColumn";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotStandardized: return "NotStandardized";
    case ErrorCode::RankCollapse: return "RankCollapse";
    case ErrorCode::DecompositionFailure: return "DecompositionFailure";
    case ErrorCode::DegenerateNode: return "DegenerateNode";
    case ErrorCode::MissingResiduals: return "MissingResiduals";
    case ErrorCode::TooLargeForDense: return "TooLargeForDense";
    case ErrorCode::UnsupportedForRidge: return "UnsupportedForRidge";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MagicMismatch: return "MagicMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what,
             std::optional<std::size_t> node)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      detail_(what),
      node_(node) {}

Error::Error(Verbatim, ErrorCode code, const std::string& message, std::string detail,
             std::optional<std::size_t> node)
    : std::runtime_error(message), code_(code), detail_(std::move(detail)), node_(node) {}

}  // namespace ggmc
