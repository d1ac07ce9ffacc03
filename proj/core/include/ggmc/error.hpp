#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ggmc {

enum class ErrorCode {
  ZeroVarianceColumn,
  NonFiniteInput,
  InvalidArgument,
  DimensionMismatch,
  NotStandardized,
  RankCollapse,
  DecompositionFailure,
  DegenerateNode,
  MissingResiduals,
  TooLargeForDense,
  UnsupportedForRidge,
  RankDeficient,
  SingularCovariance,
  SolveFailure,
  NotPositiveDefinite,
  ParseError,
  MagicMismatch,
  TruncatedFile,
  IoError,
  LengthMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; the code identifies the failure and
// `node()` carries the offending variable index where one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> node = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> node() const noexcept { return node_; }
  // Message without the leading code name.
  const std::string& detail() const noexcept { return detail_; }

 protected:
  // Full message supplied verbatim.
  struct Verbatim {};
  Error(Verbatim, ErrorCode code, const std::string& message, std::string detail,
        std::optional<std::size_t> node);

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> node_;
};

}  // namespace ggmc
