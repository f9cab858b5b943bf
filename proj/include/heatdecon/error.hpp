#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heatdecon {

enum class ErrorCode {
  // graph construction
  kInvalidVertexCount,
  kIndexOutOfRange,
  kDuplicateEdge,
  kSelfLoop,
  kNonPositiveWeight,
  kDisconnectedGraph,
  kSingletonGraph,
  kInvalidMetric,
  kParseError,
  // heat semigroup
  kEigensolverFailure,
  kNegativeTime,
  kDimensionMismatch,
  kEmptySupport,
  kDuplicateVertex,
  kNumericallySingular,
  // bounds
  kNonPositiveDistance,
  kNonPositiveTime,
  kConditionViolated,
  // certificate / recovery
  kInvalidSignPattern,
  kInvalidArgument,
  kMaxIterations,
  kTooLarge,
  // harness
  kGenerationFailed,
  kConfigInvalid,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace heatdecon
