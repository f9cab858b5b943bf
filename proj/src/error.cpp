#include "heatdecon/error.hpp"

namespace heatdecon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidVertexCount: return "InvalidVertexCount";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kSingletonGraph: return "SingletonGraph";
    case ErrorCode::kInvalidMetric: return "InvalidMetric";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEigensolverFailure: return "EigensolverFailure";
    case ErrorCode::kNegativeTime: return "NegativeTime";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kDuplicateVertex: return "DuplicateVertex";
    case ErrorCode::kNumericallySingular: return "NumericallySingular";
    case ErrorCode::kNonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::kNonPositiveTime: return "NonPositiveTime";
    case ErrorCode::kConditionViolated: return "ConditionViolated";
    case ErrorCode::kInvalidSignPattern: return "InvalidSignPattern";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMaxIterations: return "MaxIterations";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kGenerationFailed: return "GenerationFailed";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace heatdecon
