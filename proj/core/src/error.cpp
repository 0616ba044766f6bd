#include "casetl/error.hpp"

namespace casetl {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingBodyMarker: return "MissingBodyMarker";
    case ErrorCode::kMissingRefMarker: return "MissingRefMarker";
    case ErrorCode::kEmptyTimeline: return "EmptyTimeline";
    case ErrorCode::kMalformedDemographics: return "MalformedDemographics";
    case ErrorCode::kEmptyDiagnosisList: return "EmptyDiagnosisList";
    case ErrorCode::kUnparseableReply: return "UnparseableReply";
    case ErrorCode::kLlmFailure: return "LlmFailure";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kUndefinedCdf: return "UndefinedCdf";
    case ErrorCode::kUndefinedAultc: return "UndefinedAultc";
    case ErrorCode::kInvalidTemplate: return "InvalidTemplate";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace casetl
