#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace casetl {

enum class ErrorCode {
  kMissingBodyMarker,
  kMissingRefMarker,
  kEmptyTimeline,
  kMalformedDemographics,
  kEmptyDiagnosisList,
  kUnparseableReply,
  kLlmFailure,
  kEmptyReference,
  kUndefinedCdf,
  kUndefinedAultc,
  kInvalidTemplate,
  kInvalidArgument,
  kIo,
};

std::string_view ToString(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ToString(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // what() without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace casetl
