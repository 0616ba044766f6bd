#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "casetl/corpus_model.hpp"
#include "casetl/error.hpp"
#include "casetl/llm_client.hpp"

namespace casetl {

inline constexpr std::string_view kBodyPlaceholder = "{{BODY}}";

// A prompt with exactly one `{{BODY}}` insertion point. Construction
// validates the placeholder count, so an invalid template cannot be rendered.
class PromptTemplate {
 public:
  /// Throws Error{kInvalidTemplate} unless `text` has exactly one placeholder.
  static PromptTemplate Create(std::string name, std::string text);

  const std::string& name() const noexcept { return name_; }
  const std::string& text() const noexcept { return text_; }

  /// Substitutes `body` at the insertion point. Throws Error{kInvalidArgument}
  /// for an empty body.
  std::string Render(std::string_view body) const;

 private:
  PromptTemplate(std::string name, std::string text, std::size_t slot)
      : name_(std::move(name)), text_(std::move(text)), slot_(slot) {}

  std::string name_;
  std::string text_;
  std::size_t slot_;
};

// Shipped templates: timeline, demographics, diagnoses, case_count and the
// timeline ablations (timeline_no_role, timeline_zero_shot,
// timeline_no_conjunction, timeline_interval, timeline_interval_type).
std::vector<std::string> BuiltinTemplateNames();

/// Throws Error{kInvalidArgument} for an unknown name.
PromptTemplate BuiltinTemplate(std::string_view name);

/// Template name is the file stem. Throws Error{kIo | kInvalidTemplate}.
PromptTemplate LoadTemplateFile(const std::filesystem::path& path);

// Task names used in LlmRequest::task and in replay/audit directory layouts.
inline constexpr std::string_view kTaskTimeline = "timeline";
inline constexpr std::string_view kTaskDemographics = "demographics";
inline constexpr std::string_view kTaskDiagnoses = "diagnoses";
inline constexpr std::string_view kTaskCaseCount = "case_count";

// Raised when the backend replied but the reply did not parse. Carries the
// reply so it can still be persisted for audit.
class ExtractionError : public Error {
 public:
  ExtractionError(const Error& cause, std::string raw_reply)
      : Error(cause.code(), cause.detail()), raw_reply_(std::move(raw_reply)) {}

  const std::string& raw_reply() const noexcept { return raw_reply_; }

 private:
  std::string raw_reply_;
};

struct TimelineExtraction {
  TimelineAnnotation timeline;
  std::string raw_reply;
  std::vector<std::size_t> source_lines;  // reply line of each event
  std::size_t skipped_lines = 0;
};

struct DemographicsExtraction {
  std::string case_id;
  DemographicsRecord record;
  std::string raw_reply;
};

struct DiagnosesExtraction {
  DiagnosisList list;
  std::string raw_reply;
};

/// render -> complete -> parse. Throws LlmError or ExtractionError.
TimelineExtraction ExtractTimeline(const CaseDocument& doc,
                                   const PromptTemplate& prompt,
                                   LlmClient& client);
DemographicsExtraction ExtractDemographics(const CaseDocument& doc,
                                           const PromptTemplate& prompt,
                                           LlmClient& client);
DiagnosesExtraction ExtractDiagnoses(const CaseDocument& doc,
                                     const PromptTemplate& prompt,
                                     LlmClient& client);

}  // namespace casetl
