#pragma once

// Core record types plus the parsers and serializers for PMOA documents,
// bar-separated timeline annotations, demographics rows and diagnosis lists.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace casetl {

struct CaseDocument {
  std::string id;
  std::string body;
};

struct EventRecord {
  std::string event;
  double time_hours = 0.0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct TimelineAnnotation {
  std::string case_id;
  std::vector<EventRecord> events;  // source order

  friend bool operator==(const TimelineAnnotation&,
                         const TimelineAnnotation&) = default;
};

enum class SexKind { kMale, kFemale, kCustom, kNotSpecified };

struct Sex {
  SexKind kind = SexKind::kNotSpecified;
  std::string custom;  // set only for kCustom

  friend bool operator==(const Sex&, const Sex&) = default;
};

struct DemographicsRecord {
  std::optional<double> age_years;
  Sex sex;
  std::optional<std::string> ethnicity;  // nullopt == Not Specified

  friend bool operator==(const DemographicsRecord&,
                         const DemographicsRecord&) = default;
};

struct DiagnosisList {
  std::string case_id;
  std::vector<std::string> diagnoses;  // primary diagnosis first

  friend bool operator==(const DiagnosisList&, const DiagnosisList&) = default;
};

// Result of a tolerant line-oriented parse. `source_lines` holds the 1-based
// reply line each record came from, so every record can be traced back to
// the raw text it was read from.
struct ParsedTimeline {
  TimelineAnnotation timeline;
  std::vector<std::size_t> source_lines;
  std::size_t skipped_lines = 0;
};

/// Returns the trimmed text between the `==== Body` marker line and the next
/// line starting with `==== Ref`. When the body marker repeats before the
/// reference marker, the span starts after the last repetition.
/// Throws Error{kMissingBodyMarker | kMissingRefMarker}.
std::string ExtractBody(std::string_view raw_document);

/// Tolerant parse: never throws, may return an empty timeline.
ParsedTimeline ParseTimelineLines(std::string_view text);

/// Like ParseTimelineLines but an empty result is a failed extraction.
/// Throws Error{kEmptyTimeline}.
ParsedTimeline ParseTimeline(std::string_view text);

std::string SerializeTimeline(const TimelineAnnotation& timeline);

/// "(t1) e1 [SEP] (t2) e2 [SEP] ..." in source order; empty for no events.
std::string ToContextString(const TimelineAnnotation& timeline);

/// Throws Error{kMalformedDemographics}.
DemographicsRecord ParseDemographics(std::string_view text);
std::string SerializeDemographics(const DemographicsRecord& record);

/// Throws Error{kEmptyDiagnosisList}.
DiagnosisList ParseDiagnoses(std::string_view text);
std::string SerializeDiagnoses(const DiagnosisList& list);

// Shortest fixed-notation rendering that parses back to the same double,
// e.g. -72, 0.5, 1e21 -> "1000000000000000000000".
std::string FormatHours(double hours);

// Accepts [+-]digits[.digits] only (no exponent, no unit suffix).
std::optional<double> ParseHours(std::string_view text);

}  // namespace casetl
