#include "casetl/corpus_model.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>

#include "casetl/error.hpp"
#include "text_util.hpp"

namespace casetl {

using detail::IEquals;
using detail::IStartsWith;
using detail::SplitReply;
using detail::Trim;

std::string ExtractBody(std::string_view raw_document) {
  constexpr std::string_view kBody = "==== Body";
  constexpr std::string_view kRef = "==== Ref";

  std::size_t body_start = std::string_view::npos;
  std::size_t pos = 0;
  while (pos < raw_document.size()) {
    std::size_t eol = raw_document.find('\n', pos);
    std::size_t next = eol == std::string_view::npos ? raw_document.size() : eol + 1;
    std::string_view line = raw_document.substr(pos, next - pos);
    if (line.starts_with(kBody)) {
      body_start = next;
    } else if (body_start != std::string_view::npos && line.starts_with(kRef)) {
      return std::string(Trim(raw_document.substr(body_start, pos - body_start)));
    }
    pos = next;
  }
  if (body_start == std::string_view::npos) {
    throw Error(ErrorCode::kMissingBodyMarker, "no line starting with '==== Body'");
  }
  throw Error(ErrorCode::kMissingRefMarker,
              "no line starting with '==== Ref' after the body marker");
}

std::optional<double> ParseHours(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    ++i;
  }
  std::size_t int_digits = 0;
  std::size_t frac_digits = 0;
  std::size_t j = i;
  while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j, ++int_digits;
  if (j < text.size() && text[j] == '.') {
    ++j;
    while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j, ++frac_digits;
  }
  if (j != text.size() || int_digits + frac_digits == 0) return std::nullopt;

  double value = 0.0;
  std::string_view digits = text.substr(i);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                   value, std::chars_format::fixed);
  if (ec != std::errc() || ptr != digits.data() + digits.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return negative ? -value : value;
}

std::string FormatHours(double hours) {
  std::array<char, 512> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), hours,
                                 std::chars_format::fixed);
  if (ec != std::errc()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot format time value");
  }
  return std::string(buf.data(), ptr);
}

namespace {

std::optional<EventRecord> ParseTimelineRow(std::string_view trimmed) {
  std::string_view row = detail::StripOuterPipes(trimmed);
  std::size_t bar = row.rfind('|');
  if (bar == std::string_view::npos) return std::nullopt;
  // Rows with extra columns (interval outputs, pipes inside the event) are
  // not two-column rows.
  if (row.find('|') != bar) return std::nullopt;
  std::string_view event = Trim(row.substr(0, bar));
  std::string_view time = Trim(row.substr(bar + 1));
  if (event.empty()) return std::nullopt;
  std::optional<double> hours = ParseHours(time);
  if (!hours) return std::nullopt;
  return EventRecord{std::string(event), *hours};
}

}  // namespace

ParsedTimeline ParseTimelineLines(std::string_view text) {
  ParsedTimeline parsed;
  for (const auto& line : SplitReply(text)) {
    if (line.hidden) {
      ++parsed.skipped_lines;
      continue;
    }
    std::string_view trimmed = Trim(line.text);
    if (trimmed.empty()) continue;
    std::optional<EventRecord> record;
    if (!detail::IsFence(trimmed) && !detail::IsTableRule(trimmed)) {
      record = ParseTimelineRow(trimmed);
    }
    if (!record) {
      ++parsed.skipped_lines;
      continue;
    }
    parsed.timeline.events.push_back(std::move(*record));
    parsed.source_lines.push_back(line.number);
  }
  return parsed;
}

ParsedTimeline ParseTimeline(std::string_view text) {
  ParsedTimeline parsed = ParseTimelineLines(text);
  if (parsed.timeline.events.empty()) {
    throw Error(ErrorCode::kEmptyTimeline,
                "no '<event> | <hours>' rows in " +
                    std::to_string(parsed.skipped_lines) + " non-blank lines");
  }
  return parsed;
}

std::string SerializeTimeline(const TimelineAnnotation& timeline) {
  std::string out;
  for (std::size_t i = 0; i < timeline.events.size(); ++i) {
    if (i > 0) out += '\n';
    out += timeline.events[i].event;
    out += " | ";
    out += FormatHours(timeline.events[i].time_hours);
  }
  return out;
}

std::string ToContextString(const TimelineAnnotation& timeline) {
  std::string out;
  for (const auto& e : timeline.events) {
    if (!out.empty()) out += ' ';
    out += '(';
    out += FormatHours(e.time_hours);
    out += ") ";
    out += e.event;
    out += " [SEP]";
  }
  return out;
}

namespace {

constexpr std::string_view kNotSpecified = "Not Specified";

bool IsNotSpecified(std::string_view cell) {
  return IEquals(cell, kNotSpecified) || IEquals(cell, "NotSpecified") ||
         IEquals(cell, "Not specified.");
}

std::optional<std::optional<double>> ParseAgeCell(std::string_view cell) {
  if (IsNotSpecified(cell)) return std::optional<double>{};
  std::size_t end = 0;
  while (end < cell.size() &&
         ((cell[end] >= '0' && cell[end] <= '9') || cell[end] == '.' ||
          cell[end] == '+' || cell[end] == '-')) {
    ++end;
  }
  std::optional<double> age = ParseHours(cell.substr(0, end));
  if (!age || *age < 0.0) return std::nullopt;
  std::string_view unit = Trim(cell.substr(end));
  constexpr std::array<std::string_view, 7> kUnits = {
      "", "years", "year", "years old", "year old", "y", "yo"};
  for (std::string_view u : kUnits) {
    if (IEquals(unit, u)) return std::optional<double>{*age};
  }
  return std::nullopt;
}

std::optional<DemographicsRecord> ParseDemographicsRow(std::string_view trimmed) {
  auto cells = detail::SplitCells(detail::StripOuterPipes(trimmed));
  if (cells.size() != 3) return std::nullopt;
  auto age = ParseAgeCell(cells[0]);
  if (!age || cells[1].empty() || cells[2].empty()) return std::nullopt;

  DemographicsRecord record;
  record.age_years = *age;
  if (IEquals(cells[1], "Male")) {
    record.sex.kind = SexKind::kMale;
  } else if (IEquals(cells[1], "Female")) {
    record.sex.kind = SexKind::kFemale;
  } else if (IsNotSpecified(cells[1])) {
    record.sex.kind = SexKind::kNotSpecified;
  } else {
    record.sex = {SexKind::kCustom, std::string(cells[1])};
  }
  if (!IsNotSpecified(cells[2])) record.ethnicity = std::string(cells[2]);
  return record;
}

}  // namespace

DemographicsRecord ParseDemographics(std::string_view text) {
  for (const auto& line : SplitReply(text)) {
    if (line.hidden) continue;
    std::string_view trimmed = Trim(line.text);
    if (trimmed.empty() || detail::IsFence(trimmed) || detail::IsTableRule(trimmed)) {
      continue;
    }
    if (auto record = ParseDemographicsRow(trimmed)) return *record;
  }
  throw Error(ErrorCode::kMalformedDemographics,
              "no 'age | sex | ethnicity' row in reply");
}

std::string SerializeDemographics(const DemographicsRecord& record) {
  std::string out =
      record.age_years ? FormatHours(*record.age_years) : std::string(kNotSpecified);
  out += " | ";
  switch (record.sex.kind) {
    case SexKind::kMale: out += "Male"; break;
    case SexKind::kFemale: out += "Female"; break;
    case SexKind::kCustom: out += record.sex.custom; break;
    case SexKind::kNotSpecified: out += kNotSpecified; break;
  }
  out += " | ";
  out += record.ethnicity ? *record.ethnicity : std::string(kNotSpecified);
  return out;
}

namespace {

// Lines a model adds around the requested list: preambles, headings and
// sign-offs. Matched case-insensitively against the start of the line.
constexpr std::array<std::string_view, 12> kChatterPrefixes = {
    "here is",    "here are",          "here's",     "sure",
    "certainly",  "okay",              "note:",      "diagnoses:",
    "diagnosis:", "list of diagnoses", "the diagnoses", "the list of diagnoses",
};

bool IsChatter(std::string_view trimmed) {
  if (trimmed.ends_with(':')) return true;
  for (std::string_view p : kChatterPrefixes) {
    if (IStartsWith(trimmed, p)) return true;
  }
  return false;
}

std::string_view StripListMarker(std::string_view s) {
  if (s.starts_with("- ") || s.starts_with("* ") || s.starts_with("+ ")) {
    return Trim(s.substr(2));
  }
  if (s.starts_with("•")) return Trim(s.substr(3));  // bullet
  std::size_t i = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') {
    return Trim(s.substr(i + 2));
  }
  return s;
}

std::string_view StripEmphasis(std::string_view s) {
  while (s.size() >= 4 && s.starts_with("**") && s.ends_with("**")) {
    s = Trim(s.substr(2, s.size() - 4));
  }
  return s;
}

}  // namespace

DiagnosisList ParseDiagnoses(std::string_view text) {
  DiagnosisList list;
  for (const auto& line : SplitReply(text)) {
    if (line.hidden) continue;
    std::string_view trimmed = Trim(line.text);
    if (trimmed.empty() || detail::IsFence(trimmed) || IsChatter(trimmed)) continue;
    std::string_view item = StripEmphasis(StripListMarker(trimmed));
    if (item.empty()) continue;
    list.diagnoses.emplace_back(item);
  }
  if (list.diagnoses.empty()) {
    throw Error(ErrorCode::kEmptyDiagnosisList, "no diagnosis lines in reply");
  }
  return list;
}

std::string SerializeDiagnoses(const DiagnosisList& list) {
  std::string out;
  for (const auto& d : list.diagnoses) {
    out += d;
    out += '\n';
  }
  return out;
}

}  // namespace casetl
