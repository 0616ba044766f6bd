#include "casetl/corpus_filter.hpp"

#include <charconv>
#include <istream>
#include <regex>
#include <string>

#include "casetl/error.hpp"
#include "text_util.hpp"

namespace casetl {

namespace {

const std::regex& CasePattern(bool case_sensitive) {
  static const std::regex kSensitive("(case report|case presenta)");
  static const std::regex kInsensitive("(case report|case presenta)",
                                       std::regex::icase);
  return case_sensitive ? kSensitive : kInsensitive;
}

const std::regex& AgePattern(bool case_sensitive) {
  static const std::regex kSensitive("year-? ?old");
  static const std::regex kInsensitive("year-? ?old", std::regex::icase);
  return case_sensitive ? kSensitive : kInsensitive;
}

}  // namespace

bool RegexScreen(std::string_view body, bool case_sensitive) {
  return std::regex_search(body.begin(), body.end(), CasePattern(case_sensitive)) &&
         std::regex_search(body.begin(), body.end(), AgePattern(case_sensitive));
}

namespace {

std::optional<int> ParseDigits(std::string_view digits) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

CaseCountReply ParseCaseCountReply(std::string_view reply, bool strict) {
  std::string visible;
  for (const auto& line : detail::SplitReply(reply)) {
    if (line.hidden) continue;
    visible += line.text;
    visible += '\n';
  }
  std::string_view answer = detail::Trim(visible);
  if (!answer.empty() && std::all_of(answer.begin(), answer.end(), IsDigit)) {
    if (auto n = ParseDigits(answer)) return {*n, false};
  }
  if (strict) {
    throw Error(ErrorCode::kUnparseableReply,
                "reply is not a bare integer: '" + std::string(answer.substr(0, 80)) + "'");
  }
  // First run of digits that is not part of a decimal number.
  for (std::size_t i = 0; i < answer.size(); ++i) {
    if (!IsDigit(answer[i])) continue;
    std::size_t j = i;
    while (j < answer.size() && IsDigit(answer[j])) ++j;
    bool decimal = (i > 0 && answer[i - 1] == '.' ) ||
                   (j + 1 < answer.size() && answer[j] == '.' && IsDigit(answer[j + 1]));
    if (!decimal) {
      if (auto n = ParseDigits(answer.substr(i, j - i))) return {*n, true};
    }
    i = j;
  }
  throw Error(ErrorCode::kUnparseableReply,
              "no integer in reply: '" + std::string(answer.substr(0, 80)) + "'");
}

CaseCountReply LlmCaseCount(const CaseDocument& doc, const PromptTemplate& prompt,
                            LlmClient& client, bool strict) {
  std::string reply =
      client.Complete({std::string(kTaskCaseCount), doc.id, prompt.Render(doc.body)});
  return ParseCaseCountReply(reply, strict);
}

std::string_view ToString(FilterStatus status) {
  switch (status) {
    case FilterStatus::kAccepted: return "accepted";
    case FilterStatus::kRejectedDocument: return "rejected_document";
    case FilterStatus::kRejectedRegex: return "rejected_regex";
    case FilterStatus::kRejectedCount: return "rejected_count";
    case FilterStatus::kUndecided: return "undecided";
  }
  return "unknown";
}

FilterDecision DecideCase(const CaseDocument& doc, const PromptTemplate& prompt,
                          LlmClient& client, const FilterOptions& options) {
  FilterDecision decision;
  decision.case_id = doc.id;
  decision.passed_regex = RegexScreen(doc.body, options.case_sensitive);
  if (!decision.passed_regex) {
    decision.status = FilterStatus::kRejectedRegex;
    return decision;
  }
  try {
    CaseCountReply reply = LlmCaseCount(doc, prompt, client, options.strict_count);
    decision.llm_case_count = reply.count;
    decision.lenient_parse = reply.lenient;
    decision.accepted = reply.count == 1;
    decision.status =
        decision.accepted ? FilterStatus::kAccepted : FilterStatus::kRejectedCount;
  } catch (const Error& e) {
    decision.status = FilterStatus::kUndecided;
    decision.error = e.what();
  }
  return decision;
}

ClassificationMetrics ComputeClassificationMetrics(const ConfusionCounts& c) {
  auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  ClassificationMetrics m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.accuracy = ratio(c.tp + c.tn, c.total());
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

namespace {

std::vector<std::string> SplitCsvRow(std::string_view row) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    char c = row[i];
    if (quoted) {
      if (c == '"' && i + 1 < row.size() && row[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kInvalidArgument, "unterminated quote in CSV row");
  return fields;
}

}  // namespace

std::vector<BenchmarkLabel> ReadBenchmarkLabels(std::istream& in) {
  std::vector<BenchmarkLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view trimmed = detail::Trim(line);
    if (trimmed.empty()) continue;
    auto fields = SplitCsvRow(trimmed);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == 3 && detail::IEquals(detail::Trim(fields[0]), "case_id")) {
        continue;
      }
    }
    if (fields.size() != 3) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label CSV line " + std::to_string(line_no) + ": expected 3 fields");
    }
    std::string_view label = detail::Trim(fields[2]);
    if (label != "0" && label != "1") {
      throw Error(ErrorCode::kInvalidArgument,
                  "label CSV line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    labels.push_back({std::string(detail::Trim(fields[0])),
                      std::string(detail::Trim(fields[1])), label == "1"});
  }
  return labels;
}

BenchmarkResult ScoreBenchmark(const std::vector<BenchmarkLabel>& labels,
                               const std::map<std::string, bool>& accepted) {
  BenchmarkResult result;
  for (const auto& label : labels) {
    auto it = accepted.find(label.case_id);
    if (it == accepted.end()) {
      result.missing.push_back(label.case_id);
      continue;
    }
    ConfusionCounts one;
    bool predicted = it->second;
    if (predicted && label.single_case_report) one.tp = 1;
    if (predicted && !label.single_case_report) one.fp = 1;
    if (!predicted && !label.single_case_report) one.tn = 1;
    if (!predicted && label.single_case_report) one.fn = 1;
    result.per_diagnosis[label.diagnosis] += one;
    result.overall += one;
  }
  return result;
}

}  // namespace casetl
