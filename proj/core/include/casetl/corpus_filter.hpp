#pragma once

// Two-stage case-report identification: a regex screen on the body text, then
// an LLM count of case reports in the document. Also the confusion-matrix
// metrics used to score the filter against labeled benchmarks.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "casetl/corpus_model.hpp"
#include "casetl/extraction.hpp"
#include "casetl/llm_client.hpp"

namespace casetl {

/// True iff the body matches both `(case report|case presenta)` and
/// `year-? ?old`. Case-insensitive unless `case_sensitive`.
bool RegexScreen(std::string_view body, bool case_sensitive = false);

struct CaseCountReply {
  int count = 0;
  bool lenient = false;  // reply was not a bare integer
};

/// A bare integer (after dropping any reasoning block) parses strictly.
/// Otherwise the first integer token is taken and `lenient` is set, unless
/// `strict`, in which case the reply is rejected.
/// Throws Error{kUnparseableReply}.
CaseCountReply ParseCaseCountReply(std::string_view reply, bool strict = false);

/// Sends the case-count prompt followed by the body. Throws LlmError or
/// Error{kUnparseableReply}.
CaseCountReply LlmCaseCount(const CaseDocument& doc, const PromptTemplate& prompt,
                            LlmClient& client, bool strict = false);

enum class FilterStatus {
  kAccepted,
  kRejectedDocument,  // body markers missing
  kRejectedRegex,
  kRejectedCount,     // LLM count != 1
  kUndecided,         // LLM failure or unparseable reply
};

std::string_view ToString(FilterStatus status);

struct FilterDecision {
  std::string case_id;
  bool passed_regex = false;
  std::optional<int> llm_case_count;
  bool lenient_parse = false;
  bool accepted = false;  // implies passed_regex && llm_case_count == 1
  FilterStatus status = FilterStatus::kRejectedRegex;
  std::string error;
};

struct FilterOptions {
  bool case_sensitive = false;
  bool strict_count = false;
};

/// Never throws for per-document failures; they become kUndecided.
FilterDecision DecideCase(const CaseDocument& doc, const PromptTemplate& prompt,
                          LlmClient& client, const FilterOptions& options = {});

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp, fp += o.fp, tn += o.tn, fn += o.fn;
    return *this;
  }
};

// nullopt marks a metric whose denominator is zero.
struct ClassificationMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> accuracy;
  std::optional<double> f1;
};

ClassificationMetrics ComputeClassificationMetrics(const ConfusionCounts& c);

struct BenchmarkLabel {
  std::string case_id;
  std::string diagnosis;
  bool single_case_report = false;
};

/// CSV with header `case_id,diagnosis,label`, label in {0,1}. Double-quoted
/// fields are supported. Throws Error{kInvalidArgument} on a malformed row.
std::vector<BenchmarkLabel> ReadBenchmarkLabels(std::istream& in);

struct BenchmarkResult {
  std::map<std::string, ConfusionCounts> per_diagnosis;
  ConfusionCounts overall;
  std::vector<std::string> missing;  // labeled ids with no filter decision
};

/// A case counts as predicted positive iff its decision is accepted.
BenchmarkResult ScoreBenchmark(const std::vector<BenchmarkLabel>& labels,
                               const std::map<std::string, bool>& accepted);

}  // namespace casetl
