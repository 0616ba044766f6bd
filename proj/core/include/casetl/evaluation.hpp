#pragma once

// Per-case and corpus-level evaluation of predicted timelines against
// reference annotations, built from the alignment and temporal metrics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "casetl/alignment.hpp"
#include "casetl/corpus_model.hpp"
#include "casetl/temporal_metrics.hpp"

namespace casetl {

struct EvaluationConfig {
  double tau = kDefaultTau;
  double s_max = kDefaultSmaxHours;
  StratumBounds bounds = StratumBounds::Default();
  std::vector<double> sweep_taus = DefaultSweepTaus();
};

struct CaseEvaluation {
  std::string case_id;
  std::size_t n_ref = 0;
  std::size_t n_pred = 0;
  std::size_t ref_skipped_lines = 0;
  std::size_t pred_skipped_lines = 0;
  std::vector<MatchedPair> pairs;    // full best match, selection order
  std::vector<MatchedPair> matched;  // pairs within tau
  std::optional<double> match_rate;  // undefined for an empty reference
  ConcordanceCounts concordance;
  std::optional<double> c_index;
  DiscrepancySet discrepancies = DiscrepancySet::FromAbsoluteErrors({}, kDefaultSmaxHours);
  std::optional<double> aultc;
  std::vector<StratumResult> strata;
  std::vector<SweepPoint> sweep;  // empty for an empty reference
};

CaseEvaluation EvaluateCase(std::string case_id, const ParsedTimeline& ref,
                            const ParsedTimeline& pred, DistanceMetric& metric,
                            const EvaluationConfig& config);

struct Summary {
  std::size_t n_defined = 0;
  std::optional<double> mean;
  std::optional<double> median;
};

Summary Summarize(std::span<const std::optional<double>> values);

struct AggregateSweepPoint {
  double tau = 0.0;
  std::optional<double> match_rate;      // pooled: matched / reference events
  std::optional<double> c_index_median;  // over cases where defined
  std::optional<double> c_index_pooled;  // pooled comparable pairs
  std::optional<double> aultc;           // pooled discrepancies
};

struct CorpusAggregate {
  std::size_t n_cases = 0;
  Summary match_rate;
  std::optional<double> match_rate_pooled;
  Summary c_index;
  std::optional<double> c_index_pooled;
  Summary aultc;
  DiscrepancySet pooled_discrepancies = DiscrepancySet::FromAbsoluteErrors({}, kDefaultSmaxHours);
  std::optional<double> aultc_pooled;
  std::vector<StratumResult> strata;  // pooled over all matched pairs
  std::vector<AggregateSweepPoint> sweep;
};

CorpusAggregate Aggregate(std::span<const CaseEvaluation> cases,
                          const EvaluationConfig& config);

// (x, F(x)) at every distinct discrepancy value, for plotting the CDF.
std::vector<std::pair<double, double>> CdfStepPoints(const DiscrepancySet& d);

}  // namespace casetl
