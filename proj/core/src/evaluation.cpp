#include "casetl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "casetl/error.hpp"

namespace casetl {

CaseEvaluation EvaluateCase(std::string case_id, const ParsedTimeline& ref,
                            const ParsedTimeline& pred, DistanceMetric& metric,
                            const EvaluationConfig& config) {
  CaseEvaluation out;
  out.case_id = std::move(case_id);
  out.n_ref = ref.timeline.events.size();
  out.n_pred = pred.timeline.events.size();
  out.ref_skipped_lines = ref.skipped_lines;
  out.pred_skipped_lines = pred.skipped_lines;
  out.pairs = BestMatch(ref.timeline, pred.timeline, metric);

  if (out.n_ref > 0) {
    ThresholdResult threshold = ApplyThreshold(out.pairs, out.n_ref, config.tau);
    out.match_rate = threshold.match_rate;
    out.matched = std::move(threshold.matched);
    out.sweep = ThresholdSweep(out.pairs, out.n_ref, config.sweep_taus, config.s_max);
  }
  std::vector<double> t_ref;
  std::vector<double> t_pred;
  for (const auto& p : out.matched) {
    t_ref.push_back(p.t_ref);
    t_pred.push_back(p.t_pred);
  }
  out.concordance = CountConcordance(t_ref, t_pred);
  out.c_index = out.concordance.index();
  out.discrepancies = BuildDiscrepancies(out.matched, config.s_max);
  out.aultc = TryAultc(out.discrepancies);
  out.strata = StratifiedDiscrepancy(out.matched, config.bounds, config.s_max);
  return out;
}

Summary Summarize(std::span<const std::optional<double>> values) {
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) defined.push_back(*v);
  }
  Summary s;
  s.n_defined = defined.size();
  if (defined.empty()) return s;
  s.mean = std::accumulate(defined.begin(), defined.end(), 0.0) /
           static_cast<double>(defined.size());
  s.median = Median(std::move(defined));
  return s;
}

namespace {

std::optional<double> Ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

CorpusAggregate Aggregate(std::span<const CaseEvaluation> cases,
                          const EvaluationConfig& config) {
  CorpusAggregate agg;
  agg.n_cases = cases.size();

  std::vector<std::optional<double>> rates;
  std::vector<std::optional<double>> cindices;
  std::vector<std::optional<double>> areas;
  std::size_t matched_total = 0;
  std::size_t ref_total = 0;
  ConcordanceCounts pooled_counts;
  std::vector<double> abs_errors;
  std::vector<MatchedPair> all_matched;
  for (const auto& c : cases) {
    rates.push_back(c.match_rate);
    cindices.push_back(c.c_index);
    areas.push_back(c.aultc);
    if (c.n_ref > 0) {
      matched_total += c.matched.size();
      ref_total += c.n_ref;
    }
    pooled_counts += c.concordance;
    for (const auto& p : c.matched) {
      abs_errors.push_back(std::abs(p.t_pred - p.t_ref));
      all_matched.push_back(p);
    }
  }
  agg.match_rate = Summarize(rates);
  agg.match_rate_pooled = Ratio(matched_total, ref_total);
  agg.c_index = Summarize(cindices);
  agg.c_index_pooled = pooled_counts.index();
  agg.aultc = Summarize(areas);
  agg.pooled_discrepancies = DiscrepancySet::FromAbsoluteErrors(std::move(abs_errors), config.s_max);
  agg.aultc_pooled = TryAultc(agg.pooled_discrepancies);
  agg.strata = StratifiedDiscrepancy(all_matched, config.bounds, config.s_max);

  for (double tau : config.sweep_taus) {
    std::size_t matched = 0;
    std::size_t refs = 0;
    ConcordanceCounts counts;
    std::vector<std::optional<double>> per_case;
    std::vector<double> errors;
    for (const auto& c : cases) {
      if (c.n_ref == 0) continue;
      ThresholdResult r = ApplyThreshold(c.pairs, c.n_ref, tau);
      matched += r.matched.size();
      refs += c.n_ref;
      std::vector<double> tr;
      std::vector<double> tp;
      for (const auto& p : r.matched) {
        tr.push_back(p.t_ref);
        tp.push_back(p.t_pred);
        errors.push_back(std::abs(p.t_pred - p.t_ref));
      }
      ConcordanceCounts cc = CountConcordance(tr, tp);
      per_case.push_back(cc.index());
      counts += cc;
    }
    AggregateSweepPoint point;
    point.tau = tau;
    point.match_rate = Ratio(matched, refs);
    point.c_index_median = Summarize(per_case).median;
    point.c_index_pooled = counts.index();
    point.aultc = TryAultc(DiscrepancySet::FromAbsoluteErrors(std::move(errors), config.s_max));
    agg.sweep.push_back(point);
  }
  return agg;
}

std::vector<std::pair<double, double>> CdfStepPoints(const DiscrepancySet& d) {
  std::vector<std::pair<double, double>> points;
  const auto& v = d.values();
  const double k = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    points.emplace_back(v[i], static_cast<double>(i + 1) / k);
  }
  return points;
}

}  // namespace casetl
