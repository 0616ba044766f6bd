#include "casetl/temporal_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "casetl/error.hpp"

namespace casetl {

namespace {

// Fenwick tree over ranks 0..n-1.
class CountTree {
 public:
  explicit CountTree(std::size_t n) : tree_(n + 1, 0) {}

  void Add(std::size_t rank) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }

  // Number of inserted ranks < rank.
  std::uint64_t CountBelow(std::size_t rank) const {
    std::uint64_t sum = 0;
    for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

void RequireFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be finite");
    }
  }
}

}  // namespace

ConcordanceCounts CountConcordance(std::span<const double> t_ref,
                                   std::span<const double> t_pred) {
  if (t_ref.size() != t_pred.size()) {
    throw Error(ErrorCode::kInvalidArgument, "reference and predicted times differ in length");
  }
  RequireFinite(t_ref, "reference times");
  RequireFinite(t_pred, "predicted times");
  const std::size_t n = t_ref.size();

  std::vector<double> pred_sorted(t_pred.begin(), t_pred.end());
  std::sort(pred_sorted.begin(), pred_sorted.end());
  pred_sorted.erase(std::unique(pred_sorted.begin(), pred_sorted.end()), pred_sorted.end());
  auto rank_of = [&](double t) {
    return static_cast<std::size_t>(
        std::lower_bound(pred_sorted.begin(), pred_sorted.end(), t) - pred_sorted.begin());
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return t_ref[a] < t_ref[b]; });

  // Walk groups of equal reference time in increasing order. Everything in
  // the tree has a strictly smaller reference time, so each earlier element
  // with a smaller predicted time is concordant and each with a larger one is
  // discordant; equal predicted times are not comparable.
  CountTree tree(pred_sorted.size());
  ConcordanceCounts counts;
  std::uint64_t inserted = 0;
  std::size_t group_start = 0;
  while (group_start < n) {
    std::size_t group_end = group_start;
    while (group_end < n && t_ref[order[group_end]] == t_ref[order[group_start]]) ++group_end;
    for (std::size_t k = group_start; k < group_end; ++k) {
      std::size_t rank = rank_of(t_pred[order[k]]);
      std::uint64_t below = tree.CountBelow(rank);
      std::uint64_t at_or_below = tree.CountBelow(rank + 1);
      counts.concordant += below;
      counts.comparable += below + (inserted - at_or_below);
    }
    for (std::size_t k = group_start; k < group_end; ++k) {
      tree.Add(rank_of(t_pred[order[k]]));
      ++inserted;
    }
    group_start = group_end;
  }
  return counts;
}

std::optional<double> ConcordanceIndex(std::span<const double> t_ref,
                                       std::span<const double> t_pred) {
  return CountConcordance(t_ref, t_pred).index();
}

std::optional<double> ConcordanceIndex(std::span<const MatchedPair> pairs) {
  std::vector<double> t_ref;
  std::vector<double> t_pred;
  t_ref.reserve(pairs.size());
  t_pred.reserve(pairs.size());
  for (const auto& p : pairs) {
    t_ref.push_back(p.t_ref);
    t_pred.push_back(p.t_pred);
  }
  return ConcordanceIndex(t_ref, t_pred);
}

double LogTimeLoss(double t_pred, double t_ref, double s_max) {
  if (!(s_max > 0.0)) throw Error(ErrorCode::kInvalidArgument, "s_max must be > 0");
  return std::log1p(std::min(std::abs(t_pred - t_ref), s_max));
}

DiscrepancySet DiscrepancySet::FromAbsoluteErrors(std::vector<double> abs_errors_hours,
                                                  double s_max) {
  if (!(s_max > 0.0) || !std::isfinite(s_max)) {
    throw Error(ErrorCode::kInvalidArgument, "s_max must be a finite value > 0");
  }
  for (double& e : abs_errors_hours) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw Error(ErrorCode::kInvalidArgument, "absolute errors must be finite and >= 0");
    }
    e = std::log1p(std::min(e, s_max));
  }
  std::sort(abs_errors_hours.begin(), abs_errors_hours.end());
  return DiscrepancySet(std::move(abs_errors_hours), s_max, std::log1p(s_max));
}

DiscrepancySet BuildDiscrepancies(std::span<const MatchedPair> matched, double s_max) {
  std::vector<double> errors;
  errors.reserve(matched.size());
  for (const auto& p : matched) errors.push_back(std::abs(p.t_pred - p.t_ref));
  return DiscrepancySet::FromAbsoluteErrors(std::move(errors), s_max);
}

double Ltcdf(const DiscrepancySet& d, double x) {
  if (d.empty()) throw Error(ErrorCode::kUndefinedCdf, "no discrepancies");
  const auto& v = d.values();
  auto count = std::upper_bound(v.begin(), v.end(), x) - v.begin();
  return static_cast<double>(count) / static_cast<double>(v.size());
}

double Aultc(const DiscrepancySet& d) {
  if (d.empty()) throw Error(ErrorCode::kUndefinedAultc, "no discrepancies");
  // F steps up by 1/k at each x_(i), so its integral over [0, L] is
  // (1/k) * sum(L - x_(i)). Exact zeros are counted separately so the
  // all-zero case divides k*L by itself.
  const double upper = d.upper();
  std::size_t zeros = 0;
  double partial = 0.0;
  for (double x : d.values()) {
    if (x == 0.0) {
      ++zeros;
    } else {
      partial += upper - x;
    }
  }
  const double k = static_cast<double>(d.size());
  double area = static_cast<double>(zeros) * upper + partial;
  return std::clamp(area / (k * upper), 0.0, 1.0);
}

std::optional<double> TryAultc(const DiscrepancySet& d) {
  if (d.empty()) return std::nullopt;
  return Aultc(d);
}

StratumBounds StratumBounds::Default() {
  return StratumBounds({0.0, 1.0, 24.0, 168.0, 8760.0,
                        std::numeric_limits<double>::infinity()});
}

StratumBounds StratumBounds::Create(std::vector<double> upper_bounds) {
  if (upper_bounds.size() < 2 || upper_bounds.front() != 0.0 ||
      upper_bounds.back() != std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kInvalidArgument, "stratum bounds must start at 0 and end at inf");
  }
  for (std::size_t i = 1; i < upper_bounds.size(); ++i) {
    if (!(upper_bounds[i] > upper_bounds[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "stratum bounds must increase strictly");
    }
  }
  return StratumBounds(std::move(upper_bounds));
}

std::size_t StratumBounds::BucketOf(double t_ref) const {
  double magnitude = std::abs(t_ref);
  if (magnitude == 0.0) return 0;
  auto it = std::lower_bound(upper_.begin() + 1, upper_.end(), magnitude);
  return static_cast<std::size_t>(it - upper_.begin());
}

std::string StratumBounds::Label(std::size_t bucket) const {
  double upper = upper_.at(bucket);
  if (bucket == 0) return "presentation";
  if (std::isinf(upper)) return "beyond";
  if (upper == 1.0) return "hour";
  if (upper == 24.0) return "day";
  if (upper == 168.0) return "week";
  if (upper == 8760.0) return "year";
  return "<=" + FormatHours(upper) + "h";
}

double Median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "median of no values");
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

std::vector<StratumResult> StratifiedDiscrepancy(std::span<const MatchedPair> matched,
                                                 const StratumBounds& bounds, double s_max) {
  std::vector<std::vector<double>> errors(bounds.size());
  for (const auto& p : matched) {
    errors[bounds.BucketOf(p.t_ref)].push_back(std::abs(p.t_pred - p.t_ref));
  }
  std::vector<StratumResult> out;
  out.reserve(bounds.size());
  for (std::size_t b = 0; b < bounds.size(); ++b) {
    std::optional<double> median_error;
    if (!errors[b].empty()) median_error = Median(errors[b]);
    auto set = DiscrepancySet::FromAbsoluteErrors(std::move(errors[b]), s_max);
    std::optional<double> median_log;
    if (!set.empty()) median_log = Median(set.values());
    std::optional<double> area = TryAultc(set);
    out.push_back({bounds.Label(b), bounds.upper_bounds()[b], std::move(set), area,
                   median_error, median_log});
  }
  return out;
}

std::vector<double> DefaultSweepTaus() {
  std::vector<double> taus;
  for (int i = 1; i <= 25; ++i) taus.push_back(i / 100.0);
  return taus;
}

std::vector<SweepPoint> ThresholdSweep(std::span<const MatchedPair> pairs,
                                       std::size_t ref_size, std::span<const double> taus,
                                       double s_max) {
  if (taus.empty()) throw Error(ErrorCode::kInvalidArgument, "empty tau grid");
  std::vector<SweepPoint> points;
  points.reserve(taus.size());
  for (double tau : taus) {
    ThresholdResult result = ApplyThreshold(pairs, ref_size, tau);
    points.push_back({tau, result.match_rate, ConcordanceIndex(result.matched),
                      TryAultc(BuildDiscrepancies(result.matched, s_max))});
  }
  return points;
}

}  // namespace casetl
