#pragma once

// Temporal evaluation of matched events: concordance of orderings, log-time
// discrepancies, their empirical CDF, the normalized area under it (AULTC),
// stratification by distance from presentation, and the threshold sweep.
//
// Time unit is hours throughout; logarithms are natural.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casetl/alignment.hpp"

namespace casetl {

inline constexpr double kDefaultSmaxHours = 8760.0;
inline constexpr double kDefaultTau = 0.1;

struct ConcordanceCounts {
  std::uint64_t concordant = 0;
  std::uint64_t comparable = 0;  // t_ref and t_pred both differ

  std::optional<double> index() const {
    if (comparable == 0) return std::nullopt;
    return static_cast<double>(concordant) / static_cast<double>(comparable);
  }
  ConcordanceCounts& operator+=(const ConcordanceCounts& o) {
    concordant += o.concordant;
    comparable += o.comparable;
    return *this;
  }
};

/// O(n log n) count over all i < j. Throws Error{kInvalidArgument} when the
/// spans differ in length.
ConcordanceCounts CountConcordance(std::span<const double> t_ref,
                                   std::span<const double> t_pred);

/// nullopt when no pair is comparable.
std::optional<double> ConcordanceIndex(std::span<const double> t_ref,
                                       std::span<const double> t_pred);
std::optional<double> ConcordanceIndex(std::span<const MatchedPair> pairs);

/// log(1 + min(|t_pred - t_ref|, s_max)).
double LogTimeLoss(double t_pred, double t_ref, double s_max);

// Sorted clipped log-time discrepancies x_(1) <= ... <= x_(k), each in
// [0, log(1 + s_max)].
class DiscrepancySet {
 public:
  /// From raw absolute errors in hours. Throws Error{kInvalidArgument} for
  /// s_max <= 0 or a negative/non-finite error.
  static DiscrepancySet FromAbsoluteErrors(std::vector<double> abs_errors_hours,
                                           double s_max);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double s_max() const noexcept { return s_max_; }
  // log(1 + s_max), the upper end of the integration range.
  double upper() const noexcept { return upper_; }

 private:
  DiscrepancySet(std::vector<double> values, double s_max, double upper)
      : values_(std::move(values)), s_max_(s_max), upper_(upper) {}

  std::vector<double> values_;
  double s_max_;
  double upper_;
};

DiscrepancySet BuildDiscrepancies(std::span<const MatchedPair> matched, double s_max);

/// Fraction of values <= x. Throws Error{kUndefinedCdf} when empty.
double Ltcdf(const DiscrepancySet& d, double x);

/// (1/L) * integral of the CDF over [0, L], L = log(1 + s_max), evaluated in
/// closed form. 1 when every error is zero, 0 when every error reaches s_max.
/// Throws Error{kUndefinedAultc} when empty.
double Aultc(const DiscrepancySet& d);
std::optional<double> TryAultc(const DiscrepancySet& d);

// Upper bounds on |t_ref| in hours. Bucket 0 is exactly t_ref == 0; bucket i
// holds bounds[i-1] < |t_ref| <= bounds[i].
class StratumBounds {
 public:
  /// presentation, 1 hour, 1 day, 1 week, 1 year, beyond.
  static StratumBounds Default();

  /// Must start at 0, increase strictly, and end at +infinity.
  /// Throws Error{kInvalidArgument}.
  static StratumBounds Create(std::vector<double> upper_bounds);

  const std::vector<double>& upper_bounds() const noexcept { return upper_; }
  std::size_t size() const noexcept { return upper_.size(); }
  std::size_t BucketOf(double t_ref) const;
  std::string Label(std::size_t bucket) const;

 private:
  explicit StratumBounds(std::vector<double> upper) : upper_(std::move(upper)) {}
  std::vector<double> upper_;
};

struct StratumResult {
  std::string label;
  double upper_bound_hours = 0.0;
  DiscrepancySet discrepancies;
  std::optional<double> aultc;
  std::optional<double> median_abs_error_hours;
  std::optional<double> median_log_discrepancy;
};

std::vector<StratumResult> StratifiedDiscrepancy(std::span<const MatchedPair> matched,
                                                 const StratumBounds& bounds,
                                                 double s_max);

struct SweepPoint {
  double tau = 0.0;
  double match_rate = 0.0;
  std::optional<double> c_index;
  std::optional<double> aultc;
};

// 0.01, 0.02, ..., 0.25.
std::vector<double> DefaultSweepTaus();

/// Throws Error{kInvalidArgument} for an empty tau list or a negative tau,
/// Error{kEmptyReference} when ref_size == 0.
std::vector<SweepPoint> ThresholdSweep(std::span<const MatchedPair> pairs,
                                       std::size_t ref_size,
                                       std::span<const double> taus, double s_max);

double Median(std::vector<double> values);

}  // namespace casetl
