#pragma once

// Naive reference implementations used as test oracles. They share no code
// with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oracle {

// Literal recursive transcription of the best-match pseudocode: scan every
// remaining (r, p), keep a strictly smaller distance, and on an exact tie
// compare original indices of r and then p against the current best.
// `ref` and `pred` hold original indices; d[r][p] is the distance.
inline std::vector<std::pair<std::size_t, std::size_t>> MatchEvents(
    std::vector<std::size_t> ref, std::vector<std::size_t> pred,
    const std::vector<std::vector<double>>& d) {
  if (ref.empty() || pred.empty()) return {};
  double min_distance = std::numeric_limits<double>::infinity();
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t r : ref) {
    for (std::size_t p : pred) {
      double dist = d[r][p];
      if (dist < min_distance) {
        min_distance = dist;
        best = {r, p};
      } else if (dist == min_distance && best) {
        if (r < best->first) {
          best = {r, p};
        } else if (r == best->first && p < best->second) {
          best = {r, p};
        }
      }
    }
  }
  // All distances infinite would leave best unset; distances here are finite.
  ref.erase(std::find(ref.begin(), ref.end(), best->first));
  pred.erase(std::find(pred.begin(), pred.end(), best->second));
  std::vector<std::pair<std::size_t, std::size_t>> result{*best};
  auto rest = MatchEvents(std::move(ref), std::move(pred), d);
  result.insert(result.end(), rest.begin(), rest.end());
  return result;
}

inline std::vector<std::pair<std::size_t, std::size_t>> MatchEvents(
    const std::vector<std::vector<double>>& d, std::size_t rows, std::size_t cols) {
  std::vector<std::size_t> ref(rows);
  std::vector<std::size_t> pred(cols);
  for (std::size_t i = 0; i < rows; ++i) ref[i] = i;
  for (std::size_t j = 0; j < cols; ++j) pred[j] = j;
  return MatchEvents(std::move(ref), std::move(pred), d);
}

struct PairCount {
  std::size_t concordant = 0;
  std::size_t comparable = 0;
};

// Enumerates every i < j.
inline PairCount BruteForceConcordance(const std::vector<double>& t_ref,
                                       const std::vector<double>& t_pred) {
  PairCount c;
  for (std::size_t i = 0; i < t_ref.size(); ++i) {
    for (std::size_t j = i + 1; j < t_ref.size(); ++j) {
      if (t_ref[i] == t_ref[j] || t_pred[i] == t_pred[j]) continue;
      ++c.comparable;
      if ((t_ref[i] - t_ref[j]) * (t_pred[i] - t_pred[j]) > 0) ++c.concordant;
    }
  }
  return c;
}

inline std::optional<double> BruteForceCIndex(const std::vector<double>& t_ref,
                                              const std::vector<double>& t_pred) {
  PairCount c = BruteForceConcordance(t_ref, t_pred);
  if (c.comparable == 0) return std::nullopt;
  return static_cast<double>(c.concordant) / static_cast<double>(c.comparable);
}

// Midpoint rule on `points` equal cells of [0, L]; F is evaluated by a
// pointer that advances through the sorted values. Absolute error is at most
// half a cell width relative to L, i.e. 0.5 / points.
inline double NumericAultc(std::vector<double> values, double upper, std::size_t points) {
  std::sort(values.begin(), values.end());
  const double k = static_cast<double>(values.size());
  const double h = upper / static_cast<double>(points);
  std::size_t below = 0;
  double area = 0.0;
  for (std::size_t m = 0; m < points; ++m) {
    double x = (static_cast<double>(m) + 0.5) * h;
    while (below < values.size() && values[below] <= x) ++below;
    area += static_cast<double>(below) / k;
  }
  return area * h / upper;
}

// The step-sum as written in the metric's original definition, kept to
// document how it differs from the integral.
inline double StepSumAultc(std::vector<double> values, double upper) {
  std::sort(values.begin(), values.end());
  const double k = static_cast<double>(values.size());
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += (values[i] - prev) * static_cast<double>(i + 1) / k;
    prev = values[i];
  }
  sum += upper - prev;
  return sum / upper;
}

inline std::vector<std::string> Lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      if (pos < text.size()) lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return lines;
}

inline std::string TrimWhitespace(std::string s) {
  auto ws = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

// First pass finds the first reference marker after the first body marker;
// second pass takes the last body marker above it. nullopt when either is
// missing.
inline std::optional<std::string> TwoPassBody(std::string_view raw) {
  auto lines = Lines(raw);
  auto is_body = [](const std::string& l) { return l.rfind("==== Body", 0) == 0; };
  auto is_ref = [](const std::string& l) { return l.rfind("==== Ref", 0) == 0; };
  std::optional<std::size_t> first_body;
  std::optional<std::size_t> ref;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!first_body && is_body(lines[i])) {
      first_body = i;
    } else if (first_body && is_ref(lines[i])) {
      ref = i;
      break;
    }
  }
  if (!first_body || !ref) return std::nullopt;
  std::size_t start = *first_body;
  for (std::size_t i = *first_body; i < *ref; ++i) {
    if (is_body(lines[i])) start = i;
  }
  std::string body;
  for (std::size_t i = start + 1; i < *ref; ++i) {
    body += lines[i];
    body += '\n';
  }
  return TrimWhitespace(body);
}

// Seeded random inputs shared by property tests and the acceptance suite.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::size_t Size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  double Real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool Coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  // Values drawn from a small pool so exact ties are common.
  std::vector<std::vector<double>> Matrix(std::size_t rows, std::size_t cols) {
    std::vector<double> pool;
    std::size_t pool_size = Size(1, 6);
    for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(Real(0.0, 1.0));
    std::vector<std::vector<double>> d(rows, std::vector<double>(cols));
    for (auto& row : d) {
      for (auto& v : row) v = Coin(0.5) ? pool[Size(0, pool_size - 1)] : Real(0.0, 1.0);
    }
    return d;
  }

  // Integer-valued times on a coarse grid so ties occur in both columns.
  std::vector<double> Times(std::size_t n, int spread) {
    std::vector<double> t(n);
    for (auto& v : t) v = static_cast<double>(std::uniform_int_distribution<int>(-spread, spread)(rng_));
    return t;
  }

  std::string Event() {
    static constexpr std::string_view kAlphabet =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 -,.()/'+%";
    static const std::vector<std::string> kWide = {"é", "ü", "α", "β", "µ", "°", "—", "≥"};
    std::string s;
    std::size_t len = Size(1, 30);
    for (std::size_t i = 0; i < len; ++i) {
      if (Coin(0.05)) {
        s += kWide[Size(0, kWide.size() - 1)];
      } else {
        s += kAlphabet[Size(0, kAlphabet.size() - 1)];
      }
    }
    s = TrimWhitespace(s);
    // Keep the first character a letter so no row reads as a fence, a list
    // marker or a table rule.
    return "e" + s;
  }

  double Hours() {
    switch (Size(0, 3)) {
      case 0: return static_cast<double>(std::uniform_int_distribution<int>(-9000, 9000)(rng_));
      case 1: return std::round(Real(-1000.0, 1000.0) * 4.0) / 4.0;
      case 2: return Real(-1e5, 1e5);
      default: return Real(-1.0, 1.0);
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
