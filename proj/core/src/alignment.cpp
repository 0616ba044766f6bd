#include "casetl/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "casetl/error.hpp"

namespace casetl {

std::u32string DecodeUtf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto byte = static_cast<unsigned char>(s[i]);
    std::size_t len = byte < 0x80 ? 1 : (byte >> 5) == 0x6 ? 2 : (byte >> 4) == 0xE ? 3
                                    : (byte >> 3) == 0x1E ? 4 : 0;
    char32_t cp = 0;
    bool ok = len > 0 && i + len <= s.size();
    if (ok) {
      cp = len == 1 ? byte : byte & (0x7F >> len);
      for (std::size_t k = 1; k < len; ++k) {
        auto cont = static_cast<unsigned char>(s[i + k]);
        if ((cont & 0xC0) != 0x80) {
          ok = false;
          break;
        }
        cp = (cp << 6) | (cont & 0x3F);
      }
    }
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::size_t LevenshteinDistance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double EditDistanceMetric::Distance(std::string_view a, std::string_view b) {
  std::u32string ua = DecodeUtf8(a);
  std::u32string ub = DecodeUtf8(b);
  std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(LevenshteinDistance(ua, ub)) / static_cast<double>(longest);
}

EmbeddingDistanceMetric::EmbeddingDistanceMetric(std::shared_ptr<EmbeddingProvider> provider)
    : provider_(std::move(provider)) {
  if (!provider_) throw Error(ErrorCode::kInvalidArgument, "null embedding provider");
}

void EmbeddingDistanceMetric::Prepare(std::span<const std::string> texts) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    for (const auto& t : texts) {
      if (!cache_.contains(t) &&
          std::find(missing.begin(), missing.end(), t) == missing.end()) {
        missing.push_back(t);
      }
    }
  }
  if (missing.empty()) return;
  auto vectors = provider_->Embed(missing);
  if (vectors.size() != missing.size()) {
    throw Error(ErrorCode::kIo, "embedding provider returned a wrong number of vectors");
  }
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < missing.size(); ++i) {
    cache_.emplace(std::move(missing[i]), std::move(vectors[i]));
  }
}

const std::vector<double>& EmbeddingDistanceMetric::Lookup(std::string_view text) {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(std::string(text));
    if (it != cache_.end()) return it->second;
  }
  std::string key(text);
  Prepare(std::span<const std::string>(&key, 1));
  std::lock_guard lock(mu_);
  return cache_.at(key);
}

double EmbeddingDistanceMetric::Distance(std::string_view a, std::string_view b) {
  const auto& u = Lookup(a);
  const auto& v = Lookup(b);
  if (u.size() != v.size() || u.empty()) {
    throw Error(ErrorCode::kIo, "embedding vectors have inconsistent dimensions");
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 1.0;
  double cosine = std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
  return 1.0 - cosine;
}

std::size_t EmbeddingDistanceMetric::cache_size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

DistanceMatrix ComputeDistances(const TimelineAnnotation& ref, const TimelineAnnotation& pred,
                                DistanceMetric& metric) {
  std::vector<std::string> texts;
  texts.reserve(ref.events.size() + pred.events.size());
  for (const auto& e : ref.events) texts.push_back(e.event);
  for (const auto& e : pred.events) texts.push_back(e.event);
  metric.Prepare(texts);

  DistanceMatrix m{ref.events.size(), pred.events.size(), {}};
  m.values.reserve(m.rows * m.cols);
  for (const auto& r : ref.events) {
    for (const auto& p : pred.events) {
      double d = metric.Distance(r.event, p.event);
      if (std::isnan(d) || d < 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    std::string(metric.name()) + " metric returned an invalid distance");
      }
      m.values.push_back(d);
    }
  }
  return m;
}

std::vector<std::pair<std::size_t, std::size_t>> BestMatchIndices(
    const DistanceMatrix& distances) {
  std::vector<char> ref_alive(distances.rows, 1);
  std::vector<char> pred_alive(distances.cols, 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t rounds = std::min(distances.rows, distances.cols);
  pairs.reserve(rounds);

  for (std::size_t round = 0; round < rounds; ++round) {
    bool found = false;
    std::size_t best_r = 0;
    std::size_t best_p = 0;
    double best = 0.0;
    // Row-major scan order makes the first strict minimum the one with the
    // smallest ref index, then the smallest pred index.
    for (std::size_t r = 0; r < distances.rows; ++r) {
      if (!ref_alive[r]) continue;
      for (std::size_t p = 0; p < distances.cols; ++p) {
        if (!pred_alive[p]) continue;
        double d = distances.at(r, p);
        if (!found || d < best) {
          found = true;
          best = d;
          best_r = r;
          best_p = p;
        }
      }
    }
    ref_alive[best_r] = 0;
    pred_alive[best_p] = 0;
    pairs.emplace_back(best_r, best_p);
  }
  return pairs;
}

std::vector<MatchedPair> BestMatch(const TimelineAnnotation& ref, const TimelineAnnotation& pred,
                                   DistanceMetric& metric) {
  if (ref.events.empty() || pred.events.empty()) return {};
  DistanceMatrix distances = ComputeDistances(ref, pred, metric);
  std::vector<MatchedPair> out;
  for (auto [r, p] : BestMatchIndices(distances)) {
    const auto& re = ref.events[r];
    const auto& pe = pred.events[p];
    out.push_back({re.event, pe.event, distances.at(r, p), re.time_hours, pe.time_hours, r, p});
  }
  return out;
}

ThresholdResult ApplyThreshold(std::span<const MatchedPair> pairs, std::size_t ref_size,
                               double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be >= 0");
  if (ref_size == 0) {
    throw Error(ErrorCode::kEmptyReference, "match rate is undefined for an empty reference");
  }
  ThresholdResult result;
  for (const auto& pair : pairs) {
    if (pair.distance <= tau) result.matched.push_back(pair);
  }
  result.match_rate =
      static_cast<double>(result.matched.size()) / static_cast<double>(ref_size);
  return result;
}

}  // namespace casetl
