#pragma once

// Event-string distances and the one-to-one recursive best match between a
// reference and a predicted timeline.

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "casetl/corpus_model.hpp"

namespace casetl {

// distance(a, a) == 0 and distance(a, b) == distance(b, a), both to 1e-9.
class DistanceMetric {
 public:
  virtual ~DistanceMetric() = default;

  virtual std::string_view name() const = 0;

  // Called once with every string of a timeline pair before any Distance()
  // call, so remote metrics can fetch in one batch.
  virtual void Prepare(std::span<const std::string> /*texts*/) {}

  virtual double Distance(std::string_view a, std::string_view b) = 0;
};

// Levenshtein distance over Unicode code points divided by the longer
// length; 0 for two empty strings. Range [0, 1].
class EditDistanceMetric final : public DistanceMetric {
 public:
  std::string_view name() const override { return "edit"; }
  double Distance(std::string_view a, std::string_view b) override;
};

std::size_t LevenshteinDistance(std::u32string_view a, std::u32string_view b);
std::u32string DecodeUtf8(std::string_view s);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // One vector per text, in request order.
  virtual std::vector<std::vector<double>> Embed(
      std::span<const std::string> texts) = 0;
};

// Client for the `/embed` + `/health` wire contract:
//   POST {base}/embed {"texts": [...]} -> {"vectors": [[...], ...]}
// Requests are split into batches of at most `max_batch` texts.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(std::string base_url, double timeout_seconds = 120.0,
                                 std::size_t max_batch = 512);

  std::vector<std::vector<double>> Embed(std::span<const std::string> texts) override;

  /// Throws Error{kIo} unless GET /health answers 200.
  void CheckHealth();

 private:
  std::string base_url_;
  std::string path_prefix_;
  double timeout_seconds_;
  std::size_t max_batch_;
};

// 1 - cosine similarity of provider vectors, range [0, 2]. Vectors are cached
// by string; Prepare() fetches all uncached strings in one provider call.
class EmbeddingDistanceMetric final : public DistanceMetric {
 public:
  explicit EmbeddingDistanceMetric(std::shared_ptr<EmbeddingProvider> provider);

  std::string_view name() const override { return "embedding"; }
  void Prepare(std::span<const std::string> texts) override;
  double Distance(std::string_view a, std::string_view b) override;

  std::size_t cache_size() const;

 private:
  const std::vector<double>& Lookup(std::string_view text);

  std::shared_ptr<EmbeddingProvider> provider_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::vector<double>> cache_;
};

struct MatchedPair {
  std::string ref_event;
  std::string pred_event;
  double distance = 0.0;
  double t_ref = 0.0;
  double t_pred = 0.0;
  std::size_t ref_index = 0;
  std::size_t pred_index = 0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

// Row-major |ref| x |pred| distances.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

DistanceMatrix ComputeDistances(const TimelineAnnotation& ref,
                                const TimelineAnnotation& pred,
                                DistanceMetric& metric);

/// Repeatedly takes the globally closest remaining (ref, pred) pair, ties
/// going to the smaller ref index and then the smaller pred index, until one
/// side runs out. Distances are compared exactly. Returns (ref, pred) index
/// pairs in selection order.
std::vector<std::pair<std::size_t, std::size_t>> BestMatchIndices(
    const DistanceMatrix& distances);

std::vector<MatchedPair> BestMatch(const TimelineAnnotation& ref,
                                   const TimelineAnnotation& pred,
                                   DistanceMetric& metric);

struct ThresholdResult {
  std::vector<MatchedPair> matched;
  double match_rate = 0.0;
};

/// Keeps pairs with distance <= tau; match_rate = |matched| / ref_size.
/// Throws Error{kEmptyReference} when ref_size == 0 and Error{kInvalidArgument}
/// for a negative tau.
ThresholdResult ApplyThreshold(std::span<const MatchedPair> pairs,
                               std::size_t ref_size, double tau);

}  // namespace casetl
