#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <string>

#include "casetl/alignment.hpp"
#include "doctest.h"
#include "support/fake_clients.hpp"
#include "support/oracles.hpp"

using namespace casetl;

namespace {

TimelineAnnotation Timeline(std::initializer_list<const char*> events) {
  TimelineAnnotation t;
  double hour = 0;
  for (const char* e : events) t.events.push_back({e, hour++});
  return t;
}

DistanceMatrix ToMatrix(const std::vector<std::vector<double>>& d, std::size_t rows,
                        std::size_t cols) {
  DistanceMatrix m{rows, cols, {}};
  for (const auto& row : d) m.values.insert(m.values.end(), row.begin(), row.end());
  return m;
}

}  // namespace

TEST_SUITE("edit_distance") {
  TEST_CASE("levenshtein basics") {
    CHECK(LevenshteinDistance(U"kitten", U"sitting") == 3);
    CHECK(LevenshteinDistance(U"", U"abc") == 3);
    CHECK(LevenshteinDistance(U"flaw", U"lawn") == 2);
  }

  TEST_CASE("normalized by the longer string, over code points") {
    EditDistanceMetric m;
    CHECK(m.Distance("", "") == 0.0);
    CHECK(m.Distance("fever", "fever") == 0.0);
    CHECK(m.Distance("abc", "") == 1.0);
    CHECK(m.Distance("kitten", "sitting") == doctest::Approx(3.0 / 7.0));
    CHECK(m.Distance("café", "cafe") == doctest::Approx(0.25));
    CHECK(m.Distance("α-blocker", "β-blocker") == doctest::Approx(1.0 / 9.0));
  }

  TEST_CASE("invalid utf-8 decodes to replacement characters") {
    std::u32string s = DecodeUtf8("a\xff" "b");
    CHECK(s == std::u32string{U'a', U'\uFFFD', U'b'});
  }

  TEST_CASE("metric contract on random strings") {
    oracle::Generator gen(11);
    EditDistanceMetric m;
    for (int n = 0; n < 300; ++n) {
      std::string a = gen.Event();
      std::string b = gen.Event();
      CHECK(m.Distance(a, a) == 0.0);
      CHECK(m.Distance(a, b) == m.Distance(b, a));
      double d = m.Distance(a, b);
      CHECK((d >= 0.0 && d <= 1.0));
    }
  }
}

TEST_SUITE("embedding_metric") {
  TEST_CASE("one batch per timeline pair, cached by string") {
    auto provider = std::make_shared<test::FakeEmbeddings>(std::map<std::string, std::vector<double>>{
        {"fever", {1, 0}}, {"pyrexia", {0.8, 0.6}}, {"rash", {0, 1}}, {"acne", {-1, 0}}});
    EmbeddingDistanceMetric metric(provider);
    TimelineAnnotation ref = Timeline({"fever", "rash", "fever"});
    TimelineAnnotation pred = Timeline({"pyrexia", "acne"});
    auto pairs = BestMatch(ref, pred, metric);
    CHECK(provider->calls == 1);
    CHECK(provider->batch_sizes == std::vector<std::size_t>{4});
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].ref_event == "fever");
    CHECK(pairs[0].pred_event == "pyrexia");
    CHECK(pairs[0].distance == doctest::Approx(0.2));
    BestMatch(ref, pred, metric);
    CHECK(provider->calls == 1);
    CHECK(metric.Distance("fever", "acne") == doctest::Approx(2.0));
  }
}

TEST_SUITE("best_match") {
  TEST_CASE("empty sides") {
    EditDistanceMetric m;
    CHECK(BestMatch(Timeline({}), Timeline({"x"}), m).empty());
    CHECK(BestMatch(Timeline({"x"}), Timeline({}), m).empty());
  }

  TEST_CASE("identity") {
    EditDistanceMetric m;
    auto pairs = BestMatch(Timeline({"fever"}), Timeline({"fever"}), m);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].distance == 0.0);
  }

  TEST_CASE("ties go to the earlier reference event") {
    test::TableMetric m;
    m.Set("a", "p", 0.3);
    m.Set("b", "p", 0.3);
    auto pairs = BestMatch(Timeline({"a", "b"}), Timeline({"p"}), m);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].ref_event == "a");
    CHECK(pairs[0].ref_index == 0);
  }

  TEST_CASE("ties on the reference go to the earlier prediction") {
    test::TableMetric m;
    m.Set("a", "p", 0.3);
    m.Set("a", "q", 0.3);
    auto pairs = BestMatch(Timeline({"a"}), Timeline({"p", "q"}), m);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].pred_index == 0);
  }

  TEST_CASE("pairs come in selection order with times attached") {
    test::TableMetric m;
    m.Set("a", "q", 0.4);
    m.Set("b", "p", 0.1);
    m.Set("a", "p", 0.2);
    TimelineAnnotation ref{"c", {{"a", -5}, {"b", 7}}};
    TimelineAnnotation pred{"c", {{"p", 1}, {"q", 2}}};
    auto pairs = BestMatch(ref, pred, m);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == MatchedPair{"b", "p", 0.1, 7, 1, 1, 0});
    CHECK(pairs[1] == MatchedPair{"a", "q", 0.4, -5, 2, 0, 1});
  }

  TEST_CASE("negative or NaN distances are rejected") {
    test::TableMetric m;
    m.Set("a", "p", -0.1);
    CHECK_THROWS_AS(BestMatch(Timeline({"a"}), Timeline({"p"}), m), Error);
    m.Set("a", "p", std::nan(""));
    CHECK_THROWS_AS(BestMatch(Timeline({"a"}), Timeline({"p"}), m), Error);
  }

  TEST_CASE("matches the literal recursive transcription") {
    oracle::Generator gen(424242);
    for (int n = 0; n < 300; ++n) {
      std::size_t rows = gen.Size(0, 9);
      std::size_t cols = gen.Size(0, 9);
      auto d = gen.Matrix(rows, cols);
      auto expected = oracle::MatchEvents(d, rows, cols);
      auto got = BestMatchIndices(ToMatrix(d, rows, cols));
      REQUIRE(got == expected);
      CHECK(got.size() == std::min(rows, cols));
    }
  }

  TEST_CASE("first pair attains the global minimum") {
    oracle::Generator gen(5);
    for (int n = 0; n < 200; ++n) {
      std::size_t rows = gen.Size(1, 8);
      std::size_t cols = gen.Size(1, 8);
      auto d = gen.Matrix(rows, cols);
      DistanceMatrix m = ToMatrix(d, rows, cols);
      auto got = BestMatchIndices(m);
      double global = *std::min_element(m.values.begin(), m.values.end());
      CHECK(m.at(got[0].first, got[0].second) == global);
    }
  }
}

TEST_SUITE("apply_threshold") {
  std::vector<MatchedPair> WithDistances(std::initializer_list<double> ds) {
    std::vector<MatchedPair> pairs;
    std::size_t i = 0;
    for (double d : ds) {
      pairs.push_back({"r", "p", d, 0, 0, i, i});
      ++i;
    }
    return pairs;
  }

  TEST_CASE("filters at or below tau") {
    auto r = ApplyThreshold(WithDistances({0.05, 0.2}), 2, 0.1);
    CHECK(r.matched.size() == 1);
    CHECK(r.match_rate == 0.5);
    CHECK(ApplyThreshold(WithDistances({0, 0}), 2, 0.1).match_rate == 1.0);
    CHECK(ApplyThreshold(WithDistances({0, 0.01}), 2, 0.0).match_rate == 0.5);
    CHECK(ApplyThreshold(WithDistances({0.1}), 1, 0.1).match_rate == 1.0);
  }

  TEST_CASE("denominator is the reference size") {
    CHECK(ApplyThreshold(WithDistances({0.0, 0.0}), 4, 0.1).match_rate == 0.5);
  }

  TEST_CASE("errors") {
    try {
      ApplyThreshold({}, 0, 0.1);
      FAIL("expected Error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kEmptyReference);
    }
    CHECK_THROWS_AS(ApplyThreshold({}, 1, -0.01), Error);
  }

  TEST_CASE("match rate is monotone in tau") {
    oracle::Generator gen(17);
    for (int n = 0; n < 200; ++n) {
      std::vector<MatchedPair> pairs;
      std::size_t k = gen.Size(0, 20);
      for (std::size_t i = 0; i < k; ++i) pairs.push_back({"r", "p", gen.Real(0, 0.3), 0, 0, i, i});
      std::size_t ref_size = k + gen.Size(1, 3);
      double prev = -1.0;
      for (double tau = 0.0; tau <= 0.3; tau += 0.01) {
        double rate = ApplyThreshold(pairs, ref_size, tau).match_rate;
        CHECK(rate >= prev);
        prev = rate;
      }
    }
  }
}
