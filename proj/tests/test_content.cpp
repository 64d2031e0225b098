#include <doctest.h>

#include <map>
#include <numeric>

#include "hetcache/content.hpp"
#include "hetcache/errors.hpp"
#include "oracles.hpp"

using namespace hetcache;

TEST_SUITE("content") {

TEST_CASE("zipf pmf reference values") {
  CHECK(zipf_pmf(37, {100, 0.0}) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(zipf_pmf(1, {2, 1.0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(zipf_pmf(1, {100, 10.0}) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(zipf_pmf(5, {100, 0.8}) == doctest::Approx(oracle::zipf(5, 100, 0.8)).epsilon(1e-13));
}

TEST_CASE("zipf pmf rejects out-of-range indices") {
  CHECK_THROWS_AS(zipf_pmf(0, {100, 1.0}), DomainError);
  CHECK_THROWS_AS(zipf_pmf(101, {100, 1.0}), DomainError);
  CHECK_THROWS_AS(ContentModel({0, 1.0}).validate(), ValidationError);
  CHECK_THROWS_AS(ContentModel({10, -0.1}).validate(), ValidationError);
}

TEST_CASE("request probabilities are normalized") {
  for (int f : {1, 2, 10, 100, 1000})
    for (double kappa : {0.0, 0.5, 1.0, 1.5, 3.0}) {
      const auto a = ContentModel{f, kappa}.request_probabilities();
      CHECK(std::accumulate(a.begin(), a.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      for (int c = 1; c < f; ++c) CHECK(a[c - 1] >= a[c]);
    }
}

TEST_CASE("caching probability reference values") {
  CHECK(cache_probability(10, {20, 1.0}, 100) == 1.0);
  CHECK(cache_probability(50, {20, 0.0}, 100) == doctest::Approx(20.0 / 81.0));
  CHECK(cache_probability(100, {20, 0.0}, 100) == doctest::Approx(1.0 / 81.0));
  CHECK(cache_probability(3, {0, 0.3}, 100) == 0.0);
}

TEST_CASE("caching probability agrees with window enumeration everywhere") {
  for (int f : {1, 7, 30})
    for (int s = 0; s <= f; ++s)
      for (double phi : {0.0, 0.25, 0.5, 1.0})
        for (int c = 1; c <= f; ++c)
          CHECK(cache_probability(c, {s, phi}, f) ==
                doctest::Approx(oracle::cache_probability_by_enumeration(c, s, phi, f)).epsilon(1e-14));
}

TEST_CASE("caching probability equals the three-branch form for S <= (F + 1) / 2") {
  const int f = 100;
  for (int s = 1; 2 * s <= f + 1; ++s)
    for (double phi : {0.0, 0.3, 1.0})
      for (int c = 1; c <= f; ++c)
        CHECK(cache_probability(c, {s, phi}, f) ==
              doctest::Approx(oracle::cache_probability_three_branch(c, s, phi, f)).epsilon(1e-14));
}

TEST_CASE("three-branch form overshoots one for large caches, window form stays a probability") {
  // c = 50, S = 80, F = 100: the popular branch reads 50 / 21 under phi = 0.
  CHECK(oracle::cache_probability_three_branch(50, 80, 0.0, 100) > 1.0);
  for (int c = 1; c <= 100; ++c) {
    const double q = cache_probability(c, {80, 0.0}, 100);
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
  }
}

TEST_CASE("expected cache occupancy equals the cache size") {
  const int f = 100;
  for (double phi : {0.0, 0.25, 0.5, 1.0})
    for (int s : {1, 5, 20, f}) {
      const auto q = cache_probabilities({s, phi}, f);
      CHECK(std::accumulate(q.begin(), q.end(), 0.0) == doctest::Approx(s).epsilon(1e-9 / s));
    }
}

TEST_CASE("popular files gain and unpopular files lose as phi grows") {
  const int f = 100, s = 20;
  for (int c = 1; c <= f; ++c) {
    double previous = cache_probability(c, {s, 0.0}, f);
    for (double phi : {0.25, 0.5, 0.75, 1.0}) {
      const double q = cache_probability(c, {s, phi}, f);
      if (c <= s) CHECK(q >= previous);
      else CHECK(q <= previous);
      previous = q;
    }
  }
}

TEST_CASE("cache policy validation") {
  CHECK_THROWS_WITH_AS(TierCachePolicy({150, 1.0}).validate(100), doctest::Contains("S <= F"),
                       ValidationError);
  CHECK_THROWS_AS(TierCachePolicy({-1, 1.0}).validate(100), ValidationError);
  CHECK_THROWS_AS(TierCachePolicy({5, 1.5}).validate(100), ValidationError);
}

TEST_CASE("MPC placement is deterministic") {
  Rng rng = substream(3, 0);
  for (int k = 0; k < 100; ++k) {
    const auto p = sample_placement(rng, {5, 1.0}, 100);
    CHECK(p.indices() == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(p.strategy == PlacementStrategy::MostPopular);
  }
}

TEST_CASE("a full-library window is the only RCS outcome") {
  Rng rng = substream(3, 1);
  for (int k = 0; k < 100; ++k) {
    const auto p = sample_placement(rng, {100, 0.0}, 100);
    CHECK(p.first == 1);
    CHECK(p.count == 100);
  }
}

TEST_CASE("empty caches hold nothing") {
  Rng rng = substream(3, 2);
  const auto p = sample_placement(rng, {0, 0.5}, 100);
  CHECK(p.indices().empty());
  CHECK_FALSE(p.contains(1));
}

TEST_CASE("RCS windows are contiguous, of length S and uniformly placed") {
  Rng rng = substream(3, 3);
  std::map<int, int> starts;
  for (int k = 0; k < 81000; ++k) {
    const auto p = sample_placement(rng, {20, 0.0}, 100);
    CHECK(p.count == 20);
    REQUIRE(p.first >= 1);
    REQUIRE(p.first + p.count - 1 <= 100);
    ++starts[p.first];
  }
  CHECK(starts.size() == 81);
  for (const auto& [s, n] : starts) CHECK(std::abs(n - 1000) < 160);  // ~5 sigma
}

TEST_CASE("sampled containment frequencies match the caching probabilities") {
  for (double phi : {0.0, 0.4}) {
    Rng rng = substream(4, static_cast<std::uint64_t>(phi * 10));
    const int f = 100, s = 20, n = 100000;
    std::vector<int> hits(f, 0);
    for (int k = 0; k < n; ++k) {
      const auto p = sample_placement(rng, {s, phi}, f);
      for (int c = p.first; c < p.first + p.count; ++c) ++hits[c - 1];
    }
    double worst = 0.0;
    for (int c = 1; c <= f; ++c)
      worst = std::max(worst, std::abs(hits[c - 1] / double(n) - cache_probability(c, {s, phi}, f)));
    CHECK(worst < 0.01);
  }
}

}  // TEST_SUITE
