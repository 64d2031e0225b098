#include <doctest.h>

#include <cmath>
#include <vector>

#include "hetcache/channel.hpp"
#include "hetcache/errors.hpp"
#include "oracles.hpp"

using namespace hetcache;

TEST_SUITE("channel") {

TEST_CASE("LOS probability reference values") {
  CHECK(los_probability(50.0, 80.0, 164.0) == 1.0);
  CHECK(los_probability(160.0, 80.0, 164.0) == doctest::Approx(0.688481214).epsilon(1e-8));
  CHECK(los_probability(1e6, 80.0, 164.0) < 1e-4);
  CHECK(los_probability(0.0, 80.0, 164.0) == 1.0);
  CHECK_THROWS_AS(los_probability(-1.0, 80.0, 164.0), DomainError);
}

TEST_CASE("LOS probability is one up to D0, continuous and decaying beyond") {
  const double d0 = 80.0, d1 = 164.0;
  for (double r = 0.5; r <= d0; r += 0.5) CHECK(los_probability(r, d0, d1) == 1.0);
  CHECK(los_probability(d0 * (1 + 1e-9), d0, d1) == doctest::Approx(1.0).epsilon(1e-8));
  double previous = 1.0;
  for (double r = d0; r < 1e5; r *= 1.1) {
    const double p = los_probability(r, d0, d1);
    CHECK(p == doctest::Approx(oracle::los_probability(r, d0, d1)).epsilon(1e-14));
    CHECK(p <= previous);
    previous = p;
  }
}

TEST_CASE("path loss reference values and monotone decay") {
  TierRadioParams p;
  p.intercept_los = 0.7;
  p.intercept_nlos = 0.3;
  CHECK(path_loss(0.0, LinkMode::Los, p) == 0.7);
  CHECK(path_loss(0.0, LinkMode::Nlos, p) == 0.3);
  TierRadioParams unit;
  CHECK(path_loss(1.0, LinkMode::Los, unit) == doctest::Approx(0.189465).epsilon(1e-6));
  for (LinkMode m : {LinkMode::Los, LinkMode::Nlos}) {
    double previous = path_loss(0.0, m, p);
    for (double r = 0.25; r < 1e6; r *= 1.7) {
      const double l = path_loss(r, m, p);
      CHECK(l < previous);
      CHECK(l > 0.0);
      previous = l;
    }
  }
}

TEST_CASE("radio parameter validation") {
  TierRadioParams p;
  p.pathloss_exp_los = 9.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("alpha^N <= 8"), ValidationError);
  p = {};
  p.pathloss_exp_nlos = 8.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.pathloss_exp_los = 2.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.nakagami_los = 1;
  p.nakagami_nlos = 2;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.near_field_dist = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.sir_threshold = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.nakagami_los = p.nakagami_nlos = 1;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("unit-shape fading is a unit-mean exponential") {
  Rng rng = substream(11, 0);
  std::vector<double> x(100000);
  for (double& v : x) v = sample_fading(rng, 1);
  const double d = oracle::ks_statistic(x, [](double z) { return 1.0 - std::exp(-z); });
  CHECK(d < 1.63 / std::sqrt(double(x.size())));  // significance 0.01
}

TEST_CASE("fading of shape M matches the normalized Gamma law") {
  for (int m : {2, 4}) {
    Rng rng = substream(11, static_cast<std::uint64_t>(m));
    const int n = 100000;
    std::vector<double> x(n);
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (double& v : x) {
      v = sample_fading(rng, m);
      s1 += v;
      s2 += v * v;
      s4 += v * v * v * v;
    }
    const double mean = s1 / n;
    const double second = s2 / n;
    const double var = second - mean * mean;
    CHECK(std::abs(mean - 1.0) < 0.01);
    CHECK(std::abs(var - 1.0 / m) < 0.01);
    // E[H^2] = (M + 1) / M; its standard error from the fourth moment.
    const double expected2 = (m + 1.0) / m;
    const double se2 = std::sqrt((s4 / n - second * second) / n);
    CHECK(std::abs(second - expected2) < 3.0 * se2 + 1e-12);
    const double d = oracle::ks_statistic(x, [m](double z) { return 1.0 - oracle::gamma_ccdf(z, m); });
    CHECK(d < oracle::ks_critical_001(x.size()));
  }
  Rng rng = substream(11, 9);
  CHECK_THROWS_AS(sample_fading(rng, 0), DomainError);
}

TEST_CASE("links inside D0 are always LOS") {
  TierRadioParams p;
  Rng rng = substream(12, 0);
  for (int k = 0; k < 1000; ++k) CHECK(sample_link(rng, 79.0, p).mode == LinkMode::Los);
}

TEST_CASE("the sampled LOS fraction matches the LOS probability") {
  TierRadioParams p;
  Rng rng = substream(12, 1);
  int los = 0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) los += sample_link(rng, 160.0, p).mode == LinkMode::Los;
  CHECK(std::abs(los / double(n) - 0.68852) < 0.01);
}

TEST_CASE("mean received power equals P times the expected path loss") {
  TierRadioParams p;
  p.tx_power = 4.0;
  const double r = 300.0;
  const double pl = los_probability(r, p);
  const double expected = p.tx_power * (pl * path_loss(r, LinkMode::Los, p) +
                                        (1.0 - pl) * path_loss(r, LinkMode::Nlos, p));
  Rng rng = substream(12, 2);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const LinkSample l = sample_link(rng, r, p);
    const double v = p.tx_power * l.pathloss * l.fading_gain / expected;
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

}  // TEST_SUITE
