#include <doctest.h>

#include <cmath>
#include <vector>

#include "hetcache/analytic.hpp"
#include "hetcache/errors.hpp"
#include "oracles.hpp"

using namespace hetcache;

namespace {

ScenarioConfig unit_fading(double lambda2) {
  ScenarioConfig cfg = default_scenario();
  for (auto& t : cfg.tiers) t.radio.nakagami_los = t.radio.nakagami_nlos = 1;
  cfg.tiers[1].density = lambda2;
  return cfg;
}

}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("Alzer coefficient reference values") {
  CHECK(alzer_coefficient(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(alzer_coefficient(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(alzer_coefficient(3) == doctest::Approx(1.650964).epsilon(1e-6));
  const double big = alzer_coefficient(500);
  CHECK(std::isfinite(big));
  CHECK(big == doctest::Approx(std::exp(1.0)).epsilon(0.01));  // M (M!)^{-1/M} -> e
  CHECK_THROWS_AS(alzer_coefficient(0), DomainError);
}

TEST_CASE("normalized Alzer argument bounds the Gamma CCDF from above; the printed one does not") {
  // P(H > z) <= 1 - (1 - e^{-v z})^M for H ~ Gamma(M, 1/M).
  for (int m : {2, 3, 4}) {
    const double v = alzer_coefficient(m);
    for (double z : {0.25, 0.5, 1.0, 2.0}) {
      const double exact = oracle::gamma_ccdf(z, m);
      const double normalized = 1.0 - std::pow(1.0 - std::exp(-v * z), m);
      const double printed = 1.0 - std::pow(1.0 - std::exp(-v * m * z), m);
      CHECK(normalized >= exact);
      CHECK(printed < exact);
    }
  }
  CHECK(oracle::gamma_ccdf(1.0, 2) == doctest::Approx(0.406006).epsilon(1e-5));
}

TEST_CASE("Laplace exponent vanishes without argument or interferers") {
  const TierRadioParams p = default_scenario().tiers[1].radio;
  const IntegrationSettings s;
  CHECK(interference_laplace_exponent(0.0, p, 1e-6, s).value == 0.0);
  for (double t : {0.0, 1.0, 1e6}) CHECK(interference_laplace_exponent(t, p, 0.0, s).value == 0.0);
  CHECK_THROWS_AS(interference_laplace_exponent(-1.0, p, 1e-6, s), DomainError);
  CHECK_THROWS_AS(interference_laplace_exponent(1.0, p, -1e-6, s), DomainError);
}

TEST_CASE("Laplace exponent matches a brute-force trapezoid oracle") {
  TierRadioParams p = default_scenario().tiers[1].radio;
  p.nakagami_los = p.nakagami_nlos = 1;
  const double lambda = 1e-6;  // 1 per km^2
  const double oracle_value = oracle::laplace_exponent_trapezoid(1.0, p, lambda, 1000000, 1e5);
  const auto e = interference_laplace_exponent(1.0, p, lambda, IntegrationSettings{});
  CHECK(e.value == doctest::Approx(oracle_value).epsilon(1e-5));
  IntegrationSettings truncated;
  truncated.inner_truncation_radius = 1e5;
  CHECK(interference_laplace_exponent(1.0, p, lambda, truncated).value ==
        doctest::Approx(oracle_value).epsilon(1e-8));
  // Nakagami LOS parameter 2 as well.
  p.nakagami_los = 2;
  CHECK(interference_laplace_exponent(3.0, p, lambda, truncated).value ==
        doctest::Approx(oracle::laplace_exponent_trapezoid(3.0, p, lambda, 1000000, 1e5))
            .epsilon(1e-8));
}

TEST_CASE("Laplace exponent is nonnegative, nondecreasing and concave in t") {
  for (int m : {1, 2}) {
    TierRadioParams p = default_scenario().tiers[0].radio;
    p.nakagami_los = m;
    const IntegrationSettings s;
    std::vector<double> e;
    std::vector<double> ts;
    for (double t = 1e-2; t < 1e8; t *= 3.0) {
      ts.push_back(t);
      e.push_back(interference_laplace_exponent(t, p, 1e-9, s).value);
    }
    for (std::size_t k = 0; k < e.size(); ++k) CHECK(e[k] >= 0.0);
    for (std::size_t k = 1; k < e.size(); ++k) CHECK(e[k] > e[k - 1]);
    // Secant slopes of a concave function decrease.
    for (std::size_t k = 2; k < e.size(); ++k) {
      const double s1 = (e[k - 1] - e[k - 2]) / (ts[k - 1] - ts[k - 2]);
      const double s2 = (e[k] - e[k - 1]) / (ts[k] - ts[k - 1]);
      CHECK(s2 <= s1 * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("Laplace exponent is linear in the density, so any caching split of a tier is immaterial") {
  const TierRadioParams p = default_scenario().tiers[1].radio;
  const IntegrationSettings s;
  for (double q : {0.1, 0.37, 0.5}) {
    const double lambda = 1e-7;
    const double whole = interference_laplace_exponent(2.0, p, lambda, s).value;
    const double parts = interference_laplace_exponent(2.0, p, q * lambda, s).value +
                         interference_laplace_exponent(2.0, p, (1 - q) * lambda, s).value;
    CHECK(parts == doctest::Approx(whole).epsilon(1e-8));
  }
}

TEST_CASE("coverage density of an empty tier is zero") {
  ScenarioConfig cfg = default_scenario();
  cfg.tiers[1].density = 0.0;
  CHECK(tier_coverage_density(1, cfg).value == 0.0);
  const CoverageTable t = compute_coverage_table(cfg);
  CHECK(t.density[1] == 0.0);
  CHECK(t.density[0] > 0.0);
}

TEST_CASE("coverage densities carry no dependence on the requested file") {
  ScenarioConfig cfg = default_scenario();
  cfg.tiers[0].cache = {30, 0.4};
  cfg.tiers[1].cache = {7, 0.0};
  const CoverageTable t = compute_coverage_table(cfg);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto q = cache_probabilities(cfg.tiers[i].cache, cfg.content.library_size);
    for (int c = 1; c <= cfg.content.library_size; ++c)
      if (q[c - 1] > 0.0) CHECK(t.weighted[c - 1][i] / q[c - 1] == doctest::Approx(t.density[i]).epsilon(1e-15));
    CHECK(tier_coverage_density(i, cfg).value == doctest::Approx(t.density[i]).epsilon(1e-14));
  }
  // Caching fields do not enter the fingerprint.
  ScenarioConfig other = cfg;
  other.tiers[1].cache = {50, 1.0};
  CHECK(coverage_fingerprint(other) == coverage_fingerprint(cfg));
  other.tiers[1].density *= 2;
  CHECK(coverage_fingerprint(other) != coverage_fingerprint(cfg));
}

TEST_CASE("coverage density decreases strictly with the SIR threshold") {
  ScenarioConfig cfg = default_scenario();
  double previous = 1e300;
  for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    cfg.tiers[1].radio.sir_threshold = beta;
    const double v = tier_coverage_density(1, cfg).value;
    CHECK(v < previous);
    previous = v;
  }
}

TEST_CASE("coverage probability collapses to the density sum when every file is cached") {
  ScenarioConfig cfg = default_scenario();
  cfg.tiers[0].cache = {100, 0.0};
  cfg.tiers[1].cache = {100, 0.5};
  const CoverageTable t = compute_coverage_table(cfg);
  const auto policies = std::vector<TierCachePolicy>{cfg.tiers[0].cache, cfg.tiers[1].cache};
  CHECK(coverage_probability(t, cfg.content, policies) ==
        doctest::Approx(t.density[0] + t.density[1]).epsilon(1e-13));
  cfg.tiers[0].density = cfg.tiers[1].density = 0.0;
  CHECK(coverage_probability(compute_coverage_table(cfg), cfg.content, policies) == 0.0);
}

TEST_CASE("parallel and serial coverage tables are bit-identical") {
  for (int m : {1, 2, 3}) {
    ScenarioConfig cfg = default_scenario();
    for (auto& t : cfg.tiers) t.radio.nakagami_los = m;
    const CoverageTable a = compute_coverage_table(cfg);
    const CoverageTable b = compute_coverage_table_serial(cfg);
    CHECK(a.density == b.density);
    CHECK(a.error == b.error);
    CHECK(a.weighted == b.weighted);
  }
}

TEST_CASE("halving the tolerance moves the coverage density by less than its error estimate") {
  for (double lambda2 : {1e-3, 1e-1, 10.0}) {
    ScenarioConfig cfg = default_scenario();
    cfg.tiers[1].density = lambda2;
    const CoverageTable coarse = compute_coverage_table(cfg);
    cfg.integration.rel_tol *= 0.5;
    const CoverageTable fine = compute_coverage_table(cfg);
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(std::abs(coarse.density[i] - fine.density[i]) <= coarse.error[i]);
  }
}

TEST_CASE("explicit outer truncation converges to the automatic one") {
  ScenarioConfig cfg = unit_fading(10.0);
  const CoverageTable automatic = compute_coverage_table(cfg);
  cfg.integration.outer_truncation_radius = 1e9;
  const CoverageTable wide = compute_coverage_table(cfg);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(wide.density[i] == doctest::Approx(automatic.density[i]).epsilon(1e-5));
}

TEST_CASE("the finite-region table approaches the plane as the region grows") {
  const ScenarioConfig cfg = unit_fading(10.0);
  const CoverageTable plane = compute_coverage_table(cfg);
  const CoverageTable big = compute_coverage_table(cfg, FiniteRegion{1e9, 1e6});
  const CoverageTable small = compute_coverage_table(cfg, FiniteRegion{1e3, 1e3});
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(big.density[i] == doctest::Approx(plane.density[i]).epsilon(1e-4));
  // Dropping far interferers can only raise the SIR.
  CHECK(small.density[1] > plane.density[1] * 1.05);
  CHECK_THROWS_AS(compute_coverage_table(cfg, FiniteRegion{0.0, 1.0}), DomainError);
}

TEST_CASE("coverage support lies beyond the near field and LOS links reach further") {
  const CoverageSupport s = coverage_support(default_scenario(), 1e-3);
  CHECK(s.nlos_radius > 0.0);
  CHECK(s.los_radius >= s.nlos_radius);
  CHECK_THROWS_AS(coverage_support(default_scenario(), 0.0), DomainError);
}

TEST_CASE("an exhausted quadrature budget surfaces as a numerical error") {
  ScenarioConfig cfg = default_scenario();
  cfg.integration.max_subdivisions = 1;
  cfg.integration.rel_tol = 1e-14;
  cfg.integration.abs_tol = 1e-300;
  CHECK_THROWS_AS(compute_coverage_table(cfg), NumericalError);
}

}  // TEST_SUITE
