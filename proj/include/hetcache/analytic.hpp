#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hetcache/quadrature.hpp"
#include "hetcache/scenario.hpp"

namespace hetcache {

/// v = M (M!)^{-1/M}, evaluated through log-gamma.
double alzer_coefficient(int nakagami);

/// Laplace exponent of one tier's interference shot noise:
///   E(t) = 2 pi lambda sum_n int_0^inf y p^n(y) (1 - (1 + t P L^n(y) / M^n)^{-M^n}) dy
/// so that E[exp(-t I)] = exp(-E(t)). `density` is per square meter.
/// Throws NumericalError when a panel fails to converge.
QuadratureResult interference_laplace_exponent(double t, const TierRadioParams& interferer,
                                               double density,
                                               const IntegrationSettings& settings);

struct TierCoverage {
  double value = 0.0;
  double error = 0.0;
};

/// Expected number of tier-i BSs whose SIR clears beta_i / rho_i (the
/// Alzer-bounded form; exact when every Nakagami parameter is 1). The 2 pi
/// lambda_i factor is included. Independent of the requested file.
TierCoverage tier_coverage_density(std::size_t tier, const ScenarioConfig& cfg);

/// Per-tier coverage densities rho_i and the per-content products q_i[c] rho_i.
struct CoverageTable {
  std::vector<double> density;
  std::vector<double> error;
  /// weighted[c - 1][i] = q_i[c] * density[i].
  std::vector<std::vector<double>> weighted;
  std::uint64_t fingerprint = 0;
};

/// Computes every tier's density. Terms run concurrently on the OpenMP team and
/// are reduced in a fixed order, so the result does not depend on the team size.
CoverageTable compute_coverage_table(const ScenarioConfig& cfg);

/// Finite network: LOS-mode BSs lie within los_radius and NLOS-mode BSs within
/// nlos_radius of the UE. This is the law the Monte Carlo engine samples.
struct FiniteRegion {
  double los_radius = 0.0;
  double nlos_radius = 0.0;
};

/// Coverage densities of the finite network (no truncation tails).
CoverageTable compute_coverage_table(const ScenarioConfig& cfg, const FiniteRegion& region);

/// Same table as compute_coverage_table(cfg), computed term by term on the
/// calling thread.
CoverageTable compute_coverage_table_serial(const ScenarioConfig& cfg);

/// Radii beyond which LOS (resp. NLOS) serving links contribute at most
/// `tail_fraction` of any tier's coverage density. Used to size the Monte
/// Carlo region.
struct CoverageSupport {
  double los_radius = 0.0;
  double nlos_radius = 0.0;
};
CoverageSupport coverage_support(const ScenarioConfig& cfg, double tail_fraction);

/// sum_c a_c sum_i q_i[c] rho_i: an upper bound on the content-aware coverage
/// probability, tight when every beta_i >= 1.
double coverage_probability(const CoverageTable& table, const ContentModel& content,
                            std::span<const TierCachePolicy> policies);

/// Hash over the inputs that determine the coverage densities (radio,
/// densities, thresholds, integration settings). Caching fields are excluded.
std::uint64_t coverage_fingerprint(const ScenarioConfig& cfg);

}  // namespace hetcache
