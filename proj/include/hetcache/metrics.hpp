#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hetcache/analytic.hpp"
#include "hetcache/scenario.hpp"

namespace hetcache {

enum class Provenance { Analytic, MonteCarlo };

std::string to_string(Provenance p);

/// Standard errors (Monte Carlo) or propagated quadrature error estimates
/// (analytic) for the headline metrics.
struct MetricUncertainty {
  double coverage = 0.0;
  double coverage_any = 0.0;
  double p_hit = 0.0;
  double p_bh = 0.0;
  double p_bh_operational = 0.0;
  double ase = 0.0;
  double cost = 0.0;
  double efficiency = 0.0;
  std::vector<double> per_tier_coverage;
};

struct MetricReport {
  Provenance provenance = Provenance::Analytic;
  /// Content-aware coverage clamped to [0, 1]; see coverage_bound.
  double coverage = 0.0;
  /// Unclamped analytic bound (an expected covering count). Equal to
  /// coverage for Monte Carlo reports.
  double coverage_bound = 0.0;
  bool coverage_clamped = false;
  /// Coverage ignoring cache contents.
  double coverage_any = 0.0;
  double p_hit = 0.0;
  /// Backhaul usage sum_c a_c (1 - q_1[c]) rho_1.
  double p_bh = 0.0;
  /// Monte Carlo only: P(no caching BS covers and a non-caching macro BS does).
  /// Analytic reports repeat p_bh.
  double p_bh_operational = 0.0;
  /// Area spectral efficiency, bit/s/Hz/m^2.
  double ase = 0.0;
  /// Cost per m^2 in units of the cost model.
  double cost = 0.0;
  double efficiency = 0.0;
  bool efficiency_defined = true;
  /// Analytic rho_i or Monte Carlo mean covering count per tier.
  std::vector<double> per_tier_coverage;
  std::vector<double> p_hit_per_content;
  std::vector<double> p_bh_per_content;
  MetricUncertainty uncertainty;
  std::int64_t snapshots = 0;
};

struct HitBackhaul {
  double p_hit = 0.0;
  double p_bh = 0.0;
};

/// p_hit = sum_c a_c sum_i q_i[c] rho_i and p_bh = sum_c a_c (1 - q_1[c]) rho_1.
HitBackhaul hit_and_backhaul(std::span<const double> tier_coverage,
                             std::span<const TierCachePolicy> policies,
                             const ContentModel& content);

/// (1 - q_1[c]) rho_1 for c = 1..F.
std::vector<double> backhaul_per_content(double macro_coverage, const TierCachePolicy& macro,
                                         int library_size);

/// sum_c a_c (sum_i q_i[c] rho_i lambda_i R_i + (1 - q_1[c]) rho_1 lambda_1 R_1).
/// Densities per m^2.
double area_spectral_efficiency(std::span<const double> tier_coverage,
                                std::span<const TierCachePolicy> policies,
                                std::span<const double> densities, const ContentModel& content,
                                std::span<const double> rates);

/// lambda_1 (F - S_1) C_bh sum_c a_c p_bh[c] + C_s sum_i lambda_i S_i.
double cost_per_area(std::span<const double> backhaul_per_content, const ContentModel& content,
                     std::span<const int> cache_sizes, std::span<const double> densities,
                     const CostModel& costs);

/// ASE per unit cost. Throws UndefinedEfficiencyError when cost is zero.
double caching_efficiency(double ase, double cost);

/// Copy of `cfg` with association thresholds beta_i / rho_i.
ScenarioConfig apply_range_expansion(const ScenarioConfig& cfg, std::span<const double> rho);

/// Every metric from the analytic engine.
MetricReport analytic_report(const ScenarioConfig& cfg);
/// Same, reusing a coverage table computed for cfg's radio parameters.
MetricReport analytic_report(const ScenarioConfig& cfg, const CoverageTable& table);

std::vector<TierCachePolicy> cache_policies(const ScenarioConfig& cfg);
std::vector<double> densities_per_m2(const ScenarioConfig& cfg);
std::vector<double> tier_rates(const ScenarioConfig& cfg);

}  // namespace hetcache
