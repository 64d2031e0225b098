#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/channel.hpp"
#include "hetcache/content.hpp"

namespace hetcache {

enum class DensityUnit { PerKm2, PerM2 };

/// One tier of base stations. `density` is expressed in the scenario's
/// DensityUnit; range_expansion rho scales the association threshold to
/// beta / rho.
struct TierParams {
  double density = 0.0;
  TierRadioParams radio;
  TierCachePolicy cache;
  double range_expansion = 1.0;

  friend bool operator==(const TierParams&, const TierParams&) = default;
};

struct CostModel {
  double backhaul_unit_cost = 1.0;
  double cache_unit_cost = 0.01;

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

enum class ContentEvaluation { AllWeighted, Sampled };

struct SimulationProtocol {
  std::int64_t num_snapshots = 40000;
  /// Disk radius in meters; nullopt selects the auto rule (see resolve_region_radius).
  std::optional<double> region_radius;
  double auto_min_expected_bs = 200.0;
  /// Outer radius of the annulus beyond region_radius in which only the
  /// LOS-thinned BS process is sampled. nullopt: auto when region_radius is
  /// auto, otherwise equal to region_radius (plain disk).
  std::optional<double> los_region_radius;
  /// Auto sizing keeps the coverage mass outside the region below this share.
  double auto_support_fraction = 1e-3;
  std::uint64_t master_seed = 1;
  ContentEvaluation content_evaluation = ContentEvaluation::AllWeighted;
  /// OpenMP team size; 0 uses the runtime default.
  int workers = 0;

  friend bool operator==(const SimulationProtocol&, const SimulationProtocol&) = default;
};

/// Argument scaling inside the Alzer-bounded coverage expression. `AsPrinted`
/// multiplies by v M, `Normalized` by v alone (v already carries the M of the
/// normalized Gamma law). Both agree at M = 1.
enum class AlzerArgument { Normalized, AsPrinted };

struct IntegrationSettings {
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  /// Meters; nullopt selects automatic truncation.
  std::optional<double> outer_truncation_radius;
  std::optional<double> inner_truncation_radius;
  int max_subdivisions = 400;
  AlzerArgument alzer_argument = AlzerArgument::Normalized;

  void validate() const;

  friend bool operator==(const IntegrationSettings&, const IntegrationSettings&) = default;
};

/// Full K-tier scenario. Tier index 0 is the macro tier that carries backhaul.
struct ScenarioConfig {
  std::vector<TierParams> tiers;
  ContentModel content;
  CostModel costs;
  SimulationProtocol protocol;
  IntegrationSettings integration;
  DensityUnit density_unit = DensityUnit::PerKm2;
  double rate_log_base = 2.0;

  void validate() const;

  std::size_t num_tiers() const noexcept { return tiers.size(); }
  /// Density of tier i in BSs per square meter.
  double density_per_m2(std::size_t i) const;
  /// beta_i / rho_i.
  double association_threshold(std::size_t i) const;
  /// Delivered rate log_b(1 + beta_i); range expansion does not change it.
  double rate(std::size_t i) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

double density_scale(DensityUnit unit) noexcept;

/// Two-tier macro/small-cell network: P = (40, 4) W, alpha = 2.4 / 4,
/// D0/D1 = 80/164 m and 16/36 m, beta = (2, 4), F = 100, S = (20, 5),
/// lambda_1 = 1e-3 per km^2, lambda_2 = 1e-1 per km^2, MPC placement.
ScenarioConfig default_scenario();

/// Explicit protocol radius, or the density floor of the auto rule: the larger
/// of 10 km and the radius that holds auto_min_expected_bs BSs on average.
/// The Monte Carlo engine widens the auto value further, see
/// resolve_simulation_region.
double resolve_region_radius(const ScenarioConfig& cfg);

std::string to_string(DensityUnit u);
std::string to_string(ContentEvaluation e);
std::string to_string(AlzerArgument a);

}  // namespace hetcache
