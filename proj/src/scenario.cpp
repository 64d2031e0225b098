#include "hetcache/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hetcache/errors.hpp"

namespace hetcache {

namespace {

void rethrow_with_prefix(const std::string& prefix, const ValidationError& e) {
  throw ValidationError(prefix + "." + e.field(), e.reason());
}

}  // namespace

void IntegrationSettings::validate() const {
  if (!(rel_tol > 0.0)) throw ValidationError("integration.rel_tol", "rel_tol > 0");
  if (!(abs_tol > 0.0)) throw ValidationError("integration.abs_tol", "abs_tol > 0");
  if (outer_truncation_radius && !(*outer_truncation_radius > 0.0))
    throw ValidationError("integration.outer_truncation_radius", "radius > 0");
  if (inner_truncation_radius && !(*inner_truncation_radius > 0.0))
    throw ValidationError("integration.inner_truncation_radius", "radius > 0");
  if (max_subdivisions < 1)
    throw ValidationError("integration.max_subdivisions", "max_subdivisions >= 1");
}

void ScenarioConfig::validate() const {
  if (tiers.empty()) throw ValidationError("tiers", "K >= 1");
  content.validate();
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    const std::string prefix = "tiers[" + std::to_string(i + 1) + "]";
    const TierParams& t = tiers[i];
    if (!(t.density >= 0.0) || !std::isfinite(t.density))
      throw ValidationError(prefix + ".density", "density >= 0");
    if (!(t.range_expansion > 0.0 && t.range_expansion <= 1.0))
      throw ValidationError(prefix + ".range_expansion", "0 < rho <= 1");
    try {
      t.radio.validate();
    } catch (const ValidationError& e) {
      rethrow_with_prefix(prefix + ".radio", e);
    }
    try {
      t.cache.validate(content.library_size);
    } catch (const ValidationError& e) {
      rethrow_with_prefix(prefix + ".cache", e);
    }
  }
  if (!(costs.backhaul_unit_cost > 0.0))
    throw ValidationError("costs.backhaul_unit_cost", "C_bh > 0");
  if (!(costs.cache_unit_cost >= 0.0))
    throw ValidationError("costs.cache_unit_cost", "C_s >= 0");
  if (protocol.num_snapshots < 1)
    throw ValidationError("protocol.num_snapshots", "num_snapshots >= 1");
  if (protocol.region_radius && !(*protocol.region_radius > 0.0))
    throw ValidationError("protocol.region_radius", "region_radius > 0");
  if (protocol.los_region_radius && !(*protocol.los_region_radius > 0.0))
    throw ValidationError("protocol.los_region_radius", "los_region_radius > 0");
  if (protocol.los_region_radius && protocol.region_radius &&
      *protocol.los_region_radius < *protocol.region_radius)
    throw ValidationError("protocol.los_region_radius", "los_region_radius >= region_radius");
  if (!(protocol.auto_support_fraction > 0.0 && protocol.auto_support_fraction < 1.0))
    throw ValidationError("protocol.auto_support_fraction", "0 < auto_support_fraction < 1");
  if (!(protocol.auto_min_expected_bs > 0.0))
    throw ValidationError("protocol.auto_min_expected_bs", "auto_min_expected_bs > 0");
  if (protocol.workers < 0) throw ValidationError("protocol.workers", "workers >= 0");
  integration.validate();
  if (!(rate_log_base > 1.0)) throw ValidationError("rate_log_base", "base > 1");
}

double density_scale(DensityUnit unit) noexcept {
  return unit == DensityUnit::PerKm2 ? 1e-6 : 1.0;
}

double ScenarioConfig::density_per_m2(std::size_t i) const {
  return tiers.at(i).density * density_scale(density_unit);
}

double ScenarioConfig::association_threshold(std::size_t i) const {
  const TierParams& t = tiers.at(i);
  return t.radio.sir_threshold / t.range_expansion;
}

double ScenarioConfig::rate(std::size_t i) const {
  return std::log1p(tiers.at(i).radio.sir_threshold) / std::log(rate_log_base);
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  TierParams macro;
  macro.density = 1e-3;
  macro.radio.tx_power = 40.0;
  macro.radio.near_field_dist = 80.0;
  macro.radio.far_field_dist = 164.0;
  macro.radio.sir_threshold = 2.0;
  macro.cache = {20, 1.0};

  TierParams small;
  small.density = 1e-1;
  small.radio.tx_power = 4.0;
  small.radio.near_field_dist = 16.0;
  small.radio.far_field_dist = 36.0;
  small.radio.sir_threshold = 4.0;
  small.cache = {5, 1.0};

  cfg.tiers = {macro, small};
  return cfg;
}

double resolve_region_radius(const ScenarioConfig& cfg) {
  if (cfg.protocol.region_radius) return *cfg.protocol.region_radius;
  double total = 0.0;
  for (std::size_t i = 0; i < cfg.num_tiers(); ++i) total += cfg.density_per_m2(i);
  constexpr double kFloor = 10000.0;
  if (total <= 0.0) return kFloor;
  const double r = std::sqrt(cfg.protocol.auto_min_expected_bs / (std::numbers::pi * total));
  return std::max(kFloor, r);
}

std::string to_string(DensityUnit u) { return u == DensityUnit::PerKm2 ? "per_km2" : "per_m2"; }

std::string to_string(ContentEvaluation e) {
  return e == ContentEvaluation::AllWeighted ? "all_weighted" : "sampled";
}

std::string to_string(AlzerArgument a) {
  return a == AlzerArgument::Normalized ? "normalized" : "as_printed";
}

}  // namespace hetcache
