#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hetcache/scenario.hpp"

namespace hetcache {

/// Scenario files are JSON objects (comments allowed). Every key is optional;
/// missing keys keep the default_scenario() value, and each entry of "tiers"
/// overrides the preset tier at the same position. Unknown keys are rejected.
///
///   {
///     "density_unit": "per_km2",            // or "per_m2"
///     "rate_log_base": 2,
///     "content":  { "library_size": 100, "popularity_exponent": 1.0 },
///     "costs":    { "backhaul_unit_cost": 1, "cache_unit_cost": 0.01 },
///     "protocol": { "num_snapshots": 40000, "region_radius": "auto",
///                   "los_region_radius": "auto", "auto_min_expected_bs": 200,
///                   "auto_support_fraction": 0.001, "master_seed": 1,
///                   "content_evaluation": "all_weighted", "workers": 0 },
///     "integration": { "rel_tol": 1e-6, "abs_tol": 1e-10,
///                      "outer_truncation_radius": "auto",
///                      "inner_truncation_radius": "auto",
///                      "max_subdivisions": 400, "alzer_argument": "normalized" },
///     "tiers": [ { "density": 1e-3, "range_expansion": 1,
///                  "radio": { "tx_power": 40, "pathloss_exp_los": 2.4, ... },
///                  "cache": { "cache_size": 20, "mpc_fraction": 1 } }, ... ]
///   }
///
/// Errors are ValidationError with the offending field path.
ScenarioConfig parse_config_text(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Every field written explicitly; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

/// Parameter paths address scalar fields, e.g. "tiers[2].density",
/// "tiers[2].cache.S", "tiers[*].rho", "content.kappa", "costs.C_s".
/// Tier indices are 1-based; "*" selects every tier. Short aliases:
/// lambda = density, rho = range_expansion, S = cache_size, phi = mpc_fraction,
/// beta = radio.sir_threshold, P = radio.tx_power, kappa = popularity_exponent,
/// F = library_size, C_bh / C_s = the cost fields. The update is validated.
void set_parameter(ScenarioConfig& cfg, std::string_view path, double value);

/// Value at a parameter path; for "[*]" paths, the value of tier 1.
double get_parameter(const ScenarioConfig& cfg, std::string_view path);

/// Path with aliases expanded, e.g. "tiers[2].cache.cache_size".
std::string canonical_parameter_path(std::string_view path);

}  // namespace hetcache
