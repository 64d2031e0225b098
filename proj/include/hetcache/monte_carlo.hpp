#pragma once

#include <cstdint>
#include <vector>

#include "hetcache/metrics.hpp"
#include "hetcache/rng.hpp"
#include "hetcache/scenario.hpp"

namespace hetcache {

struct BaseStation {
  double x = 0.0;
  double y = 0.0;
  double distance = 0.0;
  LinkMode mode = LinkMode::Los;
  double fading_gain = 1.0;
  double pathloss = 0.0;
  /// P * L * H at the typical UE (origin).
  double received_power = 0.0;
  PlacementRealization placement;
};

/// Sampling geometry. Every BS inside disk_radius is drawn; between
/// disk_radius and los_radius only BSs in LOS are drawn. By independent
/// thinning this is the full PPP on the outer disk minus its far NLOS BSs,
/// which can neither cover nor add noticeable interference.
struct SimulationRegion {
  double disk_radius = 0.0;
  double los_radius = 0.0;
};

/// Explicit protocol radii, or the auto rule: start from the density floor of
/// resolve_region_radius and twice the coverage support of each link mode,
/// then double the radii until the finite-region coverage densities are
/// within protocol.auto_support_fraction of their plane values.
SimulationRegion resolve_simulation_region(const ScenarioConfig& cfg);

/// One realization of every tier's PPP on the simulation region.
struct Snapshot {
  std::vector<std::vector<BaseStation>> tiers;
  SimulationRegion region;

  std::size_t size() const noexcept;
};

/// Per-snapshot indicators. Content-indexed vectors use position c - 1.
struct SnapshotEstimates {
  std::vector<std::uint8_t> hit;
  /// No caching BS covers c but a macro BS without c does.
  std::vector<std::uint8_t> backhaul;
  /// caching_covering[c - 1][i]: tier-i BSs caching c whose SIR clears beta_i / rho_i.
  std::vector<std::vector<int>> caching_covering;
  /// Tier-i BSs whose SIR clears beta_i / rho_i, cache contents ignored.
  std::vector<int> covering;
  /// Tier of the strongest caching covering BS for each c, or -1.
  std::vector<int> serving_tier;
  bool covered_any = false;
};

/// Draws N_i ~ Poisson(lambda_i pi R^2) BSs per tier, uniformly on the disk,
/// each with an independent link and cache placement, then the LOS BSs of the
/// annulus out to region.los_radius.
Snapshot sample_network(Rng& rng, const ScenarioConfig& cfg, const SimulationRegion& region);
Snapshot sample_network(Rng& rng, const ScenarioConfig& cfg);

/// Snapshot `index` of the run defined by cfg.protocol.master_seed.
Snapshot sample_snapshot(const ScenarioConfig& cfg, std::int64_t index);

/// SIR of one BS against every other BS of every tier. +infinity when the
/// interference sum is empty.
double compute_sir(const Snapshot& snapshot, std::size_t tier, std::size_t index);

/// SIR of every BS, indexed like snapshot.tiers.
std::vector<std::vector<double>> compute_all_sir(const Snapshot& snapshot);

SnapshotEstimates evaluate_snapshot(const Snapshot& snapshot, const ScenarioConfig& cfg);

/// Averages cfg.protocol.num_snapshots snapshots with OpenMP. Snapshots are
/// grouped into fixed blocks that are reduced in index order, so the report
/// is bit-identical for any worker count.
MetricReport run_simulation(const ScenarioConfig& cfg);
MetricReport run_simulation(const ScenarioConfig& cfg, const SimulationProtocol& protocol);

/// Single-threaded reference that accumulates snapshots one by one.
MetricReport run_simulation_serial(const ScenarioConfig& cfg);

}  // namespace hetcache
