// Times the OpenMP kernels against their serial references and checks that
// both produce the same numbers.
//
//   hetcache_bench [snapshots] [repeats]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "hetcache/analytic.hpp"
#include "hetcache/monte_carlo.hpp"

using namespace hetcache;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

int main(int argc, char** argv) {
  const long snapshots = argc > 1 ? std::atol(argv[1]) : 2000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  const int threads = omp_get_max_threads();

  ScenarioConfig cfg = default_scenario();
  cfg.tiers[1].density = 10.0;
  cfg.protocol.num_snapshots = snapshots;
  // Resolve the region once so the timings cover sampling only.
  const SimulationRegion region = resolve_simulation_region(cfg);
  cfg.protocol.region_radius = region.disk_radius;
  cfg.protocol.los_region_radius = region.los_radius;

  std::printf("threads=%d snapshots=%ld repeats=%d\n", threads, snapshots, repeats);
  std::printf("%-28s %12s %12s %9s %12s\n", "kernel", "serial[s]", "parallel[s]", "speedup",
              "max rel diff");

  CoverageTable ts, tp;
  const double a_serial = best_of(repeats, [&] { ts = compute_coverage_table_serial(cfg); });
  const double a_par = best_of(repeats, [&] { tp = compute_coverage_table(cfg); });
  double a_diff = 0.0;
  for (std::size_t i = 0; i < ts.density.size(); ++i)
    a_diff = std::max(a_diff, rel_diff(ts.density[i], tp.density[i]));
  std::printf("%-28s %12.4f %12.4f %9.2f %12.2e\n", "analytic coverage table", a_serial, a_par,
              a_serial / a_par, a_diff);

  MetricReport ms, mp;
  const double m_serial = best_of(repeats, [&] { ms = run_simulation_serial(cfg); });
  cfg.protocol.workers = threads;
  const double m_par = best_of(repeats, [&] { mp = run_simulation(cfg); });
  double m_diff = std::max({rel_diff(ms.coverage, mp.coverage), rel_diff(ms.ase, mp.ase),
                            rel_diff(ms.p_bh, mp.p_bh)});
  for (std::size_t i = 0; i < ms.per_tier_coverage.size(); ++i)
    m_diff = std::max(m_diff, rel_diff(ms.per_tier_coverage[i], mp.per_tier_coverage[i]));
  std::printf("%-28s %12.4f %12.4f %9.2f %12.2e\n", "monte carlo snapshots", m_serial, m_par,
              m_serial / m_par, m_diff);
  std::printf("monte carlo throughput: %.0f snapshots/s (parallel)\n", snapshots / m_par);
  return 0;
}
