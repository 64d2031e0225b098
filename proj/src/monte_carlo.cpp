#include "hetcache/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <omp.h>

#include "hetcache/analytic.hpp"
#include "hetcache/errors.hpp"

namespace hetcache {

std::size_t Snapshot::size() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tiers) n += t.size();
  return n;
}

SimulationRegion resolve_simulation_region(const ScenarioConfig& scenario) {
  const SimulationProtocol& p = scenario.protocol;
  SimulationRegion region;
  if (p.region_radius) {
    region.disk_radius = *p.region_radius;
    region.los_radius = p.los_region_radius.value_or(region.disk_radius);
    return region;
  }
  ScenarioConfig cfg = scenario;
  cfg.integration.rel_tol = std::max(cfg.integration.rel_tol, 1e-5);
  const double fraction = p.auto_support_fraction;
  const CoverageSupport support = coverage_support(cfg, fraction);
  region.disk_radius = std::max(resolve_region_radius(cfg), 2.0 * support.nlos_radius);
  region.los_radius = std::max(region.disk_radius, 2.0 * support.los_radius);
  if (p.los_region_radius) {
    region.los_radius = std::max(*p.los_region_radius, region.disk_radius);
    return region;
  }

  // Grow the region until truncation moves no tier's coverage density by more
  // than `fraction` of its plane value. Far LOS interferers decay slowly, so
  // the LOS annulus usually has to reach well past the coverage support.
  const CoverageTable plane = compute_coverage_table(cfg);
  auto excess = [&](const SimulationRegion& r) {
    const CoverageTable t = compute_coverage_table(cfg, {r.los_radius, r.disk_radius});
    double worst = 0.0;
    for (std::size_t i = 0; i < plane.density.size(); ++i) {
      const double allowed = fraction * plane.density[i] + 1e-12;
      worst = std::max(worst, std::abs(t.density[i] - plane.density[i]) / allowed);
    }
    return worst;
  };
  double current = excess(region);
  for (int iter = 0; current > 1.0; ++iter) {
    if (iter >= 40)
      throw NumericalError("auto region sizing did not reach the requested truncation bias",
                           current * fraction);
    SimulationRegion wider_los = region;
    wider_los.los_radius *= 2.0;
    SimulationRegion wider_disk = region;
    wider_disk.disk_radius *= 2.0;
    wider_disk.los_radius = std::max(wider_disk.los_radius, wider_disk.disk_radius);
    const double via_los = excess(wider_los);
    if (via_los <= 0.5 * current) {
      region = wider_los;
      current = via_los;
    } else {
      const double via_disk = excess(wider_disk);
      region = via_disk < via_los ? wider_disk : wider_los;
      current = std::min(via_disk, via_los);
    }
  }
  return region;
}

namespace {

BaseStation make_station(Rng& rng, double r, const TierParams& tier, int library_size,
                         const LinkSample& link) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BaseStation bs;
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  bs.x = r * std::cos(theta);
  bs.y = r * std::sin(theta);
  bs.distance = r;
  bs.mode = link.mode;
  bs.fading_gain = link.fading_gain;
  bs.pathloss = link.pathloss;
  bs.received_power = tier.radio.tx_power * link.pathloss * link.fading_gain;
  bs.placement = sample_placement(rng, tier.cache, library_size);
  return bs;
}

// r * p^L(r) for r >= D0: D0 + (r - D0) e^{-r / D1}.
double los_radial_weight(double r, const TierRadioParams& p) {
  return p.near_field_dist + (r - p.near_field_dist) * std::exp(-r / p.far_field_dist);
}

// int_a^b r p^L(r) dr for D0 <= a <= b.
double los_radial_mass(double a, double b, const TierRadioParams& p) {
  const double d0 = p.near_field_dist;
  const double d1 = p.far_field_dist;
  auto primitive = [&](double r) { return d0 * r - d1 * std::exp(-r / d1) * (r - d0 + d1); };
  return primitive(b) - primitive(a);
}

// LOS-thinned PPP on the annulus [a, b]: Poisson count, radii by rejection
// against the weight's maximum on the annulus.
void sample_los_annulus(Rng& rng, const TierParams& tier, double density, double a, double b,
                        int library_size, std::vector<BaseStation>& out) {
  const TierRadioParams& p = tier.radio;
  const double mean = 2.0 * std::numbers::pi * density * los_radial_mass(a, b, p);
  if (!(mean > 0.0)) return;
  std::poisson_distribution<long> count(mean);
  const long n = count(rng);
  // The weight decreases beyond D0 + D1 and increases before it.
  const double peak = std::clamp(p.near_field_dist + p.far_field_dist, a, b);
  const double bound = los_radial_weight(peak, p);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (long k = 0; k < n; ++k) {
    double r;
    do {
      r = a + (b - a) * unit(rng);
    } while (unit(rng) * bound > los_radial_weight(r, p));
    LinkSample link;
    link.mode = LinkMode::Los;
    link.fading_gain = sample_fading(rng, p.nakagami_los);
    link.pathloss = path_loss(r, LinkMode::Los, p);
    out.push_back(make_station(rng, r, tier, library_size, link));
  }
}

}  // namespace

Snapshot sample_network(Rng& rng, const ScenarioConfig& cfg) {
  return sample_network(rng, cfg, resolve_simulation_region(cfg));
}

Snapshot sample_network(Rng& rng, const ScenarioConfig& cfg, const SimulationRegion& region) {
  Snapshot snap;
  snap.region = region;
  const double radius = region.disk_radius;
  const double area = std::numbers::pi * radius * radius;
  const int f = cfg.content.library_size;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  snap.tiers.resize(cfg.num_tiers());
  for (std::size_t i = 0; i < cfg.num_tiers(); ++i) {
    const double density = cfg.density_per_m2(i);
    if (density <= 0.0) continue;
    const TierParams& tier = cfg.tiers[i];
    std::poisson_distribution<long> count(density * area);
    const long n = count(rng);
    auto& out = snap.tiers[i];
    out.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
      const double r = radius * std::sqrt(unit(rng));
      out.push_back(make_station(rng, r, tier, f, sample_link(rng, r, tier.radio)));
    }
    if (region.los_radius > radius) {
      // The closed-form radial mass assumes the annulus lies beyond D0.
      const double a = std::max(radius, tier.radio.near_field_dist);
      if (a > radius)
        throw DomainError("sample_network: LOS annulus must start beyond near_field_dist");
      sample_los_annulus(rng, tier, density, a, region.los_radius, f, out);
    }
  }
  return snap;
}

Snapshot sample_snapshot(const ScenarioConfig& cfg, std::int64_t index) {
  Rng rng = substream(cfg.protocol.master_seed, static_cast<std::uint64_t>(index));
  return sample_network(rng, cfg);
}

namespace {

long double total_power(const Snapshot& s) {
  long double total = 0.0L;
  for (const auto& tier : s.tiers)
    for (const BaseStation& bs : tier) total += bs.received_power;
  return total;
}

double sir_against(long double total, double signal) {
  const long double interference = total - static_cast<long double>(signal);
  if (interference <= 0.0L) return std::numeric_limits<double>::infinity();
  return static_cast<double>(signal / interference);
}

}  // namespace

double compute_sir(const Snapshot& snapshot, std::size_t tier, std::size_t index) {
  const BaseStation& bs = snapshot.tiers.at(tier).at(index);
  if (snapshot.size() == 1) return std::numeric_limits<double>::infinity();
  return sir_against(total_power(snapshot), bs.received_power);
}

std::vector<std::vector<double>> compute_all_sir(const Snapshot& snapshot) {
  const long double total = total_power(snapshot);
  const bool alone = snapshot.size() == 1;
  std::vector<std::vector<double>> out(snapshot.tiers.size());
  for (std::size_t i = 0; i < snapshot.tiers.size(); ++i) {
    out[i].reserve(snapshot.tiers[i].size());
    for (const BaseStation& bs : snapshot.tiers[i])
      out[i].push_back(alone ? std::numeric_limits<double>::infinity()
                             : sir_against(total, bs.received_power));
  }
  return out;
}

SnapshotEstimates evaluate_snapshot(const Snapshot& snapshot, const ScenarioConfig& cfg) {
  const std::size_t k = cfg.num_tiers();
  if (snapshot.tiers.size() != k)
    throw DomainError("evaluate_snapshot: snapshot tier count does not match scenario");
  const int f = cfg.content.library_size;
  SnapshotEstimates est;
  est.hit.assign(f, 0);
  est.backhaul.assign(f, 0);
  est.caching_covering.assign(f, std::vector<int>(k, 0));
  est.covering.assign(k, 0);
  est.serving_tier.assign(f, -1);

  struct Covering {
    std::size_t tier;
    double sir;
    PlacementRealization placement;
  };
  std::vector<Covering> covering;
  const auto sir = compute_all_sir(snapshot);
  for (std::size_t i = 0; i < k; ++i) {
    const double threshold = cfg.association_threshold(i);
    for (std::size_t n = 0; n < snapshot.tiers[i].size(); ++n) {
      if (sir[i][n] >= threshold) {
        covering.push_back({i, sir[i][n], snapshot.tiers[i][n].placement});
        ++est.covering[i];
      }
    }
  }
  est.covered_any = !covering.empty();
  if (covering.empty()) return est;

  for (int c = 1; c <= f; ++c) {
    double best = -1.0;
    bool macro_without = false;
    for (const Covering& cv : covering) {
      if (cv.placement.contains(c)) {
        ++est.caching_covering[c - 1][cv.tier];
        if (cv.sir > best) {
          best = cv.sir;
          est.serving_tier[c - 1] = static_cast<int>(cv.tier);
        }
      } else if (cv.tier == 0) {
        macro_without = true;
      }
    }
    est.hit[c - 1] = best >= 0.0 ? 1 : 0;
    est.backhaul[c - 1] = (!est.hit[c - 1] && macro_without) ? 1 : 0;
  }
  return est;
}

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) noexcept {
    sum += x;
    sum_sq += x * x;
  }
  void merge(const Moments& o) noexcept {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean(double n) const noexcept { return sum / n; }
  double standard_error(double n) const noexcept {
    if (n < 2.0) return 0.0;
    const double m = sum / n;
    const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
    return std::sqrt(var / n);
  }
};

// Precomputed per-scenario constants used by every snapshot.
struct Weights {
  std::vector<double> request;          // a_c
  std::vector<double> macro_miss;       // 1 - q_1[c]
  double macro_miss_weighted = 0.0;     // sum_c a_c (1 - q_1[c])
  std::vector<double> rate_density;     // lambda_i R_i
  std::discrete_distribution<int> draw;
};

Weights make_weights(const ScenarioConfig& cfg) {
  Weights w;
  w.request = cfg.content.request_probabilities();
  w.macro_miss = cache_probabilities(cfg.tiers[0].cache, cfg.content.library_size);
  for (double& v : w.macro_miss) v = 1.0 - v;
  for (std::size_t c = 0; c < w.request.size(); ++c)
    w.macro_miss_weighted += w.request[c] * w.macro_miss[c];
  for (std::size_t i = 0; i < cfg.num_tiers(); ++i)
    w.rate_density.push_back(cfg.density_per_m2(i) * cfg.rate(i));
  w.draw = std::discrete_distribution<int>(w.request.begin(), w.request.end());
  return w;
}

struct Accumulator {
  double n = 0.0;
  Moments hit, any, bh_aligned, bh_operational, ase;
  double cross_ase_bh = 0.0;
  std::vector<Moments> covering;                     // [i]
  std::vector<double> hit_per_content;               // [c]
  std::vector<double> bh_operational_per_content;    // [c]

  Accumulator(std::size_t tiers, int contents)
      : covering(tiers), hit_per_content(contents, 0.0), bh_operational_per_content(contents, 0.0) {}

  void add(const SnapshotEstimates& e, const Weights& w, const ScenarioConfig& cfg, Rng& rng) {
    const int f = static_cast<int>(w.request.size());
    const std::size_t k = e.covering.size();
    const double macro_cov = e.covering[0];
    double s_hit = 0.0, s_bh_op = 0.0, s_ase = 0.0, s_bh = 0.0;
    auto ase_term = [&](int c) {
      double v = w.rate_density[0] * w.macro_miss[c] * macro_cov;
      for (std::size_t i = 0; i < k; ++i) v += w.rate_density[i] * e.caching_covering[c][i];
      return v;
    };
    if (cfg.protocol.content_evaluation == ContentEvaluation::AllWeighted) {
      for (int c = 0; c < f; ++c) {
        s_hit += w.request[c] * e.hit[c];
        s_bh_op += w.request[c] * e.backhaul[c];
        if (e.covered_any) s_ase += w.request[c] * ase_term(c);
      }
      s_bh = w.macro_miss_weighted * macro_cov;
    } else {
      std::discrete_distribution<int> draw = w.draw;
      const int c = draw(rng);
      s_hit = e.hit[c];
      s_bh_op = e.backhaul[c];
      s_ase = ase_term(c);
      s_bh = w.macro_miss[c] * macro_cov;
    }
    n += 1.0;
    hit.add(s_hit);
    any.add(e.covered_any ? 1.0 : 0.0);
    bh_aligned.add(s_bh);
    bh_operational.add(s_bh_op);
    ase.add(s_ase);
    cross_ase_bh += s_ase * s_bh;
    for (std::size_t i = 0; i < k; ++i) covering[i].add(e.covering[i]);
    for (int c = 0; c < f; ++c) {
      hit_per_content[c] += e.hit[c];
      bh_operational_per_content[c] += e.backhaul[c];
    }
  }

  void merge(const Accumulator& o) {
    n += o.n;
    hit.merge(o.hit);
    any.merge(o.any);
    bh_aligned.merge(o.bh_aligned);
    bh_operational.merge(o.bh_operational);
    ase.merge(o.ase);
    cross_ase_bh += o.cross_ase_bh;
    for (std::size_t i = 0; i < covering.size(); ++i) covering[i].merge(o.covering[i]);
    for (std::size_t c = 0; c < hit_per_content.size(); ++c) {
      hit_per_content[c] += o.hit_per_content[c];
      bh_operational_per_content[c] += o.bh_operational_per_content[c];
    }
  }
};

void accumulate_snapshot(Accumulator& acc, const ScenarioConfig& cfg, const Weights& w,
                         const SimulationRegion& region, std::int64_t index) {
  Rng rng = substream(cfg.protocol.master_seed, static_cast<std::uint64_t>(index));
  const Snapshot snap = sample_network(rng, cfg, region);
  acc.add(evaluate_snapshot(snap, cfg), w, cfg, rng);
}

MetricReport finalize(const Accumulator& acc, const ScenarioConfig& cfg, const Weights& w) {
  const double n = acc.n;
  const std::size_t k = cfg.num_tiers();
  const int f = cfg.content.library_size;
  MetricReport r;
  r.provenance = Provenance::MonteCarlo;
  r.snapshots = static_cast<std::int64_t>(n);
  r.p_hit = acc.hit.mean(n);
  r.coverage = r.p_hit;
  r.coverage_bound = r.p_hit;
  r.coverage_any = acc.any.mean(n);
  r.p_bh = acc.bh_aligned.mean(n);
  r.p_bh_operational = acc.bh_operational.mean(n);
  r.ase = acc.ase.mean(n);
  for (std::size_t i = 0; i < k; ++i) r.per_tier_coverage.push_back(acc.covering[i].mean(n));
  r.p_hit_per_content.resize(f);
  r.p_bh_per_content.resize(f);
  for (int c = 0; c < f; ++c) {
    r.p_hit_per_content[c] = acc.hit_per_content[c] / n;
    r.p_bh_per_content[c] = w.macro_miss[c] * r.per_tier_coverage[0];
  }

  const std::vector<double> lambda = densities_per_m2(cfg);
  std::vector<int> sizes;
  for (const TierParams& t : cfg.tiers) sizes.push_back(t.cache.cache_size);
  r.cost = cost_per_area(r.p_bh_per_content, cfg.content, sizes, lambda, cfg.costs);
  const double bh_scale = lambda[0] * (f - sizes[0]) * cfg.costs.backhaul_unit_cost;

  MetricUncertainty& u = r.uncertainty;
  u.p_hit = acc.hit.standard_error(n);
  u.coverage = u.p_hit;
  u.coverage_any = acc.any.standard_error(n);
  u.p_bh = acc.bh_aligned.standard_error(n);
  u.p_bh_operational = acc.bh_operational.standard_error(n);
  u.ase = acc.ase.standard_error(n);
  u.cost = bh_scale * u.p_bh;
  for (std::size_t i = 0; i < k; ++i)
    u.per_tier_coverage.push_back(acc.covering[i].standard_error(n));

  if (r.cost > 0.0) {
    r.efficiency = caching_efficiency(r.ase, r.cost);
    if (n >= 2.0) {
      // Delta method for ase / (a + b * bh).
      const double mean_ase = r.ase;
      const double mean_bh = r.p_bh;
      const double cov = (acc.cross_ase_bh - n * mean_ase * mean_bh) / (n - 1.0) / n;
      const double g_ase = 1.0 / r.cost;
      const double g_bh = -r.ase * bh_scale / (r.cost * r.cost);
      const double var = g_ase * g_ase * u.ase * u.ase + g_bh * g_bh * u.p_bh * u.p_bh +
                         2.0 * g_ase * g_bh * cov;
      u.efficiency = std::sqrt(std::max(0.0, var));
    }
  } else {
    r.efficiency_defined = false;
  }
  return r;
}

constexpr std::int64_t kBlockSize = 64;

}  // namespace

MetricReport run_simulation(const ScenarioConfig& cfg) { return run_simulation(cfg, cfg.protocol); }

MetricReport run_simulation(const ScenarioConfig& scenario, const SimulationProtocol& protocol) {
  ScenarioConfig cfg = scenario;
  cfg.protocol = protocol;
  cfg.validate();
  const Weights w = make_weights(cfg);
  const SimulationRegion region = resolve_simulation_region(cfg);
  const std::int64_t n = cfg.protocol.num_snapshots;
  const std::int64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  const std::size_t k = cfg.num_tiers();
  const int f = cfg.content.library_size;
  std::vector<Accumulator> partial(static_cast<std::size_t>(blocks), Accumulator(k, f));
  const int workers = cfg.protocol.workers > 0 ? cfg.protocol.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::int64_t end = std::min(n, (b + 1) * kBlockSize);
    for (std::int64_t s = b * kBlockSize; s < end; ++s)
      accumulate_snapshot(partial[b], cfg, w, region, s);
  }

  Accumulator total(k, f);
  for (const Accumulator& a : partial) total.merge(a);
  return finalize(total, cfg, w);
}

MetricReport run_simulation_serial(const ScenarioConfig& cfg) {
  cfg.validate();
  const Weights w = make_weights(cfg);
  const SimulationRegion region = resolve_simulation_region(cfg);
  Accumulator acc(cfg.num_tiers(), cfg.content.library_size);
  for (std::int64_t s = 0; s < cfg.protocol.num_snapshots; ++s)
    accumulate_snapshot(acc, cfg, w, region, s);
  return finalize(acc, cfg, w);
}

}  // namespace hetcache
