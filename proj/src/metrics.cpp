#include "hetcache/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hetcache/errors.hpp"
#include "hetcache/numeric.hpp"

namespace hetcache {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DomainError(std::string(what) + ": per-tier inputs differ in length");
}

}  // namespace

std::string to_string(Provenance p) {
  return p == Provenance::Analytic ? "analytic" : "monte_carlo";
}

HitBackhaul hit_and_backhaul(std::span<const double> tier_coverage,
                             std::span<const TierCachePolicy> policies,
                             const ContentModel& content) {
  require_same_size(tier_coverage.size(), policies.size(), "hit_and_backhaul");
  if (policies.empty()) return {};
  const int f = content.library_size;
  const std::vector<double> a = content.request_probabilities();
  CompensatedSum hit;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const std::vector<double> q = cache_probabilities(policies[i], f);
    for (int c = 0; c < f; ++c) hit.add(a[c] * q[c] * tier_coverage[i]);
  }
  const std::vector<double> bh = backhaul_per_content(tier_coverage[0], policies[0], f);
  CompensatedSum backhaul;
  for (int c = 0; c < f; ++c) backhaul.add(a[c] * bh[c]);
  return {hit.value(), backhaul.value()};
}

std::vector<double> backhaul_per_content(double macro_coverage, const TierCachePolicy& macro,
                                         int library_size) {
  std::vector<double> q = cache_probabilities(macro, library_size);
  for (double& v : q) v = (1.0 - v) * macro_coverage;
  return q;
}

double area_spectral_efficiency(std::span<const double> tier_coverage,
                                std::span<const TierCachePolicy> policies,
                                std::span<const double> densities, const ContentModel& content,
                                std::span<const double> rates) {
  require_same_size(tier_coverage.size(), policies.size(), "area_spectral_efficiency");
  require_same_size(tier_coverage.size(), densities.size(), "area_spectral_efficiency");
  require_same_size(tier_coverage.size(), rates.size(), "area_spectral_efficiency");
  if (policies.empty()) return 0.0;
  for (double r : rates)
    if (!(r >= 0.0)) throw DomainError("area_spectral_efficiency: rates must be >= 0");
  const int f = content.library_size;
  const std::vector<double> a = content.request_probabilities();
  CompensatedSum sum;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const std::vector<double> q = cache_probabilities(policies[i], f);
    const double scale = tier_coverage[i] * densities[i] * rates[i];
    for (int c = 0; c < f; ++c) sum.add(a[c] * q[c] * scale);
  }
  const std::vector<double> bh = backhaul_per_content(tier_coverage[0], policies[0], f);
  for (int c = 0; c < f; ++c) sum.add(a[c] * bh[c] * densities[0] * rates[0]);
  return sum.value();
}

double cost_per_area(std::span<const double> backhaul, const ContentModel& content,
                     std::span<const int> cache_sizes, std::span<const double> densities,
                     const CostModel& costs) {
  require_same_size(cache_sizes.size(), densities.size(), "cost_per_area");
  if (static_cast<int>(backhaul.size()) != content.library_size)
    throw DomainError("cost_per_area: one backhaul probability per content required");
  if (densities.empty()) return 0.0;
  const std::vector<double> a = content.request_probabilities();
  CompensatedSum usage;
  for (int c = 0; c < content.library_size; ++c) usage.add(a[c] * backhaul[c]);
  const double backhaul_cost = densities[0] * (content.library_size - cache_sizes[0]) *
                               costs.backhaul_unit_cost * usage.value();
  CompensatedSum storage;
  for (std::size_t i = 0; i < densities.size(); ++i) storage.add(densities[i] * cache_sizes[i]);
  return backhaul_cost + costs.cache_unit_cost * storage.value();
}

double caching_efficiency(double ase, double cost) {
  if (!(cost > 0.0))
    throw UndefinedEfficiencyError("caching_efficiency: cost per area is zero (empty network)");
  return ase / cost;
}

ScenarioConfig apply_range_expansion(const ScenarioConfig& cfg, std::span<const double> rho) {
  if (rho.size() != cfg.num_tiers())
    throw DomainError("apply_range_expansion: one factor per tier required");
  ScenarioConfig out = cfg;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0 && rho[i] <= 1.0))
      throw DomainError("apply_range_expansion: rho must lie in (0, 1]");
    out.tiers[i].range_expansion = rho[i];
  }
  return out;
}

std::vector<TierCachePolicy> cache_policies(const ScenarioConfig& cfg) {
  std::vector<TierCachePolicy> out;
  for (const TierParams& t : cfg.tiers) out.push_back(t.cache);
  return out;
}

std::vector<double> densities_per_m2(const ScenarioConfig& cfg) {
  std::vector<double> out;
  for (std::size_t i = 0; i < cfg.num_tiers(); ++i) out.push_back(cfg.density_per_m2(i));
  return out;
}

std::vector<double> tier_rates(const ScenarioConfig& cfg) {
  std::vector<double> out;
  for (std::size_t i = 0; i < cfg.num_tiers(); ++i) out.push_back(cfg.rate(i));
  return out;
}

MetricReport analytic_report(const ScenarioConfig& cfg) {
  return analytic_report(cfg, compute_coverage_table(cfg));
}

MetricReport analytic_report(const ScenarioConfig& cfg, const CoverageTable& table) {
  cfg.validate();
  if (table.fingerprint != coverage_fingerprint(cfg))
    throw DomainError("analytic_report: coverage table was computed for a different scenario");
  const std::vector<TierCachePolicy> policies = cache_policies(cfg);
  const std::vector<double> lambda = densities_per_m2(cfg);
  const std::vector<double> rates = tier_rates(cfg);
  std::vector<int> sizes;
  for (const auto& p : policies) sizes.push_back(p.cache_size);
  const int f = cfg.content.library_size;
  const std::vector<double>& rho = table.density;
  const std::vector<double>& err = table.error;

  MetricReport r;
  r.provenance = Provenance::Analytic;
  r.per_tier_coverage = rho;
  const HitBackhaul hb = hit_and_backhaul(rho, policies, cfg.content);
  r.p_hit = hb.p_hit;
  r.p_bh = hb.p_bh;
  r.p_bh_operational = hb.p_bh;
  r.coverage_bound = coverage_probability(table, cfg.content, policies);
  r.coverage = std::clamp(r.coverage_bound, 0.0, 1.0);
  r.coverage_clamped = r.coverage != r.coverage_bound;
  double any = 0.0;
  for (double v : rho) any += v;
  r.coverage_any = std::min(any, 1.0);
  r.ase = area_spectral_efficiency(rho, policies, lambda, cfg.content, rates);
  r.p_bh_per_content = backhaul_per_content(rho[0], policies[0], f);
  r.cost = cost_per_area(r.p_bh_per_content, cfg.content, sizes, lambda, cfg.costs);
  r.p_hit_per_content.assign(static_cast<std::size_t>(f), 0.0);
  for (int c = 0; c < f; ++c)
    for (double w : table.weighted[c]) r.p_hit_per_content[c] += w;
  if (r.cost > 0.0) {
    r.efficiency = caching_efficiency(r.ase, r.cost);
  } else {
    r.efficiency_defined = false;
  }

  // Every metric is linear in rho, so error estimates propagate through the
  // same formulas with |coefficients|.
  MetricUncertainty& u = r.uncertainty;
  u.per_tier_coverage = err;
  const HitBackhaul hb_err = hit_and_backhaul(err, policies, cfg.content);
  u.p_hit = hb_err.p_hit;
  u.coverage = hb_err.p_hit;
  u.p_bh = hb_err.p_bh;
  u.p_bh_operational = hb_err.p_bh;
  for (double e : err) u.coverage_any += e;
  u.ase = area_spectral_efficiency(err, policies, lambda, cfg.content, rates);
  u.cost = cost_per_area(backhaul_per_content(err[0], policies[0], f), cfg.content, sizes,
                         lambda, CostModel{cfg.costs.backhaul_unit_cost, 0.0});
  if (r.efficiency_defined && r.cost > 0.0) {
    const double rel_ase = r.ase > 0.0 ? u.ase / r.ase : 0.0;
    u.efficiency = r.efficiency * (rel_ase + u.cost / r.cost) + (r.ase > 0.0 ? 0.0 : u.ase / r.cost);
  }
  return r;
}

}  // namespace hetcache
