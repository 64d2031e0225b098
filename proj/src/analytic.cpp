#include "hetcache/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>

#include "hetcache/errors.hpp"
#include "hetcache/numeric.hpp"

namespace hetcache {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// exp(-x) underflows to zero beyond this.
constexpr double kExponentSaturation = 745.0;
constexpr double kMaxRadius = 1e13;

// 1 - (1 + u)^{-m} without cancellation for small u.
double laplace_factor(double u, int m) { return -std::expm1(-m * std::log1p(u)); }

// Upper bound on the inner integrand tail beyond radius r for argument t,
// using 1 - (1 + u/M)^{-M} <= u and p^L(y) <= D0 / y + e^{-y / D1}.
double inner_tail_bound(double r, double t, const TierRadioParams& p) {
  const double an = p.pathloss_exp_nlos;
  const double al = p.pathloss_exp_los;
  const double scale = t * p.tx_power;
  const double nlos = scale * p.intercept_nlos * std::pow(r, 2.0 - an) / (an - 2.0);
  const double los = scale * p.intercept_los * std::pow(r, 1.0 - al) *
                     (p.near_field_dist / (al - 1.0) +
                      p.far_field_dist * std::exp(-r / p.far_field_dist));
  return nlos + los;
}

// Panel end points 0 < d0 < 2 d0 < ... < radius with `kink` inserted, so
// integrand discontinuities fall on panel boundaries.
std::vector<double> panel_edges(double d0, double radius, double kink) {
  std::vector<double> edges;
  edges.push_back(std::min(d0, radius));
  while (edges.back() < radius) edges.push_back(std::min(2.0 * edges.back(), radius));
  if (kink > 0.0 && kink < radius &&
      std::find(edges.begin(), edges.end(), kink) == edges.end()) {
    edges.push_back(kink);
    std::sort(edges.begin(), edges.end());
  }
  return edges;
}

// E(t) on the whole plane, or restricted to the finite region when `region`
// is set (LOS points within los_radius, NLOS points within nlos_radius).
QuadratureResult laplace_exponent(double t, const TierRadioParams& p, double density,
                                  const IntegrationSettings& s, const FiniteRegion* region) {
  if (!(t >= 0.0)) throw DomainError("interference_laplace_exponent: t must be >= 0");
  if (!(density >= 0.0)) throw DomainError("interference_laplace_exponent: density must be >= 0");
  QuadratureResult out;
  if (t == 0.0 || density == 0.0) return out;

  const double prefactor = kTwoPi * density;
  const double d0 = p.near_field_dist;
  const double ml = p.nakagami_los;
  const double mn = p.nakagami_nlos;
  const double los_limit = region ? region->los_radius : kMaxRadius;
  const double nlos_limit = region ? region->nlos_radius : kMaxRadius;
  auto integrand = [&](double y) {
    const double los = los_probability(y, p);
    double f = 0.0;
    if (y <= los_limit)
      f = los * laplace_factor(t * p.tx_power * path_loss(y, LinkMode::Los, p) / ml,
                               p.nakagami_los);
    if (los < 1.0 && y <= nlos_limit) {
      const double gn = laplace_factor(
          t * p.tx_power * path_loss(y, LinkMode::Nlos, p) / mn, p.nakagami_nlos);
      f += (1.0 - los) * gn;
    }
    return y * f;
  };

  // Truncation radius: the region's, explicit, or where the analytic tail
  // bound falls under a small share of abs_tol.
  double radius;
  double tail = 0.0;
  if (region) {
    radius = std::max(los_limit, nlos_limit);
  } else if (s.inner_truncation_radius) {
    radius = *s.inner_truncation_radius;
  } else {
    radius = 4.0 * std::max(d0, p.far_field_dist);
    while (prefactor * inner_tail_bound(radius, t, p) > 0.1 * s.abs_tol && radius < kMaxRadius)
      radius *= 2.0;
    tail = prefactor * inner_tail_bound(radius, t, p);
  }

  const double abs_tol = 0.1 * s.abs_tol / prefactor / 64.0;
  const double rel_tol = 0.1 * s.rel_tol;
  auto panel = [&](double lo, double hi) {
    QuadratureResult r = integrate_adaptive(integrand, lo, hi, rel_tol, abs_tol, s.max_subdivisions);
    if (!r.converged)
      throw NumericalError("interference quadrature did not converge on [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "] m",
                           prefactor * r.error);
    out += r;
  };

  const double kink = region ? std::min(los_limit, nlos_limit) : radius;
  double lo = 0.0;
  for (const double hi : panel_edges(d0, radius, kink)) {
    panel(lo, hi);
    lo = hi;
    if (prefactor * out.value > kExponentSaturation) break;
  }
  out.value *= prefactor;
  out.error = prefactor * out.error + tail;
  out.abs_value *= prefactor;
  return out;
}

struct TermSpec {
  std::size_t tier;
  LinkMode mode;
  int m;
  double coefficient;  // C(M, m) (-1)^{m+1}
};

std::vector<TermSpec> coverage_terms(std::size_t tier, const TierRadioParams& p) {
  std::vector<TermSpec> out;
  for (LinkMode mode : {LinkMode::Los, LinkMode::Nlos}) {
    const int big_m = p.nakagami(mode);
    double binom = 1.0;
    for (int m = 1; m <= big_m; ++m) {
      binom = binom * (big_m - m + 1) / m;
      out.push_back({tier, mode, m, (m % 2 == 1 ? 1.0 : -1.0) * binom});
    }
  }
  return out;
}

// sum_j E_j(t) with the summed inner error estimates in `error`.
double total_exponent(double t, const ScenarioConfig& cfg, const FiniteRegion* region,
                      double& error) {
  double total = 0.0;
  error = 0.0;
  for (std::size_t j = 0; j < cfg.num_tiers(); ++j) {
    const QuadratureResult e = laplace_exponent(t, cfg.tiers[j].radio, cfg.density_per_m2(j),
                                                cfg.integration, region);
    total += e.value;
    error += e.error;
    if (total > kExponentSaturation) break;
  }
  return total;
}

struct TermResult {
  double value = 0.0;
  double error = 0.0;
};

// int_0^inf x p^n(x) exp(-sum_j E_j(t(x))) dx for one (mode, m) term, scaled by
// 2 pi lambda_i and the binomial coefficient.
// `on_panel`, when set, receives each outer panel's end point and integral.
TermResult evaluate_term(const TermSpec& term, const ScenarioConfig& cfg,
                         const FiniteRegion* region = nullptr,
                         const std::function<void(double, double)>& on_panel = {}) {
  const TierRadioParams& radio = cfg.tiers[term.tier].radio;
  const IntegrationSettings& s = cfg.integration;
  const double lambda = cfg.density_per_m2(term.tier);
  if (lambda == 0.0) return {};
  const int big_m = radio.nakagami(term.mode);
  const double v = alzer_coefficient(big_m);
  const double scale = s.alzer_argument == AlzerArgument::AsPrinted ? v * big_m : v;
  const double threshold = cfg.association_threshold(term.tier);
  const double numerator = threshold * term.m * scale / radio.tx_power;
  const double prefactor = kTwoPi * lambda * std::abs(term.coefficient);

  auto integrand = [&](double x) -> QuadratureSample {
    const double p = mode_probability(x, term.mode, radio);
    if (p <= 0.0) return {};
    const double t = numerator / path_loss(x, term.mode, radio);
    double inner_error = 0.0;
    const double e = total_exponent(t, cfg, region, inner_error);
    if (e > kExponentSaturation) return {};
    const double f = x * p * std::exp(-e);
    return {f, f * inner_error};
  };

  const double abs_tol = s.abs_tol / prefactor / 64.0;
  const double rel_tol = 0.5 * s.rel_tol;
  const double d0 = radio.near_field_dist;
  QuadratureResult total;
  auto panel = [&](double a, double b) {
    QuadratureResult r = integrate_adaptive(integrand, a, b, rel_tol, abs_tol, s.max_subdivisions);
    if (!r.converged)
      throw NumericalError("coverage quadrature did not converge on [" + std::to_string(a) +
                               ", " + std::to_string(b) + "] m",
                           prefactor * r.error);
    total += r;
    if (on_panel) on_panel(b, r.value);
    return r;
  };

  if (term.mode == LinkMode::Los) panel(0.0, d0);
  double a = d0;
  double tail = 0.0;
  if (region || s.outer_truncation_radius) {
    const double limit = region ? (term.mode == LinkMode::Los ? region->los_radius
                                                              : region->nlos_radius)
                                : *s.outer_truncation_radius;
    if (limit <= d0) {
      total = {};
      if (term.mode == LinkMode::Los) panel(0.0, limit);
    } else {
      while (a < limit) {
        const double b = std::min(2.0 * a, limit);
        panel(a, b);
        a = b;
      }
    }
  } else {
    const double min_radius = 4.0 * std::max(d0, radio.far_field_dist);
    double previous = std::numeric_limits<double>::infinity();
    for (;;) {
      const double b = 2.0 * a;
      const QuadratureResult r = panel(a, b);
      a = b;
      const bool small = r.abs_value <= std::max(abs_tol, 1e-3 * rel_tol * std::abs(total.value));
      if (a >= min_radius && small && r.abs_value <= previous) {
        // Remaining panels shrink at least geometrically past this point.
        tail = r.abs_value;
        break;
      }
      previous = r.abs_value;
      if (a > kMaxRadius)
        throw NumericalError("coverage integrand did not decay within truncation limit",
                             prefactor * r.abs_value);
    }
  }
  const double signed_prefactor = kTwoPi * lambda * term.coefficient;
  return {signed_prefactor * total.value,
          prefactor * (total.error + total.aux + tail)};
}

CoverageTable assemble(const ScenarioConfig& cfg, const std::vector<TermSpec>& terms,
                       const std::vector<TermResult>& results) {
  const std::size_t k = cfg.num_tiers();
  CoverageTable table;
  table.density.assign(k, 0.0);
  table.error.assign(k, 0.0);
  std::vector<CompensatedSum> sums(k);
  for (std::size_t n = 0; n < terms.size(); ++n) {
    sums[terms[n].tier].add(results[n].value);
    table.error[terms[n].tier] += results[n].error;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double v = sums[i].value();
    if (v < -table.error[i])
      throw NumericalError("alternating coverage sum for tier " + std::to_string(i + 1) +
                               " is negative beyond its error estimate",
                           table.error[i]);
    table.density[i] = std::max(0.0, v);
  }
  const int f = cfg.content.library_size;
  table.weighted.assign(static_cast<std::size_t>(f), std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    const std::vector<double> q = cache_probabilities(cfg.tiers[i].cache, f);
    for (int c = 0; c < f; ++c) table.weighted[c][i] = q[c] * table.density[i];
  }
  table.fingerprint = coverage_fingerprint(cfg);
  return table;
}

std::vector<TermSpec> all_terms(const ScenarioConfig& cfg) {
  std::vector<TermSpec> terms;
  for (std::size_t i = 0; i < cfg.num_tiers(); ++i) {
    if (cfg.density_per_m2(i) == 0.0) continue;
    for (const TermSpec& t : coverage_terms(i, cfg.tiers[i].radio)) terms.push_back(t);
  }
  return terms;
}

class Fnv1a {
 public:
  template <class T>
  void add(const T& v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (unsigned char b : bytes) {
      h_ ^= b;
      h_ *= 0x100000001B3ULL;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

}  // namespace

double alzer_coefficient(int nakagami) {
  if (nakagami < 1) throw DomainError("alzer_coefficient: Nakagami parameter must be >= 1");
  const double m = nakagami;
  return m * std::exp(-std::lgamma(m + 1.0) / m);
}

QuadratureResult interference_laplace_exponent(double t, const TierRadioParams& p,
                                               double density,
                                               const IntegrationSettings& s) {
  return laplace_exponent(t, p, density, s, nullptr);
}

TierCoverage tier_coverage_density(std::size_t tier, const ScenarioConfig& cfg) {
  if (tier >= cfg.num_tiers()) throw DomainError("tier_coverage_density: tier out of range");
  if (cfg.density_per_m2(tier) == 0.0) return {};
  const std::vector<TermSpec> terms = coverage_terms(tier, cfg.tiers[tier].radio);
  CompensatedSum sum;
  TierCoverage out;
  for (const TermSpec& t : terms) {
    const TermResult r = evaluate_term(t, cfg);
    sum.add(r.value);
    out.error += r.error;
  }
  const double v = sum.value();
  if (v < -out.error)
    throw NumericalError("alternating coverage sum is negative beyond its error estimate",
                         out.error);
  out.value = std::max(0.0, v);
  return out;
}

namespace {

CoverageTable compute_table(const ScenarioConfig& cfg, const FiniteRegion* region, bool parallel) {
  cfg.validate();
  if (region && !(region->los_radius > 0.0 && region->nlos_radius > 0.0))
    throw DomainError("compute_coverage_table: region radii must be positive");
  const std::vector<TermSpec> terms = all_terms(cfg);
  std::vector<TermResult> results(terms.size());
  std::vector<std::string> failures(terms.size());
  std::vector<double> failure_error(terms.size(), 0.0);
  const long n = static_cast<long>(terms.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long k = 0; k < n; ++k) {
    try {
      results[k] = evaluate_term(terms[k], cfg, region);
    } catch (const NumericalError& e) {
      failures[k] = e.what();
      failure_error[k] = e.error_estimate();
    }
  }
  for (long k = 0; k < n; ++k)
    if (!failures[k].empty()) throw NumericalError(failures[k], failure_error[k]);
  CoverageTable table = assemble(cfg, terms, results);
  if (region) {
    Fnv1a h;
    h.add(table.fingerprint);
    h.add(region->los_radius);
    h.add(region->nlos_radius);
    table.fingerprint = h.value();
  }
  return table;
}

}  // namespace

CoverageTable compute_coverage_table(const ScenarioConfig& cfg) {
  return compute_table(cfg, nullptr, true);
}

CoverageTable compute_coverage_table(const ScenarioConfig& cfg, const FiniteRegion& region) {
  return compute_table(cfg, &region, true);
}

CoverageTable compute_coverage_table_serial(const ScenarioConfig& cfg) {
  return compute_table(cfg, nullptr, false);
}

CoverageSupport coverage_support(const ScenarioConfig& scenario, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw DomainError("coverage_support: tail_fraction must lie in (0, 1)");
  ScenarioConfig cfg = scenario;
  cfg.integration.outer_truncation_radius.reset();
  cfg.integration.rel_tol = std::max(cfg.integration.rel_tol, 1e-4);
  cfg.validate();
  CoverageSupport out;
  for (std::size_t i = 0; i < cfg.num_tiers(); ++i) {
    if (cfg.density_per_m2(i) == 0.0) continue;
    for (LinkMode mode : {LinkMode::Los, LinkMode::Nlos}) {
      // The first binomial term carries the bulk of the density and is positive.
      const TermSpec term{i, mode, 1, static_cast<double>(cfg.tiers[i].radio.nakagami(mode))};
      std::vector<std::pair<double, double>> panels;
      evaluate_term(term, cfg, nullptr,
                    [&](double b, double v) { panels.emplace_back(b, v); });
      double total = 0.0;
      for (const auto& pv : panels) total += pv.second;
      double remaining = total;
      double radius = panels.empty() ? 0.0 : panels.back().first;
      for (const auto& [end, value] : panels) {
        remaining -= value;
        if (remaining <= tail_fraction * total) {
          radius = end;
          break;
        }
      }
      double& slot = mode == LinkMode::Los ? out.los_radius : out.nlos_radius;
      slot = std::max(slot, radius);
    }
  }
  return out;
}

double coverage_probability(const CoverageTable& table, const ContentModel& content,
                            std::span<const TierCachePolicy> policies) {
  if (static_cast<int>(table.weighted.size()) != content.library_size)
    throw DomainError("coverage_probability: table built for a different library size");
  if (policies.size() != table.density.size())
    throw DomainError("coverage_probability: one cache policy per tier required");
  const std::vector<double> a = content.request_probabilities();
  CompensatedSum sum;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const std::vector<double> q = cache_probabilities(policies[i], content.library_size);
    for (int c = 0; c < content.library_size; ++c) sum.add(a[c] * q[c] * table.density[i]);
  }
  return sum.value();
}

std::uint64_t coverage_fingerprint(const ScenarioConfig& cfg) {
  Fnv1a h;
  h.add(cfg.num_tiers());
  for (std::size_t i = 0; i < cfg.num_tiers(); ++i) {
    const TierRadioParams& r = cfg.tiers[i].radio;
    h.add(cfg.density_per_m2(i));
    h.add(cfg.association_threshold(i));
    h.add(r.tx_power);
    h.add(r.pathloss_exp_los);
    h.add(r.pathloss_exp_nlos);
    h.add(r.intercept_los);
    h.add(r.intercept_nlos);
    h.add(r.near_field_dist);
    h.add(r.far_field_dist);
    h.add(r.nakagami_los);
    h.add(r.nakagami_nlos);
  }
  const IntegrationSettings& s = cfg.integration;
  h.add(s.rel_tol);
  h.add(s.abs_tol);
  h.add(s.outer_truncation_radius.value_or(0.0));
  h.add(s.inner_truncation_radius.value_or(0.0));
  h.add(s.max_subdivisions);
  h.add(static_cast<int>(s.alzer_argument));
  return h.value();
}

}  // namespace hetcache
