#include "hetcache/content.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetcache/errors.hpp"
#include "hetcache/numeric.hpp"

namespace hetcache {

void ContentModel::validate() const {
  if (library_size < 1) throw ValidationError("content.library_size", "F >= 1");
  if (!(popularity_exponent >= 0.0) || !std::isfinite(popularity_exponent))
    throw ValidationError("content.popularity_exponent", "kappa >= 0");
}

std::vector<double> ContentModel::request_probabilities() const {
  validate();
  std::vector<double> a(static_cast<std::size_t>(library_size));
  CompensatedSum norm;
  for (int c = 1; c <= library_size; ++c) {
    a[c - 1] = std::pow(static_cast<double>(c), -popularity_exponent);
    norm.add(a[c - 1]);
  }
  const double z = norm.value();
  for (double& v : a) v /= z;
  return a;
}

double zipf_pmf(int c, const ContentModel& model) {
  model.validate();
  if (c < 1 || c > model.library_size)
    throw DomainError("zipf_pmf: content index " + std::to_string(c) + " outside [1, " +
                      std::to_string(model.library_size) + "]");
  CompensatedSum norm;
  for (int n = 1; n <= model.library_size; ++n)
    norm.add(std::pow(static_cast<double>(n), -model.popularity_exponent));
  return std::pow(static_cast<double>(c), -model.popularity_exponent) / norm.value();
}

void TierCachePolicy::validate(int library_size) const {
  if (cache_size < 0 || cache_size > library_size)
    throw ValidationError("cache_size", "S <= F and S >= 0 (S = " + std::to_string(cache_size) +
                                            ", F = " + std::to_string(library_size) + ")");
  if (!(mpc_fraction >= 0.0 && mpc_fraction <= 1.0))
    throw ValidationError("mpc_fraction", "0 <= phi <= 1");
}

// Window form of the placement law: an RCS window starting at m covers c iff
// m <= c <= m + S - 1, with m uniform on [1, F - S + 1]. For S <= (F + 1) / 2
// this is term-by-term the three-branch closed form
//   phi + (1 - phi) c / (F - S + 1)          c <= S
//   (1 - phi) S / (F - S + 1)                S < c <= F - S + 1
//   (1 - phi) (F - c + 1) / (F - S + 1)      c > F - S + 1
// and it stays a probability for larger caches where the closed form does not.
double cache_probability(int c, const TierCachePolicy& policy, int library_size) {
  policy.validate(library_size);
  if (c < 1 || c > library_size)
    throw DomainError("cache_probability: content index " + std::to_string(c) +
                      " outside [1, " + std::to_string(library_size) + "]");
  const int s = policy.cache_size;
  if (s == 0) return 0.0;
  const int windows = library_size - s + 1;
  const int covering = std::min(c, windows) - std::max(1, c - s + 1) + 1;
  const double mpc = c <= s ? 1.0 : 0.0;
  return policy.mpc_fraction * mpc +
         (1.0 - policy.mpc_fraction) * static_cast<double>(covering) / windows;
}

std::vector<double> cache_probabilities(const TierCachePolicy& policy, int library_size) {
  std::vector<double> q(static_cast<std::size_t>(library_size));
  for (int c = 1; c <= library_size; ++c) q[c - 1] = cache_probability(c, policy, library_size);
  return q;
}

std::vector<int> PlacementRealization::indices() const {
  std::vector<int> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out[k] = first + k;
  return out;
}

PlacementRealization sample_placement(Rng& rng, const TierCachePolicy& policy,
                                      int library_size) {
  policy.validate(library_size);
  PlacementRealization p;
  p.count = policy.cache_size;
  if (policy.cache_size == 0) return p;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < policy.mpc_fraction) {
    p.first = 1;
    p.strategy = PlacementStrategy::MostPopular;
  } else {
    std::uniform_int_distribution<int> start(1, library_size - policy.cache_size + 1);
    p.first = start(rng);
    p.strategy = PlacementStrategy::RandomWindow;
  }
  return p;
}

}  // namespace hetcache
