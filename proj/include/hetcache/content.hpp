#pragma once

#include <vector>

#include "hetcache/rng.hpp"

namespace hetcache {

/// Library of F equal-size files ranked by popularity, requested with Zipf
/// probabilities a_c = c^-kappa / sum_n n^-kappa. Indices are 1-based.
struct ContentModel {
  int library_size = 100;
  double popularity_exponent = 1.0;

  void validate() const;
  /// a_1..a_F stored at positions 0..F-1.
  std::vector<double> request_probabilities() const;

  friend bool operator==(const ContentModel&, const ContentModel&) = default;
};

double zipf_pmf(int c, const ContentModel& model);

/// S cache slots per BS; each BS independently stores the S most popular
/// files with probability mpc_fraction, otherwise a uniformly placed window
/// of S consecutive files.
struct TierCachePolicy {
  int cache_size = 0;
  double mpc_fraction = 1.0;

  void validate(int library_size) const;

  friend bool operator==(const TierCachePolicy&, const TierCachePolicy&) = default;
};

/// Probability that file c is cached at a BS following `policy`.
double cache_probability(int c, const TierCachePolicy& policy, int library_size);

/// q[1..F] stored at positions 0..F-1.
std::vector<double> cache_probabilities(const TierCachePolicy& policy, int library_size);

enum class PlacementStrategy { MostPopular, RandomWindow };

/// Files cached at one BS: the contiguous range [first, first + count).
struct PlacementRealization {
  int first = 1;
  int count = 0;
  PlacementStrategy strategy = PlacementStrategy::MostPopular;

  bool contains(int c) const noexcept { return c >= first && c < first + count; }
  std::vector<int> indices() const;
};

PlacementRealization sample_placement(Rng& rng, const TierCachePolicy& policy,
                                      int library_size);

}  // namespace hetcache
