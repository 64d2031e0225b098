#pragma once

#include "hetcache/rng.hpp"

namespace hetcache {

enum class LinkMode { Los, Nlos };

/// Per-tier propagation constants. Distances in meters, power in watts.
struct TierRadioParams {
  double tx_power = 1.0;
  double pathloss_exp_los = 2.4;
  double pathloss_exp_nlos = 4.0;
  double intercept_los = 1.0;
  double intercept_nlos = 1.0;
  double near_field_dist = 80.0;
  double far_field_dist = 164.0;
  int nakagami_los = 2;
  int nakagami_nlos = 1;
  double sir_threshold = 1.0;

  void validate() const;

  double exponent(LinkMode m) const noexcept {
    return m == LinkMode::Los ? pathloss_exp_los : pathloss_exp_nlos;
  }
  double intercept(LinkMode m) const noexcept {
    return m == LinkMode::Los ? intercept_los : intercept_nlos;
  }
  int nakagami(LinkMode m) const noexcept {
    return m == LinkMode::Los ? nakagami_los : nakagami_nlos;
  }

  friend bool operator==(const TierRadioParams&, const TierRadioParams&) = default;
};

/// ITU-R UMi LOS probability: min(D0/r, 1)(1 - e^{-r/D1}) + e^{-r/D1}.
double los_probability(double r, double near_field_dist, double far_field_dist);

inline double los_probability(double r, const TierRadioParams& p) {
  return los_probability(r, p.near_field_dist, p.far_field_dist);
}

/// Probability of mode `m` at distance r.
inline double mode_probability(double r, LinkMode m, const TierRadioParams& p) {
  const double los = los_probability(r, p);
  return m == LinkMode::Los ? los : 1.0 - los;
}

/// Bounded 3GPP path loss intercept / (1 + r)^alpha; finite at r = 0.
double path_loss(double r, LinkMode mode, const TierRadioParams& params);

/// Normalized Nakagami power gain, Gamma(shape M, scale 1/M).
double sample_fading(Rng& rng, int nakagami);

struct LinkSample {
  LinkMode mode = LinkMode::Los;
  double fading_gain = 1.0;
  double pathloss = 0.0;
};

LinkSample sample_link(Rng& rng, double r, const TierRadioParams& params);

}  // namespace hetcache
