#include "hetcache/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hetcache/errors.hpp"

namespace hetcache {

void TierRadioParams::validate() const {
  if (!(tx_power > 0.0) || !std::isfinite(tx_power))
    throw ValidationError("tx_power", "P > 0");
  if (!(pathloss_exp_los > 2.0 && pathloss_exp_los < pathloss_exp_nlos &&
        pathloss_exp_nlos <= 8.0))
    throw ValidationError("pathloss_exp_los",
                          "2 < pathloss_exp_los < pathloss_exp_nlos <= 8 (alpha^N <= 8)");
  if (!(intercept_los > 0.0) || !(intercept_nlos > 0.0))
    throw ValidationError("intercept_los", "intercepts > 0");
  if (!(near_field_dist > 0.0) || !(far_field_dist > 0.0))
    throw ValidationError("near_field_dist", "D0 > 0 and D1 > 0");
  if (nakagami_nlos < 1 || nakagami_los < nakagami_nlos)
    throw ValidationError("nakagami_los", "nakagami_los >= nakagami_nlos >= 1");
  if (!(sir_threshold > 0.0) || !std::isfinite(sir_threshold))
    throw ValidationError("sir_threshold", "beta > 0");
}

double los_probability(double r, double near_field_dist, double far_field_dist) {
  if (!(r >= 0.0)) throw DomainError("los_probability: negative distance");
  if (r <= near_field_dist) return 1.0;
  const double far = std::exp(-r / far_field_dist);
  return near_field_dist / r * (1.0 - far) + far;
}

double path_loss(double r, LinkMode mode, const TierRadioParams& params) {
  return params.intercept(mode) * std::pow(1.0 + r, -params.exponent(mode));
}

double sample_fading(Rng& rng, int nakagami) {
  if (nakagami < 1) throw DomainError("sample_fading: Nakagami parameter must be >= 1");
  std::gamma_distribution<double> gamma(static_cast<double>(nakagami), 1.0 / nakagami);
  return gamma(rng);
}

LinkSample sample_link(Rng& rng, double r, const TierRadioParams& params) {
  const double los = los_probability(r, params);
  LinkSample s;
  if (los < 1.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    s.mode = u(rng) < los ? LinkMode::Los : LinkMode::Nlos;
  }
  s.fading_gain = sample_fading(rng, params.nakagami(s.mode));
  s.pathloss = path_loss(r, s.mode, params);
  return s;
}

}  // namespace hetcache
