// Jitter transfer across a sampling pair.
//
// When oscillator 1 is sampled at the edges of oscillator 0, the jitter
// measured on the output mixes both sources. In the normal-approximation
// regime the composition law for phase volatilities (rate form) is
//
//     sigma'^2 = (f1/f0)^2 sigma0^2 + sigma1^2,
//
// and the same principle re-expressed for the other two jitter
// conventions in circulation:
//
//     period jitter (variance of one cycle duration, s^2):
//         sigma'^2 = (f0/f1) sigma0^2 + sigma1^2
//     absolute time jitter (crossing-time volatility, sigma_t = sigma/f):
//         sigma'^2 = sigma0^2 + sigma1^2
//
// All three are the one identity under the substitutions
// sigma_i^2 <-> sigma_i^2 / f_i^3 (period) and sigma_i <-> sigma_i / f_i
// (time); the convention tag travels with the value so results from
// different conventions cannot be mixed silently.
//
// The law is an approximation whose error grows with the sampler's
// per-cycle jitter ratio sigma0^2/f0; results carry that figure and a
// warning flag once it exceeds 1e-2.

#pragma once

#include <stdexcept>
#include <utility>

namespace rojt {

enum class JitterConvention { phase, period, time };

inline const char* to_string(JitterConvention c) {
  switch (c) {
    case JitterConvention::phase: return "phase";
    case JitterConvention::period: return "period";
    case JitterConvention::time: return "time";
  }
  return "?";
}

inline constexpr double transfer_validity_threshold = 1e-2;

template <typename Scalar = double>
struct TransferredJitter {
  Scalar value_sq;  // sigma'^2 in the tagged convention's units
  JitterConvention convention;
  Scalar validity_ratio;  // sampler's sigma0^2 / f0
  bool approximation_warning;
  std::pair<int, int> pair{-1, -1};
};

// rate-form phase volatilities, sigma in 1/sqrt(s)
template <typename Scalar>
TransferredJitter<Scalar> transfer_phase(Scalar f0, Scalar sigma0, Scalar f1,
                                         Scalar sigma1,
                                         std::pair<int, int> pair = {-1, -1}) {
  if (!(f0 > Scalar(0)) || !(f1 > Scalar(0)))
    throw std::invalid_argument("transfer_phase: frequencies must be > 0");
  if (!(sigma0 >= Scalar(0)) || !(sigma1 >= Scalar(0)))
    throw std::invalid_argument("transfer_phase: volatilities must be >= 0");
  const Scalar r = f1 / f0;
  const Scalar value = r * r * sigma0 * sigma0 + sigma1 * sigma1;
  const Scalar q = sigma0 * sigma0 / f0;
  return {value, JitterConvention::phase, q,
          q > Scalar(transfer_validity_threshold), pair};
}

// per-cycle period variances, var_i = Var[one cycle of oscillator i], s^2
template <typename Scalar>
TransferredJitter<Scalar> transfer_period(Scalar f0, Scalar var0, Scalar f1,
                                          Scalar var1,
                                          std::pair<int, int> pair = {-1,
                                                                      -1}) {
  if (!(f0 > Scalar(0)) || !(f1 > Scalar(0)))
    throw std::invalid_argument("transfer_period: frequencies must be > 0");
  if (!(var0 >= Scalar(0)) || !(var1 >= Scalar(0)))
    throw std::invalid_argument("transfer_period: variances must be >= 0");
  const Scalar value = (f0 / f1) * var0 + var1;
  // var0 = sigma0^2 / f0^3, so the sampler quality is var0 * f0^2
  const Scalar q = var0 * f0 * f0;
  return {value, JitterConvention::period, q,
          q > Scalar(transfer_validity_threshold), pair};
}

// absolute time-jitter volatilities squared, sigma_t^2 = sigma^2 / f^2
template <typename Scalar>
TransferredJitter<Scalar> transfer_time(Scalar f0, Scalar t0_sq, Scalar f1,
                                        Scalar t1_sq,
                                        std::pair<int, int> pair = {-1, -1}) {
  if (!(f0 > Scalar(0)) || !(f1 > Scalar(0)))
    throw std::invalid_argument("transfer_time: frequencies must be > 0");
  if (!(t0_sq >= Scalar(0)) || !(t1_sq >= Scalar(0)))
    throw std::invalid_argument("transfer_time: variances must be >= 0");
  const Scalar value = t0_sq + t1_sq;
  const Scalar q = t0_sq * f0;
  return {value, JitterConvention::time, q,
          q > Scalar(transfer_validity_threshold), pair};
}

// convention conversions for squared jitter figures
template <typename Scalar>
Scalar phase_sq_to_period_sq(Scalar sigma_sq, Scalar f) {
  return sigma_sq / (f * f * f);
}
template <typename Scalar>
Scalar period_sq_to_phase_sq(Scalar var, Scalar f) {
  return var * f * f * f;
}
template <typename Scalar>
Scalar phase_sq_to_time_sq(Scalar sigma_sq, Scalar f) {
  return sigma_sq / (f * f);
}
template <typename Scalar>
Scalar time_sq_to_phase_sq(Scalar t_sq, Scalar f) {
  return t_sq * f * f;
}

}  // namespace rojt
