// Wiener-phase model of a jittered ring oscillator.
//
// An oscillator is the square wave w(phi0 + f t + xi_t) with w 1-periodic,
// duty cycle alpha, and xi a driftless Wiener process of volatility sigma
// (units 1/sqrt(s); phase measured in cycles). Everything downstream rests
// on two closed-form consequences:
//
//   - the k-th rising edge happens at a time distributed
//     InverseGaussian((k - phi0)/f, (k - phi0)^2 / sigma^2), so one full
//     cycle lasts InverseGaussian(1/f, 1/sigma^2);
//   - when oscillator 1 is read at oscillator 0's k-th edge, the sampled
//     phase has mean phi1 + (k - phi0) f1/f0 and variance
//     (f1^2/f0^3)(k - phi0) sigma0^2 + (k - phi0) sigma1^2 / f0.
//
// Volatilities travel in two forms: the model rate sigma, and the
// accumulated form sigma(T) = sigma sqrt(T) that a measurement over a
// reference period T reports. AccumulatedVolatility keeps the pair
// together so the reference is never implicit.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "rojt/distributions.hpp"

namespace rojt {

template <typename Scalar = double>
struct OscillatorParams {
  Scalar initial_phase;  // phi0 in [0, 1)
  Scalar frequency;      // f > 0, Hz
  Scalar volatility;     // sigma >= 0, 1/sqrt(s)
  Scalar duty_cycle;     // alpha in (0, 1)

  OscillatorParams(Scalar initial_phase_, Scalar frequency_,
                   Scalar volatility_, Scalar duty_cycle_)
      : initial_phase(initial_phase_),
        frequency(frequency_),
        volatility(volatility_),
        duty_cycle(duty_cycle_) {
    if (!(initial_phase >= Scalar(0) && initial_phase < Scalar(1)))
      throw std::invalid_argument(
          "OscillatorParams: initial_phase must lie in [0, 1)");
    if (!(frequency > Scalar(0)))
      throw std::invalid_argument("OscillatorParams: frequency must be > 0");
    if (!(volatility >= Scalar(0)))
      throw std::invalid_argument("OscillatorParams: volatility must be >= 0");
    if (!(duty_cycle > Scalar(0) && duty_cycle < Scalar(1)))
      throw std::invalid_argument(
          "OscillatorParams: duty_cycle must lie in (0, 1)");
  }

  Scalar period() const { return Scalar(1) / frequency; }
};

// Law of one edge time. A zero-volatility oscillator has no stochastic
// law; that case is carried explicitly (law empty, deterministic_time set)
// instead of being faked with a tiny epsilon.
template <typename Scalar = double>
struct EdgeTimeLaw {
  std::optional<InverseGaussian<Scalar>> law;
  Scalar deterministic_time;

  bool degenerate() const { return !law.has_value(); }
};

// Time of the k-th rising edge (the k-th upward integer crossing of the
// phase), k >= 1: InverseGaussian((k - phi0)/f, (k - phi0)^2 / sigma^2).
template <typename Scalar>
EdgeTimeLaw<Scalar> edge_time_law(const OscillatorParams<Scalar>& osc,
                                  long k) {
  if (k < 1)
    throw std::invalid_argument("edge_time_law: requires k >= 1");
  const Scalar rise = static_cast<Scalar>(k) - osc.initial_phase;
  const Scalar t = rise / osc.frequency;
  if (osc.volatility == Scalar(0)) return {std::nullopt, t};
  return {InverseGaussian<Scalar>(
              t, rise * rise / (osc.volatility * osc.volatility)),
          t};
}

// Duration of one full cycle: InverseGaussian(1/f, 1/sigma^2)
template <typename Scalar>
EdgeTimeLaw<Scalar> period_law(const OscillatorParams<Scalar>& osc) {
  const Scalar t = Scalar(1) / osc.frequency;
  if (osc.volatility == Scalar(0)) return {std::nullopt, t};
  return {InverseGaussian<Scalar>(
              t, Scalar(1) / (osc.volatility * osc.volatility)),
          t};
}

// Mean and variance of the sampled oscillator's phase at the sampler's
// k-th edge. Exact for all volatilities, including zero.
template <typename Scalar>
std::pair<Scalar, Scalar> sampled_phase_moments(
    const OscillatorParams<Scalar>& sampler,
    const OscillatorParams<Scalar>& sampled, long k) {
  if (k < 1)
    throw std::invalid_argument("sampled_phase_moments: requires k >= 1");
  const Scalar rise = static_cast<Scalar>(k) - sampler.initial_phase;
  const Scalar f0 = sampler.frequency;
  const Scalar f1 = sampled.frequency;
  const Scalar mean = sampled.initial_phase + rise * f1 / f0;
  const Scalar var =
      (f1 * f1 / (f0 * f0 * f0)) * rise * sampler.volatility *
          sampler.volatility +
      rise * sampled.volatility * sampled.volatility / f0;
  return {mean, var};
}

// Var[T] / E[T]^2 of a positive law; for one oscillator cycle this equals
// sigma^2 / f, the per-cycle quality figure.
template <typename Scalar>
Scalar jitter_ratio(Scalar mean, Scalar variance) {
  if (!(mean > Scalar(0)))
    throw std::invalid_argument("jitter_ratio: requires mean > 0");
  return variance / (mean * mean);
}

template <typename Scalar = double>
struct AccumulatedVolatility {
  Scalar value;             // sigma(T) = sigma sqrt(T)
  Scalar reference_period;  // T, seconds
};

template <typename Scalar>
AccumulatedVolatility<Scalar> accumulate(Scalar sigma, Scalar reference_period) {
  if (!(reference_period > Scalar(0)))
    throw std::invalid_argument("accumulate: reference period must be > 0");
  if (!(sigma >= Scalar(0)))
    throw std::invalid_argument("accumulate: volatility must be >= 0");
  return {sigma * static_cast<Scalar>(
                      std::sqrt(static_cast<double>(reference_period))),
          reference_period};
}

template <typename Scalar>
Scalar de_accumulate(const AccumulatedVolatility<Scalar>& acc) {
  if (!(acc.reference_period > Scalar(0)))
    throw std::invalid_argument("de_accumulate: reference period must be > 0");
  return acc.value / static_cast<Scalar>(
                         std::sqrt(static_cast<double>(acc.reference_period)));
}

// Re-expresses an accumulated volatility over a different reference period
template <typename Scalar>
AccumulatedVolatility<Scalar> reaccumulate(
    const AccumulatedVolatility<Scalar>& acc, Scalar new_reference) {
  return accumulate(de_accumulate(acc), new_reference);
}

}  // namespace rojt
