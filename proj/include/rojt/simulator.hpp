// Elementary oscillator-based TRNG simulation.
//
// One output bit per sampler edge: the sampler's k-th rising edge arrives
// after a random interval, the sampled oscillator's phase advances over
// that interval, and the bit is 1 when the wrapped phase lands inside the
// high part of the duty cycle. Intervals and increments follow the
// Wiener-phase model exactly:
//
//   interval to the next edge   P ~ InverseGaussian(d/f0, d^2/sigma0^2)
//   phase increment given P     dphi ~ Normal(f1 P, sigma1^2 P)
//
// with d the phase left to rise (1 - phi0 for the first edge, 1 after).
// normal_approx mode replaces the interval law by a moment-matched normal,
// which is the flat-increment approximation the diagnostics module
// quantifies; everything else stays identical, so differences between the
// two modes isolate the approximation error.
//
// Reproducibility contract: a (master seed, sampler index, sampled index)
// combination fully determines every bit on every platform.
// simulate_topology derives one sub-seed per pair as
// derive_subseed(seed, i * n + j), so a pair's stream does not depend on
// where it sits in the request list; listing the same pair twice yields
// two identical streams.

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rojt/oscillator.hpp"
#include "rojt/random.hpp"

namespace rojt {

enum class SimulationMode { exact_ig, normal_approx };

inline const char* to_string(SimulationMode m) {
  return m == SimulationMode::exact_ig ? "exact_ig" : "normal_approx";
}

template <typename Scalar = double>
struct BitStream {
  std::pair<int, int> pair{0, 1};
  std::vector<std::uint8_t> bits;
  std::vector<Scalar> true_phases;  // unwrapped sampled phase, if recorded
  Scalar sampler_period = Scalar(1);
  Scalar sampled_duty = Scalar(0.5);
  SimulationMode mode = SimulationMode::exact_ig;
  std::uint64_t seed = 0;

  std::int64_t n_bits() const { return static_cast<std::int64_t>(bits.size()); }

  double ones_fraction() const {
    if (bits.empty()) return 0.0;
    const auto ones = std::accumulate(bits.begin(), bits.end(),
                                      std::int64_t{0});
    return static_cast<double>(ones) / static_cast<double>(bits.size());
  }
};

template <typename Scalar = double>
struct SimulationConfig {
  std::vector<OscillatorParams<Scalar>> oscillators;
  std::vector<int> delay_elements;  // optional, parallel to oscillators
  std::vector<std::pair<int, int>> pairs;
  std::int64_t n_bits = 0;
  SimulationMode mode = SimulationMode::exact_ig;
  std::uint64_t seed = 0;
  bool record_phases = false;
};

template <typename Scalar>
BitStream<Scalar> simulate_pair(const OscillatorParams<Scalar>& sampler,
                                const OscillatorParams<Scalar>& sampled,
                                std::int64_t n_bits, SimulationMode mode,
                                std::uint64_t seed,
                                bool record_phases = false,
                                std::pair<int, int> pair = {0, 1}) {
  if (n_bits < 1)
    throw std::invalid_argument("simulate_pair: n_bits must be >= 1");

  BitStream<Scalar> out;
  out.pair = pair;
  out.sampler_period = sampler.period();
  out.sampled_duty = sampled.duty_cycle;
  out.mode = mode;
  out.seed = seed;
  out.bits.resize(static_cast<std::size_t>(n_bits));
  if (record_phases)
    out.true_phases.resize(static_cast<std::size_t>(n_bits));

  const double f0 = static_cast<double>(sampler.frequency);
  const double f1 = static_cast<double>(sampled.frequency);
  const double s0 = static_cast<double>(sampler.volatility);
  const double s1 = static_cast<double>(sampled.volatility);
  const double duty = static_cast<double>(sampled.duty_cycle);
  const double phi0 = static_cast<double>(sampler.initial_phase);
  const double phi1 = static_cast<double>(sampled.initial_phase);

  if (s0 == 0.0 && s1 == 0.0) {
    // Jitter-free bits in closed form. The product (k - phi0) * f1 is
    // formed before dividing by f0 so that exactly representable rhythms
    // (integer frequencies, phi0 = 0) yield exact phases; accumulating
    // per-step increments instead drifts by an ulp per step and flips
    // bits whose wrapped phase sits on the duty edge.
    for (std::int64_t k = 1; k <= n_bits; ++k) {
      const double phase =
          phi1 + (static_cast<double>(k) - phi0) * f1 / f0;
      const double frac = phase - std::floor(phase);
      out.bits[static_cast<std::size_t>(k - 1)] = frac < duty ? 1 : 0;
      if (record_phases)
        out.true_phases[static_cast<std::size_t>(k - 1)] =
            static_cast<Scalar>(phase);
    }
    return out;
  }

  RandomStream rng(seed);
  double phase = phi1;
  for (std::int64_t k = 1; k <= n_bits; ++k) {
    const double rise = (k == 1) ? 1.0 - phi0 : 1.0;
    double interval;
    if (s0 == 0.0) {
      interval = rise / f0;
    } else if (mode == SimulationMode::exact_ig) {
      const InverseGaussian<double> law(rise / f0, rise * rise / (s0 * s0));
      interval = law.sample(rng);
    } else {
      const double mean = rise / f0;
      const double sd = std::sqrt(rise * s0 * s0 / (f0 * f0 * f0));
      // the moment-matched normal has no positivity guarantee
      interval = std::max(mean + sd * rng.gaussian(), 0.0);
    }
    double increment = f1 * interval;
    if (s1 > 0.0) increment += s1 * std::sqrt(interval) * rng.gaussian();
    phase += increment;
    const double frac = phase - std::floor(phase);
    out.bits[static_cast<std::size_t>(k - 1)] = frac < duty ? 1 : 0;
    if (record_phases)
      out.true_phases[static_cast<std::size_t>(k - 1)] =
          static_cast<Scalar>(phase);
  }
  return out;
}

template <typename Scalar>
std::vector<BitStream<Scalar>> simulate_topology(
    const SimulationConfig<Scalar>& config) {
  const int n_osc = static_cast<int>(config.oscillators.size());
  if (n_osc < 2)
    throw std::invalid_argument(
        "simulate_topology: need at least two oscillators");
  if (config.pairs.empty())
    throw std::invalid_argument("simulate_topology: no pairs requested");
  if (!config.delay_elements.empty() &&
      static_cast<int>(config.delay_elements.size()) != n_osc)
    throw std::invalid_argument(
        "simulate_topology: delay_elements must match oscillator count");

  std::vector<BitStream<Scalar>> out;
  out.reserve(config.pairs.size());
  for (std::size_t idx = 0; idx < config.pairs.size(); ++idx) {
    const auto [i, j] = config.pairs[idx];
    if (i < 0 || j < 0 || i >= n_osc || j >= n_osc)
      throw std::invalid_argument(
          "simulate_topology: pair index out of range");
    if (i == j)
      throw std::invalid_argument(
          "simulate_topology: an oscillator cannot sample itself");
    const std::uint64_t subseed = derive_subseed(
        config.seed,
        static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n_osc) +
            static_cast<std::uint64_t>(j));
    out.push_back(simulate_pair(config.oscillators[static_cast<std::size_t>(i)],
                                config.oscillators[static_cast<std::size_t>(j)],
                                config.n_bits, config.mode, subseed,
                                config.record_phases, {i, j}));
  }
  return out;
}

}  // namespace rojt
