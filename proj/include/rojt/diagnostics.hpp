// How far the exact sampled-increment law is from its flat-increment
// normal approximation.
//
// The approximation replaces the per-cycle increment law
// nig_of_pair(f0, sigma0, f1, sigma1) by a normal with the same first two
// moments, mean f1/f0 and variance sigma1^2/f0 + f1^2 sigma0^2/f0^3. The
// gap is quantified as total-variation distance, and discrepancy_sweep
// traces it against the per-cycle jitter level sigma/sqrt(f) (both
// oscillators set to the same level), which is the regime knob: the
// distance falls off linearly as the level goes to zero.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rojt/distributions.hpp"
#include "rojt/quadrature.hpp"

namespace rojt {

template <typename Scalar>
Normal<Scalar> normal_approx_params(Scalar f0, Scalar sigma0, Scalar f1,
                                    Scalar sigma1) {
  if (!(f0 > Scalar(0)) || !(f1 > Scalar(0)))
    throw std::invalid_argument(
        "normal_approx_params: frequencies must be > 0");
  const double f0d = static_cast<double>(f0);
  const double f1d = static_cast<double>(f1);
  const double s0 = static_cast<double>(sigma0);
  const double s1 = static_cast<double>(sigma1);
  const double var = s1 * s1 / f0d + f1d * f1d * s0 * s0 / (f0d * f0d * f0d);
  return Normal<Scalar>(static_cast<Scalar>(f1d / f0d),
                        static_cast<Scalar>(std::sqrt(var)));
}

// (1/2) integral |f_exact - f_approx| over the shared bulk, absolute
// quadrature tolerance 1e-8. Both tails beyond 40 standard deviations
// carry mass far below that tolerance.
template <typename Scalar>
Scalar tv_distance(const NormalInverseGaussian<Scalar>& exact,
                   const Normal<Scalar>& approx) {
  const double m = static_cast<double>(exact.mean());
  const double w = std::max(static_cast<double>(exact.stddev()),
                            static_cast<double>(approx.stddev));
  if (!(w > 0.0))
    throw std::invalid_argument("tv_distance: degenerate comparison");
  const auto res = integrate_adaptive(
      [&](double x) {
        const double fe =
            static_cast<double>(exact.pdf(static_cast<Scalar>(x)));
        const double fa =
            static_cast<double>(approx.pdf(static_cast<Scalar>(x)));
        return std::abs(fe - fa);
      },
      m - 40.0 * w, m + 40.0 * w, 1e-8);
  return static_cast<Scalar>(0.5 * res.value);
}

struct DiscrepancyPoint {
  double jitter_level;  // sigma / sqrt(f), same for both oscillators
  double tv;
};

// TV(exact, approx) as a function of the per-cycle jitter level, with the
// frequency ratio f1/f0 held fixed (f0 = 1).
inline std::vector<DiscrepancyPoint> discrepancy_sweep(
    const std::vector<double>& levels, double f_ratio = 1.0) {
  if (!(f_ratio > 0.0))
    throw std::invalid_argument("discrepancy_sweep: f_ratio must be > 0");
  std::vector<DiscrepancyPoint> out;
  out.reserve(levels.size());
  for (double level : levels) {
    if (!(level > 0.0))
      throw std::invalid_argument(
          "discrepancy_sweep: jitter levels must be > 0");
    const double f0 = 1.0;
    const double f1 = f_ratio;
    const double s0 = level * std::sqrt(f0);
    const double s1 = level * std::sqrt(f1);
    const auto exact = nig_of_pair(f0, s0, f1, s1);
    const auto approx = normal_approx_params(f0, s0, f1, s1);
    out.push_back({level, tv_distance(exact, approx)});
  }
  return out;
}

struct DensityPoint {
  double x;
  double pdf_exact;
  double pdf_approx;
};

// Tabulates both densities across the bulk (mean +- half_width_stds
// standard deviations), for plotting and file export.
template <typename Scalar>
std::vector<DensityPoint> density_comparison(
    const NormalInverseGaussian<Scalar>& exact, const Normal<Scalar>& approx,
    int n_points = 801, double half_width_stds = 8.0) {
  if (n_points < 2)
    throw std::invalid_argument("density_comparison: need at least 2 points");
  const double m = static_cast<double>(exact.mean());
  const double w = std::max(static_cast<double>(exact.stddev()),
                            static_cast<double>(approx.stddev));
  std::vector<DensityPoint> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double x = m + half_width_stds * w *
                             (2.0 * i / (n_points - 1.0) - 1.0);
    out.push_back({x,
                   static_cast<double>(exact.pdf(static_cast<Scalar>(x))),
                   static_cast<double>(approx.pdf(static_cast<Scalar>(x)))});
  }
  return out;
}

}  // namespace rojt
