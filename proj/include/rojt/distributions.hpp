// The three distribution families the phase model is built on.
//
// InverseGaussian(mean mu, shape lambda)
//     first-passage time of a drifted Wiener process; closed-form pdf, cdf
//     and log-MGF, sampled by the Michael-Schucany-Haas transform.
// NormalInverseGaussian(alpha, beta, mu, delta)
//     normal variance-mean mixture with an InverseGaussian mixing law;
//     the density needs K1, computed here in scaled form so that the
//     steepness parameters a realistic oscillator produces (alpha of 1e6
//     and beyond) do not underflow.
// Normal(mean, stddev)
//     the flat-increment reference the diagnostics compare against.
//
// nig_of_pair maps a sampler/sampled oscillator pair (f0, sigma0, f1,
// sigma1) to the law of the sampled phase increment accumulated over one
// sampler cycle:
//     alpha = sqrt(f0^2 / (sigma0^2 sigma1^2) + f1^2 / sigma1^4),
//     beta  = f1 / sigma1^2,   mu = 0,   delta = sigma1 / sigma0,
// so gamma = sqrt(alpha^2 - beta^2) = f0 / (sigma0 sigma1), the increment
// mean is f1/f0 and its variance sigma1^2/f0 + f1^2 sigma0^2 / f0^3.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "rojt/bessel.hpp"
#include "rojt/quadrature.hpp"
#include "rojt/random.hpp"

namespace rojt {

namespace detail {

inline double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// log Phi(z), stable far into the left tail where erfc underflows.
// For z < -8 uses the asymptotic expansion
//   Phi(z) ~ phi(z)/|z| (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8).
inline double log_std_normal_cdf(double z) {
  if (z > -8.0) return std::log(std_normal_cdf(z));
  const double z2 = z * z;
  const double series =
      1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) +
      105.0 / (z2 * z2 * z2 * z2);
  return -0.5 * z2 - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(-z) +
         std::log(series);
}

}  // namespace detail

template <typename Scalar = double>
struct Normal {
  Scalar mean;
  Scalar stddev;

  Normal(Scalar mean_, Scalar stddev_) : mean(mean_), stddev(stddev_) {
    if (!(stddev >= Scalar(0)))
      throw std::invalid_argument("Normal: stddev must be >= 0");
  }

  Scalar variance() const { return stddev * stddev; }

  Scalar pdf(Scalar x) const {
    if (!(stddev > Scalar(0)))
      throw std::domain_error("Normal::pdf: degenerate (stddev == 0)");
    const double s = static_cast<double>(stddev);
    const double u = (static_cast<double>(x) - static_cast<double>(mean)) / s;
    return static_cast<Scalar>(std::exp(-0.5 * u * u) /
                               (s * std::sqrt(2.0 * std::numbers::pi)));
  }

  Scalar cdf(Scalar x) const {
    if (!(stddev > Scalar(0)))
      throw std::domain_error("Normal::cdf: degenerate (stddev == 0)");
    const double u =
        (static_cast<double>(x) - static_cast<double>(mean)) /
        static_cast<double>(stddev);
    return static_cast<Scalar>(detail::std_normal_cdf(u));
  }

  // log E[e^{sX}] = mean s + stddev^2 s^2 / 2, finite for all s
  Scalar log_mgf(Scalar s) const {
    return mean * s + Scalar(0.5) * stddev * stddev * s * s;
  }

  template <typename Stream>
  Scalar sample(Stream& rng) const {
    return mean + stddev * static_cast<Scalar>(rng.gaussian());
  }
};

template <typename Scalar = double>
struct InverseGaussian {
  Scalar mean;   // mu > 0
  Scalar shape;  // lambda > 0

  InverseGaussian(Scalar mean_, Scalar shape_) : mean(mean_), shape(shape_) {
    if (!(mean > Scalar(0)))
      throw std::invalid_argument("InverseGaussian: mean must be > 0");
    if (!(shape > Scalar(0)))
      throw std::invalid_argument("InverseGaussian: shape must be > 0");
  }

  Scalar variance() const { return mean * mean * mean / shape; }

  Scalar log_pdf(Scalar x) const {
    if (!(x > Scalar(0)))
      throw std::domain_error("InverseGaussian::log_pdf: requires x > 0");
    const double xd = static_cast<double>(x);
    const double mu = static_cast<double>(mean);
    const double lam = static_cast<double>(shape);
    const double d = xd - mu;
    return static_cast<Scalar>(
        0.5 * std::log(lam / (2.0 * std::numbers::pi * xd * xd * xd)) -
        lam * d * d / (2.0 * mu * mu * xd));
  }

  Scalar pdf(Scalar x) const {
    return static_cast<Scalar>(std::exp(static_cast<double>(log_pdf(x))));
  }

  // Phi(sqrt(l/x)(x/m - 1)) + e^{2l/m} Phi(-sqrt(l/x)(x/m + 1)); the second
  // term is assembled in log space because e^{2l/m} alone overflows for the
  // concentrated laws this model works with (l/m ~ f/sigma^2).
  Scalar cdf(Scalar x) const {
    if (!(x > Scalar(0))) return Scalar(0);
    const double xd = static_cast<double>(x);
    const double mu = static_cast<double>(mean);
    const double lam = static_cast<double>(shape);
    const double r = std::sqrt(lam / xd);
    const double a = r * (xd / mu - 1.0);
    const double b = r * (xd / mu + 1.0);
    const double log_tail = 2.0 * lam / mu + detail::log_std_normal_cdf(-b);
    return static_cast<Scalar>(detail::std_normal_cdf(a) +
                               std::exp(log_tail));
  }

  Scalar mgf_domain_max() const { return shape / (Scalar(2) * mean * mean); }

  // log E[e^{sX}] = (l/m)(1 - sqrt(1 - 2 m^2 s / l)), for s <= l/(2 m^2)
  Scalar log_mgf(Scalar s) const {
    const double mu = static_cast<double>(mean);
    const double lam = static_cast<double>(shape);
    const double arg = 1.0 - 2.0 * mu * mu * static_cast<double>(s) / lam;
    if (arg < 0.0)
      throw std::domain_error(
          "InverseGaussian::log_mgf: s beyond shape/(2 mean^2)");
    return static_cast<Scalar>(lam / mu * (1.0 - std::sqrt(arg)));
  }

  // Michael, Schucany & Haas (1976): one chi-square root transformed to a
  // candidate, accepted with probability mean/(mean + x), else reflected.
  template <typename Stream>
  Scalar sample(Stream& rng) const {
    const double mu = static_cast<double>(mean);
    const double lam = static_cast<double>(shape);
    const double nu = rng.gaussian();
    const double y = nu * nu;
    const double x = mu + mu * mu * y / (2.0 * lam) -
                     mu / (2.0 * lam) *
                         std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
    const double u = rng.uniform01();
    if (u <= mu / (mu + x)) return static_cast<Scalar>(x);
    return static_cast<Scalar>(mu * mu / x);
  }
};

template <typename Scalar = double>
struct NormalInverseGaussian {
  Scalar alpha;     // tail steepness, > 0
  Scalar beta;      // skew, |beta| < alpha
  Scalar location;  // mu
  Scalar delta;     // scale, > 0

  NormalInverseGaussian(Scalar alpha_, Scalar beta_, Scalar location_,
                        Scalar delta_)
      : alpha(alpha_), beta(beta_), location(location_), delta(delta_) {
    if (!(alpha > Scalar(0)))
      throw std::invalid_argument("NormalInverseGaussian: alpha must be > 0");
    if (!(delta > Scalar(0)))
      throw std::invalid_argument("NormalInverseGaussian: delta must be > 0");
    if (!(std::abs(static_cast<double>(beta)) < static_cast<double>(alpha)))
      throw std::invalid_argument(
          "NormalInverseGaussian: requires |beta| < alpha strictly");
  }

  Scalar gamma() const {
    return static_cast<Scalar>(
        std::sqrt(static_cast<double>(alpha - beta) *
                  static_cast<double>(alpha + beta)));
  }

  Scalar mean() const { return location + delta * beta / gamma(); }

  Scalar variance() const {
    const double g = static_cast<double>(gamma());
    return static_cast<Scalar>(static_cast<double>(delta) *
                               static_cast<double>(alpha) *
                               static_cast<double>(alpha) / (g * g * g));
  }

  Scalar stddev() const {
    return static_cast<Scalar>(std::sqrt(static_cast<double>(variance())));
  }

  // f(x) = alpha delta K1(alpha q(x)) / (pi q(x)) e^{delta gamma + beta (x-mu)},
  // q(x) = sqrt(delta^2 + (x-mu)^2). Evaluated with the scaled K1 so the
  // whole exponent delta gamma + beta (x-mu) - alpha q(x) is combined first;
  // it is exactly 0 at the mean and stays O(1) across the bulk even when
  // alpha q is ~1e6, where K1 alone underflows.
  Scalar log_pdf(Scalar x) const {
    const double a = static_cast<double>(alpha);
    const double b = static_cast<double>(beta);
    const double mu = static_cast<double>(location);
    const double d = static_cast<double>(delta);
    const double dx = static_cast<double>(x) - mu;
    const double q = std::hypot(d, dx);
    const double z = a * q;
    const double g = static_cast<double>(gamma());
    return static_cast<Scalar>(std::log(a * d / std::numbers::pi) +
                               std::log(bessel_k1_scaled(z)) - std::log(q) +
                               d * g + b * dx - z);
  }

  Scalar pdf(Scalar x) const {
    return static_cast<Scalar>(std::exp(static_cast<double>(log_pdf(x))));
  }

  // quadrature from far below the bulk; absolute tolerance 1e-9
  Scalar cdf(Scalar x) const {
    const double xd = static_cast<double>(x);
    const double m = static_cast<double>(mean());
    const double w = std::max(static_cast<double>(stddev()),
                              static_cast<double>(delta) /
                                  static_cast<double>(gamma()));
    const double lo = m - 40.0 * w;
    if (xd <= lo) return Scalar(0);
    const auto res = integrate_adaptive(
        [this](double t) {
          return static_cast<double>(pdf(static_cast<Scalar>(t)));
        },
        lo, xd, 1e-9);
    return static_cast<Scalar>(res.value);
  }

  // log E[e^{sX}] = delta (gamma - sqrt(alpha^2 - (beta+s)^2)) + mu s,
  // for |beta + s| <= alpha
  Scalar log_mgf(Scalar s) const {
    const double a = static_cast<double>(alpha);
    const double bs = static_cast<double>(beta) + static_cast<double>(s);
    if (std::abs(bs) > a)
      throw std::domain_error(
          "NormalInverseGaussian::log_mgf: |beta + s| beyond alpha");
    const double root = std::sqrt((a - bs) * (a + bs));
    return static_cast<Scalar>(static_cast<double>(delta) *
                                   (static_cast<double>(gamma()) - root) +
                               static_cast<double>(location) *
                                   static_cast<double>(s));
  }

  // variance-mean mixture: V ~ IG(delta/gamma, delta^2),
  // X = mu + beta V + sqrt(V) N(0,1)
  template <typename Stream>
  Scalar sample(Stream& rng) const {
    const InverseGaussian<double> mixing(
        static_cast<double>(delta) / static_cast<double>(gamma()),
        static_cast<double>(delta) * static_cast<double>(delta));
    const double v = mixing.sample(rng);
    return static_cast<Scalar>(static_cast<double>(location) +
                               static_cast<double>(beta) * v +
                               std::sqrt(v) * rng.gaussian());
  }
};

// Law of the sampled oscillator's phase increment over one sampler cycle.
// Computed as alpha = hypot(gamma, beta) with gamma = f0/(sigma0 sigma1)
// and beta = f1/sigma1^2, which keeps |beta| < alpha exact in floating
// point as well as algebraically.
template <typename Scalar>
NormalInverseGaussian<Scalar> nig_of_pair(Scalar f0, Scalar sigma0, Scalar f1,
                                          Scalar sigma1) {
  if (!(f0 > Scalar(0)) || !(f1 > Scalar(0)))
    throw std::invalid_argument("nig_of_pair: frequencies must be > 0");
  if (!(sigma0 > Scalar(0)) || !(sigma1 > Scalar(0)))
    throw std::invalid_argument(
        "nig_of_pair: volatilities must be > 0 (the degenerate case has no "
        "NIG form)");
  const double g = static_cast<double>(f0) /
                   (static_cast<double>(sigma0) * static_cast<double>(sigma1));
  const double b = static_cast<double>(f1) /
                   (static_cast<double>(sigma1) * static_cast<double>(sigma1));
  const double a = std::hypot(g, b);
  const double d = static_cast<double>(sigma1) / static_cast<double>(sigma0);
  return NormalInverseGaussian<Scalar>(
      static_cast<Scalar>(a), static_cast<Scalar>(b), Scalar(0),
      static_cast<Scalar>(d));
}

// expression-friendly free forms
template <typename Dist, typename Scalar>
auto pdf(const Dist& dist, Scalar x) { return dist.pdf(x); }
template <typename Dist, typename Scalar>
auto cdf(const Dist& dist, Scalar x) { return dist.cdf(x); }
template <typename Dist, typename Scalar>
auto log_mgf(const Dist& dist, Scalar s) { return dist.log_mgf(s); }
template <typename Dist, typename Stream>
auto sample(const Dist& dist, Stream& rng) { return dist.sample(rng); }

}  // namespace rojt
