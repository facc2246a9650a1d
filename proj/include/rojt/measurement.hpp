// Differential jitter measurement from a sampled bit stream.
//
// The stream carries two things worth estimating: the frequency ratio
// r = f_sampled / f_sampler (the per-edge phase drift) and the total
// accumulated jitter sigma'(T_sampler) of the pair. The route:
//
//   estimate_ratio        FFT periodogram of the demeaned bits; the
//                         strongest line sits at min(frac(r), 1-frac(r)).
//                         With a 50% duty cycle the spectrum genuinely
//                         cannot tell frac(r) from 1 - frac(r), nor see
//                         the integer part; relative delay-element counts
//                         resolve both when available.
//   estimate_total_jitter exact maximum likelihood. The bits form a
//                         hidden Markov chain: the sampled phase walks
//                         with drift r and per-edge variance v, and
//                         each bit thresholds its fractional part. A
//                         wrapped forward filter on a circular grid
//                         evaluates the chain's likelihood exactly (up
//                         to grid resolution), marginalizing the
//                         unobserved walk step by step, and golden
//                         sections maximize it over v and r.
//   estimate_from_phases  ground-truth route over recorded phases, used
//                         to validate the bit-only path.
//
// Estimates are reported as AccumulatedVolatility over the sampler
// period, which is the reference a differential measurement naturally
// has; nothing here assumes knowledge of the underlying volatilities.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "rojt/oscillator.hpp"
#include "rojt/simulator.hpp"

namespace rojt {

class estimation_error : public std::runtime_error {
 public:
  explicit estimation_error(const std::string& what)
      : std::runtime_error(what) {}
};

namespace detail {

// P(lo < Z < hi) for standard normal Z, stable in both tails
inline double normal_interval_prob(double lo, double hi) {
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  if (lo + hi > 0.0)
    return 0.5 * (std::erfc(lo * inv_sqrt2) - std::erfc(hi * inv_sqrt2));
  return 0.5 * (std::erfc(-hi * inv_sqrt2) - std::erfc(-lo * inv_sqrt2));
}

template <typename F>
double golden_max(F&& f, double lo, double hi, int iters) {
  constexpr double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

}  // namespace detail

// P(frac(X) < a) for X ~ Normal(m, v). Three regimes:
//   v < 0.6   sum over the integer translates [j, j+a) within 8 standard
//             deviations of the mean (truncation below 1e-14);
//   v < 2     Fourier series of the wrapped density, 4 terms;
//   v >= 2    uniform: the largest Fourier term is already < 7e-18.
inline double wrapped_interval_prob(double m, double v, double a) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument(
        "wrapped_interval_prob: interval width must lie in (0, 1)");
  if (!(v >= 0.0))
    throw std::invalid_argument("wrapped_interval_prob: variance must be >= 0");
  const double mf = m - std::floor(m);
  if (v == 0.0) return mf < a ? 1.0 : 0.0;
  if (v >= 2.0) return a;
  if (v >= 0.6) {
    constexpr double pi = std::numbers::pi;
    double p = a;
    for (int j = 1; j <= 4; ++j) {
      const double damp = std::exp(-2.0 * pi * pi * j * j * v) / (pi * j);
      p += damp * (std::sin(2.0 * pi * j * (a - mf)) +
                   std::sin(2.0 * pi * j * mf));
    }
    return std::clamp(p, 0.0, 1.0);
  }
  const double sd = std::sqrt(v);
  const long jlo = static_cast<long>(std::floor(mf - 8.0 * sd - a));
  const long jhi = static_cast<long>(std::ceil(mf + 8.0 * sd));
  double p = 0.0;
  for (long j = jlo; j <= jhi; ++j) {
    p += detail::normal_interval_prob((static_cast<double>(j) - mf) / sd,
                                      (static_cast<double>(j) + a - mf) / sd);
  }
  return std::clamp(p, 0.0, 1.0);
}

enum class MeasurementMethod { bit_mle, phase_oracle };

inline const char* to_string(MeasurementMethod m) {
  return m == MeasurementMethod::bit_mle ? "bit_mle" : "phase_oracle";
}

template <typename Scalar = double>
struct MeasurementRecord {
  std::pair<int, int> pair{0, 1};
  Scalar ratio = Scalar(0);  // f_sampled / f_sampler
  AccumulatedVolatility<Scalar> total_jitter{Scalar(0), Scalar(1)};
  std::int64_t n_bits = 0;
  MeasurementMethod method = MeasurementMethod::bit_mle;
  std::vector<std::string> flags;
};

template <typename Scalar = double>
struct RatioEstimate {
  Scalar ratio;           // folded into (0, 1/2] unless integer_resolved
  bool integer_resolved;  // delay counts fixed the integer part and branch
  Scalar peak_to_median;  // spectral significance of the line
};

namespace detail {

inline double periodogram_power(const std::vector<double>& x, double nu) {
  const std::complex<double> w =
      std::polar(1.0, -2.0 * std::numbers::pi * nu);
  std::complex<double> phase(1.0, 0.0);
  std::complex<double> acc(0.0, 0.0);
  for (const double xk : x) {
    acc += xk * phase;
    phase *= w;
  }
  return std::norm(acc);
}

}  // namespace detail

// Spectral frequency-ratio estimate. Demeaned bits are transformed, the
// strongest bin away from DC is refined by a golden-section pass on the
// continuous periodogram across its main lobe, and the result is the
// line position nu in (0, 1/2]. Given the pair's
// relative delay-element counts (d_sampler, d_sampled), the candidate
// m + nu or m + 1 - nu closest to d_sampler/d_sampled resolves the
// integer part and the complement branch. Throws estimation_error when
// no significant line exists (peak below 50x the median bin power).
template <typename Scalar>
RatioEstimate<Scalar> estimate_ratio(
    const BitStream<Scalar>& stream,
    std::optional<std::pair<int, int>> delay_elements = std::nullopt) {
  const std::int64_t n = stream.n_bits();
  if (n < 128)
    throw estimation_error("estimate_ratio: need at least 128 bits, got " +
                           std::to_string(n));

  std::vector<double> x(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (std::int64_t k = 0; k < n; ++k)
    mean += stream.bits[static_cast<std::size_t>(k)];
  mean /= static_cast<double>(n);
  for (std::int64_t k = 0; k < n; ++k)
    x[static_cast<std::size_t>(k)] =
        static_cast<double>(stream.bits[static_cast<std::size_t>(k)]) - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, x);

  const std::int64_t half = n / 2;
  std::vector<double> power(static_cast<std::size_t>(half));
  for (std::int64_t m = 1; m <= half; ++m)
    power[static_cast<std::size_t>(m - 1)] =
        std::norm(spectrum[static_cast<std::size_t>(m)]);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < power.size(); ++i)
    if (power[i] > power[peak]) peak = i;

  std::vector<double> sorted = power;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double significance =
      median > 0.0 ? power[peak] / median
                   : (power[peak] > 0.0
                          ? std::numeric_limits<double>::infinity()
                          : 0.0);
  if (significance < 50.0)
    throw estimation_error(
        "estimate_ratio: no significant spectral line (peak/median = " +
        std::to_string(significance) + ")");

  // the main lobe spans the two bins around the peak; refine inside it
  const std::int64_t m_peak = static_cast<std::int64_t>(peak) + 1;
  const double lo = std::max(static_cast<double>(m_peak - 1), 0.5) /
                    static_cast<double>(n);
  const double hi = std::min(static_cast<double>(m_peak + 1),
                             static_cast<double>(half)) /
                    static_cast<double>(n);
  double nu = detail::golden_max(
      [&x](double f) { return detail::periodogram_power(x, f); }, lo, hi, 30);
  if (nu > 0.5) nu = 1.0 - nu;

  RatioEstimate<Scalar> est{static_cast<Scalar>(nu), false,
                            static_cast<Scalar>(significance)};
  if (delay_elements) {
    const auto [di, dj] = *delay_elements;
    if (di <= 0 || dj <= 0)
      throw std::invalid_argument(
          "estimate_ratio: delay-element counts must be positive");
    // frequency scales as 1/delay, so r = f_j/f_i is near d_i/d_j
    const double target = static_cast<double>(di) / static_cast<double>(dj);
    double best = nu;
    double best_err = std::abs(nu - target);
    const int m_max = static_cast<int>(std::ceil(target)) + 2;
    for (int m = 0; m <= m_max; ++m) {
      for (const double cand :
           {static_cast<double>(m) + nu, static_cast<double>(m) + 1.0 - nu}) {
        if (cand <= 0.0) continue;
        const double err = std::abs(cand - target);
        if (err < best_err) {
          best_err = err;
          best = cand;
        }
      }
    }
    est.ratio = static_cast<Scalar>(best);
    est.integer_resolved = true;
  }
  return est;
}

struct JitterFitOptions {
  double s_min = 1e-6;  // search bounds for sigma'(T_sampler)
  double s_max = 1.0;
  bool refine_ratio = true;  // sharpen the drift against the likelihood
  // Bits used by the coarse branch/level/drift stages. The full stream
  // enters only the final sweeps, so the early stages cost the same no
  // matter how long the stream is.
  std::int64_t prefix_window = 131072;
  // Circular grid resolution of the forward filter; 0 picks it from the
  // jitter level under test (about 0.8 / s bins, clamped to [64, 512]).
  int phase_bins = 0;
};

namespace detail {

// Forward filter for a wrapped Gaussian random walk observed through a
// one-periodic threshold. The sampled phase at bit j is modelled as
//
//   x_j = x_0 + r j + w_j,   w_j a Gaussian walk with step variance v,
//
// and bit j reads 1 exactly when frac(x_j) < duty. Only the fractional
// part matters, so the filter tracks the detrended wrapped state
// y_j = frac(x_j - r j) on a K-bin circular grid:
//
//   * predict: the N(0, v) step kernel is applied as m passes of the
//     3-tap stencil [q, 1-2q, q] with q = v / (2 m dx^2); each pass
//     adds variance 2 q dx^2, so the realized kernel variance equals v
//     exactly for any v while every pass stays diffusively stable
//     (q <= 0.45);
//   * observe: bit j is 1 iff y_j lies in the arc [a_j, a_j + duty)
//     with a_j = frac(-r j). The arc indicator is averaged over each
//     bin (fractional overlap at the two edge bins), the bit
//     probability is the indicator-weighted posterior mass, and the
//     posterior is reweighted by the per-bin indicator average.
//
// The initial state is uniform, which marginalizes the unknown start
// phase exactly; no phase parameter is fitted. The summed per-bit log
// probabilities are the exact log-likelihood of the bit string under
// the model, up to grid discretization. Pass count is capped: past the
// cap the posterior relaxes to uniform within a few steps anyway and
// the likelihood has already saturated at its independent-bits limit.
class WrappedWalkFilter {
 public:
  WrappedWalkFilter(const std::vector<std::uint8_t>& bits, double duty)
      : bits_(bits), duty_(duty) {}

  // Log-likelihood of the first n_used bits (all of them when n_used
  // is negative) at per-step jitter s and drift r, on a grid of `bins`
  // cells. Scratch buffers are reused across calls; not thread-safe.
  double loglik(double s, double r, int bins, std::int64_t n_used = -1) const {
    const std::int64_t total = static_cast<std::int64_t>(bits_.size());
    const std::int64_t n =
        n_used < 0 ? total : std::min<std::int64_t>(n_used, total);
    const std::size_t k = static_cast<std::size_t>(bins);
    const double dx = 1.0 / static_cast<double>(bins);
    const double v = s * s;
    const double q_raw = v / (2.0 * dx * dx);
    const int passes =
        q_raw <= 0.45
            ? 1
            : static_cast<int>(std::min(std::ceil(q_raw / 0.45), 32.0));
    const double q = std::min(q_raw / passes, 0.45);
    const double c0 = 1.0 - 2.0 * q;
    const double rf = r - std::floor(r);

    p_.assign(k, 1.0 / static_cast<double>(bins));
    next_.resize(k);
    double alpha = 0.0;
    double ll = 0.0;
    for (std::int64_t j = 1; j <= n; ++j) {
      for (int pass = 0; pass < passes; ++pass) {
        next_[0] = c0 * p_[0] + q * (p_[k - 1] + p_[1]);
        for (std::size_t i = 1; i + 1 < k; ++i)
          next_[i] = c0 * p_[i] + q * (p_[i - 1] + p_[i + 1]);
        next_[k - 1] = c0 * p_[k - 1] + q * (p_[k - 2] + p_[0]);
        p_.swap(next_);
      }
      alpha -= rf;
      alpha -= std::floor(alpha);
      const double a1 = alpha + duty_;
      const bool bit = bits_[static_cast<std::size_t>(j - 1)] != 0;
      double mass = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double lo = static_cast<double>(i) * dx;
        const double hi = lo + dx;
        double ov = std::max(0.0, std::min(a1, hi) - std::max(alpha, lo));
        ov += std::max(0.0,
                       std::min(a1 - 1.0, hi) - std::max(alpha - 1.0, lo));
        const double w = ov / dx;
        p_[i] *= bit ? w : 1.0 - w;
        mass += p_[i];
      }
      ll += std::log(std::max(mass, 1e-300));
      if (mass > 1e-280) {
        const double inv = 1.0 / mass;
        for (std::size_t i = 0; i < k; ++i) p_[i] *= inv;
      } else {
        // the observation contradicted the whole posterior (possible
        // only when the model under test is badly wrong); restart flat
        // rather than propagate a zero distribution
        p_.assign(k, 1.0 / static_cast<double>(bins));
      }
    }
    return ll;
  }

 private:
  const std::vector<std::uint8_t>& bits_;
  double duty_;
  mutable std::vector<double> p_;
  mutable std::vector<double> next_;
};

}  // namespace detail

// Maximum-likelihood fit of the accumulated jitter from the bit string
// alone. Under the model the sampled phase is a Gaussian random walk
// with drift `ratio` and per-edge variance s^2, observed only through
// the one-periodic duty-cycle threshold; the bit string is therefore a
// hidden Markov chain, and the fit maximizes its exact likelihood,
// evaluated by detail::WrappedWalkFilter. Marginalizing each bit over
// the filtered phase posterior keeps the full information content of
// the stream; blockwise or composite pseudo-likelihoods, whose
// marginals never sharpen past the prior walk dispersion, saturate at
// a few effective observations per block and scatter accordingly.
//
// Stages (each golden section acts on a smooth unimodal profile):
//   1. a geometric grid of jitter levels is scored on a stream prefix,
//      for both complement branches when the ratio's integer part is
//      unresolved; the winning pair seeds everything else;
//   2. the drift is refined on the prefix. The spectral estimate lands
//      within a few line widths of the truth, and the likelihood
//      profile in r is smooth and unimodal on that scale because the
//      posterior re-centers itself after small drift errors;
//   3. golden section in log s on the full stream, inside a bracket
//      around the probe winner (widened outward when the optimum pins
//      to a bracket edge);
//   4. one full-stream drift re-polish at the fitted level, then a
//      final local sweep of log s.
//
// Flags the result when the optimum pins to a search bound
// ("boundary") and when the fitted likelihood fails to beat both
// degenerate explanations -- a frozen walk at s_min and duty-biased
// coin flips, the infinite-jitter limit -- by a margin of 2
// ("low_information").
template <typename Scalar>
MeasurementRecord<Scalar> estimate_total_jitter(
    const BitStream<Scalar>& stream, const RatioEstimate<Scalar>& ratio,
    const JitterFitOptions& opts = {}) {
  const std::int64_t n = stream.n_bits();
  if (n < 64)
    throw estimation_error(
        "estimate_total_jitter: need at least 64 bits, got " +
        std::to_string(n));
  if (!(opts.s_min > 0.0) || !(opts.s_max > opts.s_min))
    throw std::invalid_argument(
        "estimate_total_jitter: need 0 < s_min < s_max");
  if (opts.prefix_window < 64)
    throw std::invalid_argument(
        "estimate_total_jitter: prefix_window must be at least 64");
  if (opts.phase_bins != 0 && opts.phase_bins < 16)
    throw std::invalid_argument(
        "estimate_total_jitter: phase_bins must be 0 (auto) or >= 16");
  const double duty = static_cast<double>(stream.sampled_duty);
  if (!(duty > 0.0) || !(duty < 1.0))
    throw estimation_error(
        "estimate_total_jitter: duty cycle must lie strictly inside (0, 1)");

  const detail::WrappedWalkFilter filter(stream.bits, duty);
  const auto pick_bins = [&](double s) {
    if (opts.phase_bins != 0) return opts.phase_bins;
    const double want = 0.8 / std::max(s, 1e-12);
    return static_cast<int>(std::clamp(want, 64.0, 512.0));
  };

  // --- stage 1: branch and coarse jitter level on a prefix --------------
  const std::int64_t n_pre = std::min(n, opts.prefix_window);
  std::vector<double> branches{static_cast<double>(ratio.ratio)};
  if (!ratio.integer_resolved)
    branches.push_back(1.0 - static_cast<double>(ratio.ratio));

  const double probe_lo = std::clamp(1e-4, opts.s_min, opts.s_max);
  const double probe_hi = std::clamp(0.3, probe_lo, opts.s_max);
  std::vector<double> probes{probe_lo};
  while (probes.back() * std::sqrt(10.0) < probe_hi)
    probes.push_back(probes.back() * std::sqrt(10.0));
  if (probes.back() < probe_hi) probes.push_back(probe_hi);

  double r_hat = branches.front();
  double s0 = probes.front();
  double best_probe = -std::numeric_limits<double>::infinity();
  for (const double r_cand : branches)
    for (const double s_probe : probes) {
      const double ll =
          filter.loglik(s_probe, r_cand, pick_bins(s_probe), n_pre);
      if (ll > best_probe) {
        best_probe = ll;
        r_hat = r_cand;
        s0 = s_probe;
      }
    }

  // --- stage 2: drift refinement on the prefix --------------------------
  // Bracket: the spectral peak sits on a speckle maximum inside a line
  // of half-width ~ pi s^2 cycles per bit, and the likelihood curvature
  // scale in r is sqrt(2 s^2 / n); cover both, and never less than a
  // few periodogram bins.
  const auto dr_scale = [](double s, std::int64_t nn) {
    return std::sqrt(2.0 * s * s / static_cast<double>(nn));
  };
  if (opts.refine_ratio) {
    const double span =
        std::min(0.05, std::max({4.0 * std::numbers::pi * s0 * s0,
                                 8.0 / static_cast<double>(n_pre),
                                 4.0 * dr_scale(s0, n_pre)}));
    const int pre_bins = pick_bins(s0);
    r_hat = detail::golden_max(
        [&](double r) { return filter.loglik(s0, r, pre_bins, n_pre); },
        r_hat - span, r_hat + span, 22);
  }

  // --- stage 3: jitter level on the full stream -------------------------
  int bins = pick_bins(s0);
  const auto ll_s = [&](double s) { return filter.loglik(s, r_hat, bins, n); };
  double lo = std::max(opts.s_min, s0 / 4.0);
  double hi = std::min(opts.s_max, s0 * 4.0);
  double s_hat = s0;
  for (int tries = 0; tries < 8; ++tries) {
    bins = pick_bins(std::sqrt(lo * hi));
    const double u = detail::golden_max(
        [&](double uu) { return ll_s(std::exp(uu)); }, std::log(lo),
        std::log(hi), 18);
    s_hat = std::clamp(std::exp(u), opts.s_min, opts.s_max);
    if (s_hat <= lo * 1.05 && lo > opts.s_min) {  // pinned low: extend down
      hi = lo * 1.2;
      lo = std::max(opts.s_min, lo / 16.0);
    } else if (s_hat >= hi / 1.05 && hi < opts.s_max) {  // pinned high
      lo = hi / 1.2;
      hi = std::min(opts.s_max, hi * 16.0);
    } else {
      break;
    }
  }
  bins = pick_bins(s_hat);

  // --- stage 4: full-stream drift re-polish, final local sweep ----------
  if (opts.refine_ratio) {
    const double span =
        std::min(0.05, std::max(4.0 * dr_scale(s_hat, n_pre),
                                4.0 / static_cast<double>(n)));
    r_hat = detail::golden_max(
        [&](double r) { return filter.loglik(s_hat, r, bins, n); },
        r_hat - span, r_hat + span, 14);
  }
  {
    const double lo_fin = std::max(opts.s_min, s_hat / 1.4);
    const double hi_fin = std::min(opts.s_max, s_hat * 1.4);
    const double u = detail::golden_max(
        [&](double uu) { return ll_s(std::exp(uu)); }, std::log(lo_fin),
        std::log(hi_fin), 14);
    s_hat = std::clamp(std::exp(u), opts.s_min, opts.s_max);
  }

  MeasurementRecord<Scalar> rec;
  rec.pair = stream.pair;
  rec.ratio = static_cast<Scalar>(r_hat);
  rec.total_jitter = {static_cast<Scalar>(s_hat), stream.sampler_period};
  rec.n_bits = n;
  rec.method = MeasurementMethod::bit_mle;
  if (!ratio.integer_resolved) rec.flags.push_back("ratio_fractional");
  if (s_hat <= opts.s_min * 1.5 || s_hat >= opts.s_max / 1.5)
    rec.flags.push_back("boundary");
  // Honesty margin: the fit must beat both degenerate explanations of
  // the stream -- a frozen walk at the lower search bound, and
  // duty-biased coin flips (the infinite-jitter limit, in closed form)
  // -- by 2 log-likelihood units, or the stream does not carry enough
  // jitter information at this length to trust the estimate.
  const double ll_hat = ll_s(s_hat);
  const double ones = static_cast<double>(
      std::count(stream.bits.begin(), stream.bits.end(), std::uint8_t{1}));
  const double ll_coin =
      ones * std::log(duty) +
      (static_cast<double>(n) - ones) * std::log(1.0 - duty);
  const double ll_frozen =
      filter.loglik(opts.s_min, r_hat, pick_bins(opts.s_min), n);
  if (ll_hat - std::max(ll_coin, ll_frozen) < 2.0)
    rec.flags.push_back("low_information");
  return rec;
}

// Ground-truth route: per-edge increments of the recorded unwrapped
// phase are independent draws of the increment law, so their sample mean
// estimates the drift and their sample variance the accumulated jitter
// squared. The first edge is skipped; its rise differs when the sampler
// does not start at phase zero.
template <typename Scalar>
MeasurementRecord<Scalar> estimate_from_phases(
    const BitStream<Scalar>& stream) {
  const std::int64_t n = stream.n_bits();
  if (stream.true_phases.empty())
    throw std::invalid_argument(
        "estimate_from_phases: stream carries no recorded phases");
  if (n < 3)
    throw estimation_error("estimate_from_phases: need at least 3 edges");

  double mean = 0.0;
  for (std::int64_t k = 1; k < n; ++k)
    mean += static_cast<double>(stream.true_phases[static_cast<std::size_t>(k)]) -
            static_cast<double>(
                stream.true_phases[static_cast<std::size_t>(k - 1)]);
  const double m = static_cast<double>(n - 1);
  mean /= m;
  double ss = 0.0;
  for (std::int64_t k = 1; k < n; ++k) {
    const double d =
        static_cast<double>(stream.true_phases[static_cast<std::size_t>(k)]) -
        static_cast<double>(
            stream.true_phases[static_cast<std::size_t>(k - 1)]) -
        mean;
    ss += d * d;
  }
  const double var = ss / (m - 1.0);

  MeasurementRecord<Scalar> rec;
  rec.pair = stream.pair;
  rec.ratio = static_cast<Scalar>(mean);
  rec.total_jitter = {static_cast<Scalar>(std::sqrt(var)),
                      stream.sampler_period};
  rec.n_bits = n;
  rec.method = MeasurementMethod::phase_oracle;
  return rec;
}

// One-shot bit-only measurement of a stream
template <typename Scalar>
MeasurementRecord<Scalar> measure_stream(
    const BitStream<Scalar>& stream,
    std::optional<std::pair<int, int>> delay_elements = std::nullopt,
    const JitterFitOptions& opts = {}) {
  const auto ratio = estimate_ratio(stream, delay_elements);
  return estimate_total_jitter(stream, ratio, opts);
}

}  // namespace rojt
