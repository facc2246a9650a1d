#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rojt/distributions.hpp"
#include "rojt/quadrature.hpp"
#include "rojt/random.hpp"

using namespace rojt;

// Reference values below were frozen from an independent implementation
// (SciPy 1.15 invgauss / norminvgauss and 30-digit mpmath arithmetic).

TEST_CASE("inverse gaussian rejects invalid parameters") {
  CHECK_THROWS_AS(InverseGaussian<double>(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(InverseGaussian<double>(-2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(InverseGaussian<double>(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("inverse gaussian density matches the frozen oracle") {
  const InverseGaussian<double> ig(2.0, 3.0);
  CHECK(ig.pdf(1.5) == doctest::Approx(0.3533380431253714).epsilon(1e-13));
  CHECK(ig.pdf(0.4) == doctest::Approx(0.24778439373218286).epsilon(1e-13));
  CHECK(ig.log_pdf(1.5) ==
        doctest::Approx(std::log(0.3533380431253714)).epsilon(1e-12));
  CHECK_THROWS_AS(ig.pdf(0.0), std::domain_error);
  CHECK_THROWS_AS(ig.pdf(-1.0), std::domain_error);
}

TEST_CASE("inverse gaussian cdf matches the frozen oracle") {
  const InverseGaussian<double> ig(2.0, 3.0);
  CHECK(ig.cdf(2.0) == doctest::Approx(0.6436706247667282).epsilon(1e-12));
  CHECK(ig.cdf(0.5) == doctest::Approx(0.05518683599308046).epsilon(1e-12));
  CHECK(ig.cdf(8.0) == doctest::Approx(0.988994256270887).epsilon(1e-12));
  CHECK(ig.cdf(0.0) == 0.0);
  CHECK(ig.cdf(-3.0) == 0.0);
}

TEST_CASE("concentrated inverse gaussian cdf survives the overflow regime") {
  // shape/mean = 1e6: the textbook cdf formula needs e^{2e6}
  const InverseGaussian<double> ig(1.0, 1e6);
  CHECK(ig.cdf(1.0) == doctest::Approx(0.500199471090273).epsilon(1e-10));
  CHECK(ig.cdf(0.998) ==
        doctest::Approx(0.022669091649562417).epsilon(1e-9));
  CHECK(ig.cdf(1.002) == doctest::Approx(0.9771689357343641).epsilon(1e-10));
}

TEST_CASE("inverse gaussian cdf is the integral of the density") {
  const InverseGaussian<double> ig(2.0, 3.0);
  const auto mass = integrate_adaptive([&](double x) { return ig.pdf(x); },
                                       1e-9, 2.0, 1e-10);
  CHECK(mass.value == doctest::Approx(ig.cdf(2.0)).epsilon(1e-9));
}

TEST_CASE("inverse gaussian log-MGF: frozen value, domain guard, quadrature") {
  const InverseGaussian<double> ig(2.0, 3.0);
  CHECK(ig.mgf_domain_max() == doctest::Approx(0.375));
  CHECK(ig.log_mgf(0.1) ==
        doctest::Approx(0.2154767421334871).epsilon(1e-13));
  CHECK_NOTHROW(ig.log_mgf(0.375));
  CHECK_THROWS_AS(ig.log_mgf(0.3751), std::domain_error);

  // E[e^{sX}] by direct integration
  const double s = 0.1;
  const auto mgf = integrate_adaptive(
      [&](double x) { return std::exp(s * x) * ig.pdf(x); }, 1e-9, 150.0,
      1e-11);
  CHECK(std::log(mgf.value) == doctest::Approx(ig.log_mgf(s)).epsilon(1e-9));
}

TEST_CASE("inverse gaussian sampler reproduces its law") {
  const InverseGaussian<double> ig(2.0, 3.0);
  RandomStream rng(777);
  const int n = 100000;
  std::vector<double> draws(n);
  double sum = 0.0;
  for (auto& d : draws) {
    d = ig.sample(rng);
    CHECK(d > 0.0);
    sum += d;
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (const double d : draws) ss += (d - mean) * (d - mean);
  const double var = ss / (n - 1);
  CHECK(mean == doctest::Approx(2.0).epsilon(0.02));
  CHECK(var == doctest::Approx(ig.variance()).epsilon(0.06));

  // one-sample Kolmogorov-Smirnov against the closed-form cdf
  std::sort(draws.begin(), draws.end());
  double d_stat = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = ig.cdf(draws[static_cast<std::size_t>(i)]);
    d_stat = std::max(d_stat, std::abs(F - (i + 1.0) / n));
    d_stat = std::max(d_stat, std::abs(F - static_cast<double>(i) / n));
  }
  CHECK(d_stat * std::sqrt(static_cast<double>(n)) < 2.0);
}

TEST_CASE("normal inverse gaussian rejects invalid parameters") {
  CHECK_THROWS_AS(NormalInverseGaussian<double>(0.0, 0.0, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(NormalInverseGaussian<double>(1.0, 1.0, 0.0, 1.0),
                  std::invalid_argument);  // |beta| == alpha
  CHECK_THROWS_AS(NormalInverseGaussian<double>(1.0, -1.0, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(NormalInverseGaussian<double>(1.0, 0.5, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("normal inverse gaussian density and moments match the oracle") {
  const NormalInverseGaussian<double> nig(2.0, 0.5, 0.3, 1.5);
  CHECK(nig.mean() == doctest::Approx(0.6872983346207417).epsilon(1e-14));
  CHECK(nig.variance() ==
        doctest::Approx(0.8262364471909158).epsilon(1e-13));
  CHECK(nig.pdf(0.3) == doctest::Approx(0.466817042739617).epsilon(1e-12));
  CHECK(nig.pdf(1.0) == doctest::Approx(0.41510811016290655).epsilon(1e-12));
  CHECK(nig.pdf(-2.0) ==
        doctest::Approx(0.0047185094816018505).epsilon(1e-12));
}

TEST_CASE("normal inverse gaussian cdf by quadrature matches the oracle") {
  const NormalInverseGaussian<double> nig(2.0, 0.5, 0.3, 1.5);
  CHECK(nig.cdf(0.5) == doctest::Approx(0.433795472437452).epsilon(1e-7));
}

TEST_CASE("normal inverse gaussian log-MGF: frozen value and domain guard") {
  const NormalInverseGaussian<double> nig(2.0, 0.5, 0.3, 1.5);
  CHECK(nig.log_mgf(0.7) ==
        doctest::Approx(0.71473750965556266).epsilon(1e-13));
  CHECK_NOTHROW(nig.log_mgf(1.5));   // beta + s = alpha: boundary included
  CHECK_NOTHROW(nig.log_mgf(-2.5));  // beta + s = -alpha
  CHECK_THROWS_AS(nig.log_mgf(1.5001), std::domain_error);
  CHECK_THROWS_AS(nig.log_mgf(-2.5001), std::domain_error);

  const double s = 0.7;
  const auto mgf = integrate_adaptive(
      [&](double x) { return std::exp(s * x) * nig.pdf(x); }, -60.0, 60.0,
      1e-11);
  CHECK(std::log(mgf.value) ==
        doctest::Approx(nig.log_mgf(s)).epsilon(1e-8));
}

TEST_CASE("normal inverse gaussian density normalizes, moderate and steep") {
  const NormalInverseGaussian<double> moderate(2.0, 0.5, 0.3, 1.5);
  const double wm = moderate.stddev();
  const double mm = moderate.mean();
  const auto mass_m = integrate_adaptive(
      [&](double x) { return moderate.pdf(x); }, mm - 40.0 * wm,
      mm + 40.0 * wm, 1e-9);
  CHECK(mass_m.value == doctest::Approx(1.0).epsilon(1e-6));

  const auto steep = nig_of_pair(1.0, 1e-3, 1.3812154696132597, 2e-3);
  const double ws = steep.stddev();
  const double ms = steep.mean();
  const auto mass_s = integrate_adaptive(
      [&](double x) { return steep.pdf(x); }, ms - 40.0 * ws, ms + 40.0 * ws,
      1e-9);
  CHECK(mass_s.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("steep pair law evaluates where the unscaled K1 underflows") {
  // frozen from SciPy: alpha ~ 6.08e5, argument of K1 ~ 1.2e6
  const auto steep = nig_of_pair(1.0, 1e-3, 1.3812154696132597, 2e-3);
  CHECK(steep.alpha == doctest::Approx(607646.9047429486).epsilon(1e-13));
  CHECK(steep.beta == doctest::Approx(345303.8674033149).epsilon(1e-13));
  CHECK(steep.delta == doctest::Approx(2.0).epsilon(1e-13));
  const double mean = steep.mean();
  CHECK(steep.pdf(mean) ==
        doctest::Approx(164.13412891905213).epsilon(1e-10));
  CHECK(steep.pdf(mean + 3.0 * steep.stddev()) ==
        doctest::Approx(1.8326989486755632).epsilon(1e-10));
}

TEST_CASE("pair law carries the predicted moments and gamma") {
  const double f0 = 2.0, s0 = 0.5, f1 = 3.0, s1 = 0.8;
  const auto nig = nig_of_pair(f0, s0, f1, s1);
  CHECK(nig.gamma() == doctest::Approx(f0 / (s0 * s1)).epsilon(1e-14));
  CHECK(nig.mean() == doctest::Approx(f1 / f0).epsilon(1e-13));
  CHECK(nig.variance() ==
        doctest::Approx(s1 * s1 / f0 + f1 * f1 * s0 * s0 / (f0 * f0 * f0))
            .epsilon(1e-13));
  CHECK(nig.beta == doctest::Approx(f1 / (s1 * s1)).epsilon(1e-14));
  CHECK(nig.delta == doctest::Approx(s1 / s0).epsilon(1e-14));

  CHECK_THROWS_AS(nig_of_pair(0.0, s0, f1, s1), std::invalid_argument);
  CHECK_THROWS_AS(nig_of_pair(f0, 0.0, f1, s1), std::invalid_argument);
  CHECK_THROWS_AS(nig_of_pair(f0, s0, f1, 0.0), std::invalid_argument);
}

TEST_CASE("one sampler cycle of drift-diffusion composes to the pair law") {
  // E[e^{sX}] with X = f1 P + sigma1 W_P and P inverse-gaussian equals
  // the pair law's MGF: log_mgf_ig(f1 s + sigma1^2 s^2/2) == log_mgf_nig(s),
  // including at the domain endpoints, which coincide analytically.
  const double f0 = 2.0, s0 = 0.5, f1 = 3.0, s1 = 0.8;
  const InverseGaussian<double> cycle(1.0 / f0, 1.0 / (s0 * s0));
  const auto nig = nig_of_pair(f0, s0, f1, s1);
  const double s_hi = nig.alpha - nig.beta;  // right MGF endpoint
  for (const double s : {-5.0, -1.0, 0.0, 0.5, 1.5, 2.0, s_hi * (1 - 1e-9)}) {
    const double u = f1 * s + 0.5 * s1 * s1 * s * s;
    CHECK(cycle.log_mgf(u) == doctest::Approx(nig.log_mgf(s)).epsilon(2e-9));
  }
  // the two domain endpoints coincide analytically
  const double u_hi = f1 * s_hi + 0.5 * s1 * s1 * s_hi * s_hi;
  CHECK(u_hi == doctest::Approx(cycle.mgf_domain_max()).epsilon(1e-14));
}

TEST_CASE("normal inverse gaussian sampler reproduces its moments") {
  const NormalInverseGaussian<double> nig(2.0, 0.5, 0.3, 1.5);
  RandomStream rng(31415);
  const int n = 200000;
  double sum = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = nig.sample(rng);
    sum += x;
    ss += x * x;
  }
  const double mean = sum / n;
  const double var = ss / n - mean * mean;
  CHECK(mean == doctest::Approx(nig.mean()).epsilon(0.02));
  CHECK(var == doctest::Approx(nig.variance()).epsilon(0.05));
}

TEST_CASE("normal law: moments, density, cdf, mgf") {
  const Normal<double> norm(1.5, 0.5);
  CHECK(norm.pdf(1.5) ==
        doctest::Approx(1.0 / (0.5 * std::sqrt(2.0 * std::numbers::pi)))
            .epsilon(1e-14));
  CHECK(norm.cdf(1.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(norm.cdf(2.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(norm.log_mgf(2.0) == doctest::Approx(1.5 * 2.0 + 0.5 * 0.25 * 4.0));
  CHECK_THROWS_AS(Normal<double>(0.0, -1.0), std::invalid_argument);
  const Normal<double> degenerate(1.0, 0.0);
  CHECK_THROWS_AS(degenerate.pdf(1.0), std::domain_error);
  RandomStream rng(99);
  CHECK(degenerate.sample(rng) == 1.0);
}

TEST_CASE("free-function forms forward to the members") {
  const InverseGaussian<double> ig(2.0, 3.0);
  const NormalInverseGaussian<double> nig(2.0, 0.5, 0.3, 1.5);
  CHECK(pdf(ig, 1.5) == ig.pdf(1.5));
  CHECK(cdf(ig, 2.0) == ig.cdf(2.0));
  CHECK(log_mgf(nig, 0.7) == nig.log_mgf(0.7));
  RandomStream r1(5), r2(5);
  CHECK(sample(ig, r1) == ig.sample(r2));
}
