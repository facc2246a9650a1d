#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>

#include "rojt/measurement.hpp"
#include "rojt/simulator.hpp"

using namespace rojt;

namespace {

// Three-ring bench pair (sampler period 1 ms, sampled 0.724 ms) with
// accumulated per-ring jitters 1e-3 and 2e-3 over the sampler period;
// the combined accumulated jitter of the pair follows in closed form.
struct BenchPair {
  double T0 = 1e-3;
  double T1 = 0.724e-3;
  OscillatorParams<double> o0{0.13, 1.0 / 1e-3, 1e-3 / std::sqrt(1e-3), 0.5};
  OscillatorParams<double> o1{0.37, 1.0 / 0.724e-3, 2e-3 / std::sqrt(1e-3),
                              0.5};
  double ratio() const { return o1.frequency / o0.frequency; }
  double truth() const {
    const double r = ratio();
    const double s0 = o0.volatility, s1 = o1.volatility;
    return std::sqrt(r * r * s0 * s0 + s1 * s1) * std::sqrt(T0);
  }
};

bool has_flag(const MeasurementRecord<double>& rec, const char* name) {
  return std::find(rec.flags.begin(), rec.flags.end(), name) !=
         rec.flags.end();
}

}  // namespace

TEST_CASE("spectral line of a clean 7:5 pair sits at the folded ratio") {
  const OscillatorParams<double> o0(0.0, 5.0, 0.002, 0.5);
  const OscillatorParams<double> o1(0.0, 7.0, 0.003, 0.5);
  const auto bs = simulate_pair(o0, o1, 16384, SimulationMode::exact_ig, 7u);

  // frac(7/5) = 0.4 is already in (0, 1/2]; without delay counts the
  // integer part stays open
  const auto e = estimate_ratio(bs);
  CHECK(e.ratio == doctest::Approx(0.4).epsilon(1e-3));
  CHECK_FALSE(e.integer_resolved);
  CHECK(e.peak_to_median > 50.0);

  // delay counts (d_sampler, d_sampled) = (7, 5) put the candidate near
  // d_sampler/d_sampled = 1.4 and resolve the integer part
  const auto ed = estimate_ratio(bs, std::make_pair(7, 5));
  CHECK(ed.integer_resolved);
  CHECK(ed.ratio == doctest::Approx(1.4).epsilon(1e-3));
}

TEST_CASE("delay counts pick the complement branch when the ratio demands") {
  // r = 8/5 = 1.6 folds to nu = 0.4: same spectral line as 1.4, told
  // apart only by the delay counts
  const OscillatorParams<double> o0(0.0, 5.0, 0.002, 0.5);
  const OscillatorParams<double> o1(0.0, 8.0, 0.003, 0.5);
  const auto bs = simulate_pair(o0, o1, 16384, SimulationMode::exact_ig, 8u);

  const auto folded = estimate_ratio(bs);
  CHECK(folded.ratio == doctest::Approx(0.4).epsilon(1e-3));

  const auto e = estimate_ratio(bs, std::make_pair(8, 5));
  CHECK(e.integer_resolved);
  CHECK(e.ratio == doctest::Approx(1.6).epsilon(1e-3));
}

TEST_CASE("ratio estimate survives realistic jitter") {
  const BenchPair bench;
  const auto bs = simulate_pair(bench.o0, bench.o1, 100000,
                                SimulationMode::exact_ig, 101u);
  const auto e = estimate_ratio(bs, std::make_pair(138, 100));
  CHECK(e.integer_resolved);
  CHECK(std::abs(static_cast<double>(e.ratio) - bench.ratio()) < 5e-4);
}

TEST_CASE("estimate_ratio rejects streams without a spectral line") {
  // jitter far above one cycle per edge: bits are near-iid coin flips
  const OscillatorParams<double> h0(0.0, 5.0, 1.8, 0.5);
  const OscillatorParams<double> h1(0.0, 7.0, 2.1, 0.5);
  const auto bs = simulate_pair(h0, h1, 8192, SimulationMode::exact_ig, 31u);
  CHECK_THROWS_AS((void)estimate_ratio(bs), estimation_error);
}

TEST_CASE("estimate_ratio validates its inputs") {
  const OscillatorParams<double> o0(0.0, 5.0, 0.002, 0.5);
  const OscillatorParams<double> o1(0.0, 7.0, 0.003, 0.5);
  const auto tiny = simulate_pair(o0, o1, 100, SimulationMode::exact_ig, 1u);
  CHECK_THROWS_AS((void)estimate_ratio(tiny), estimation_error);

  const auto bs = simulate_pair(o0, o1, 4096, SimulationMode::exact_ig, 1u);
  CHECK_THROWS_AS((void)estimate_ratio(bs, std::make_pair(0, 5)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)estimate_ratio(bs, std::make_pair(7, -2)),
                  std::invalid_argument);
}

TEST_CASE("bit-only jitter estimate lands on the accumulated truth") {
  const BenchPair bench;
  const double truth = bench.truth();

  // two independent streams; the estimator's calibrated rms at this
  // length is ~1.3%, so 5% is a >= 3.5 sigma acceptance band
  for (const std::uint64_t seed : {102u, 103u}) {
    const auto bs = simulate_pair(bench.o0, bench.o1, 100000,
                                  SimulationMode::exact_ig, seed, true);
    const auto ratio = estimate_ratio(bs, std::make_pair(138, 100));
    const auto rec = estimate_total_jitter(bs, ratio);

    CHECK(rec.method == MeasurementMethod::bit_mle);
    CHECK(rec.n_bits == 100000);
    CHECK(static_cast<double>(rec.total_jitter.reference_period) ==
          doctest::Approx(bench.T0));
    CHECK(std::abs(static_cast<double>(rec.total_jitter.value) - truth) /
              truth <
          0.05);
    CHECK(std::abs(static_cast<double>(rec.ratio) - bench.ratio()) < 1e-4);
    CHECK(rec.flags.empty());

    // the bit-only route must agree with the recorded-phase oracle
    const auto oracle = estimate_from_phases(bs);
    CHECK(std::abs(static_cast<double>(rec.total_jitter.value) -
                   static_cast<double>(oracle.total_jitter.value)) /
              static_cast<double>(oracle.total_jitter.value) <
          0.05);
  }
}

TEST_CASE("unresolved ratio branch is flagged, not hidden") {
  const BenchPair bench;
  const auto bs = simulate_pair(bench.o0, bench.o1, 100000,
                                SimulationMode::exact_ig, 101u);
  const auto ratio = estimate_ratio(bs);  // no delay counts
  REQUIRE_FALSE(ratio.integer_resolved);
  const auto rec = estimate_total_jitter(bs, ratio);
  CHECK(has_flag(rec, "ratio_fractional"));
}

TEST_CASE("short low-jitter streams raise the honesty flags") {
  const BenchPair bench;
  const double s_tiny = 1e-5 / std::sqrt(bench.T0);
  const OscillatorParams<double> l0(0.0, bench.o0.frequency, s_tiny, 0.5);
  const OscillatorParams<double> l1(0.2, bench.o1.frequency, s_tiny, 0.5);
  const auto bs = simulate_pair(l0, l1, 2000, SimulationMode::exact_ig, 55u);
  const auto ratio = estimate_ratio(bs, std::make_pair(138, 100));
  const auto rec = estimate_total_jitter(bs, ratio);
  CHECK(has_flag(rec, "low_information"));
}

TEST_CASE("estimate_total_jitter validates options and stream length") {
  const OscillatorParams<double> o0(0.0, 5.0, 0.002, 0.5);
  const OscillatorParams<double> o1(0.0, 7.0, 0.003, 0.5);
  const auto bs = simulate_pair(o0, o1, 4096, SimulationMode::exact_ig, 1u);
  const auto ratio = estimate_ratio(bs, std::make_pair(7, 5));

  JitterFitOptions bad;
  bad.s_min = 0.0;
  CHECK_THROWS_AS((void)estimate_total_jitter(bs, ratio, bad),
                  std::invalid_argument);
  bad.s_min = 1e-2;
  bad.s_max = 1e-3;
  CHECK_THROWS_AS((void)estimate_total_jitter(bs, ratio, bad),
                  std::invalid_argument);

  const auto stub = simulate_pair(o0, o1, 192, SimulationMode::exact_ig, 1u);
  const auto stub_ratio = estimate_ratio(stub, std::make_pair(7, 5));
  const auto short_bs =
      simulate_pair(o0, o1, 32, SimulationMode::exact_ig, 1u);
  CHECK_THROWS_AS((void)estimate_total_jitter(short_bs, stub_ratio),
                  estimation_error);
}

TEST_CASE("phase oracle recovers drift and jitter from recorded phases") {
  const BenchPair bench;
  const auto bs = simulate_pair(bench.o0, bench.o1, 100000,
                                SimulationMode::exact_ig, 101u, true);
  const auto rec = estimate_from_phases(bs);
  CHECK(rec.method == MeasurementMethod::phase_oracle);
  // increments are iid draws of the per-edge law: the sample moments at
  // n = 1e5 pin both numbers to a fraction of a percent
  CHECK(static_cast<double>(rec.ratio) ==
        doctest::Approx(bench.ratio()).epsilon(1e-4));
  CHECK(static_cast<double>(rec.total_jitter.value) ==
        doctest::Approx(bench.truth()).epsilon(0.02));
  CHECK(static_cast<double>(rec.total_jitter.reference_period) ==
        doctest::Approx(bench.T0));
}

TEST_CASE("phase oracle refuses streams it cannot serve") {
  const OscillatorParams<double> o0(0.0, 5.0, 0.002, 0.5);
  const OscillatorParams<double> o1(0.0, 7.0, 0.003, 0.5);
  const auto no_phases =
      simulate_pair(o0, o1, 256, SimulationMode::exact_ig, 1u, false);
  CHECK_THROWS_AS((void)estimate_from_phases(no_phases),
                  std::invalid_argument);
  const auto two =
      simulate_pair(o0, o1, 2, SimulationMode::exact_ig, 1u, true);
  CHECK_THROWS_AS((void)estimate_from_phases(two), estimation_error);
}

TEST_CASE("measure_stream is the ratio fit and jitter fit composed") {
  const OscillatorParams<double> o0(0.1, 5.0, 0.02, 0.5);
  const OscillatorParams<double> o1(0.4, 7.0, 0.03, 0.5);
  const auto bs =
      simulate_pair(o0, o1, 32768, SimulationMode::exact_ig, 99u);

  const auto one_shot = measure_stream(bs, std::make_pair(7, 5));
  const auto ratio = estimate_ratio(bs, std::make_pair(7, 5));
  const auto two_step = estimate_total_jitter(bs, ratio);

  CHECK(static_cast<double>(one_shot.ratio) ==
        static_cast<double>(two_step.ratio));
  CHECK(static_cast<double>(one_shot.total_jitter.value) ==
        static_cast<double>(two_step.total_jitter.value));
  CHECK(one_shot.n_bits == two_step.n_bits);
  CHECK(one_shot.flags == two_step.flags);
}
