#include <doctest.h>

#include <cmath>
#include <vector>

#include "rojt/recovery.hpp"

using namespace rojt;

namespace {

// Builds an exact measurement record for pair (i, j): the combined jitter
// (f_j^2/f_i^2) sigma_i^2 + sigma_j^2 accumulated over the sampler's own
// period T_i.
MeasurementRecord<double> exact_record(int i, int j,
                                       const std::vector<double>& T,
                                       const std::vector<double>& sigma_sq) {
  const auto ti = static_cast<std::size_t>(i);
  const auto tj = static_cast<std::size_t>(j);
  const double fr = T[ti] / T[tj];  // f_j / f_i
  const double combined = fr * fr * sigma_sq[ti] + sigma_sq[tj];
  MeasurementRecord<double> rec;
  rec.pair = {i, j};
  rec.ratio = fr;
  rec.total_jitter = AccumulatedVolatility<double>{
      std::sqrt(T[ti] * combined), T[ti]};
  rec.n_bits = 1000000;
  rec.method = MeasurementMethod::bit_mle;
  return rec;
}

// three-ring bench fixture: T in ms-scale seconds, volatility chosen so the
// accumulated values over T_0 are 1e-3, 2e-3, 3e-3
const std::vector<double> bench_T{1e-3, 0.724e-3, 0.652e-3};
const std::vector<double> bench_sigma_sq{1e-6 / 1e-3, 4e-6 / 1e-3,
                                         9e-6 / 1e-3};

}  // namespace

TEST_CASE("canonical pair order is (0,1), (0,2), (1,2), then (0,i)") {
  const auto p3 = canonical_pairs(3);
  REQUIRE(p3.size() == 3);
  CHECK(p3[0] == std::pair<int, int>{0, 1});
  CHECK(p3[1] == std::pair<int, int>{0, 2});
  CHECK(p3[2] == std::pair<int, int>{1, 2});
  const auto p6 = canonical_pairs(6);
  REQUIRE(p6.size() == 6);
  CHECK(p6[3] == std::pair<int, int>{0, 3});
  CHECK(p6[5] == std::pair<int, int>{0, 5});
  CHECK_THROWS_AS(canonical_pairs(2), std::invalid_argument);
}

TEST_CASE("frequency ratios from frequencies, periods, and records") {
  const auto a = FrequencyRatios<double>::from_frequencies({5.0, 7.0, 2.5});
  CHECK(a.values[0] == 1.0);
  CHECK(a.values[1] == doctest::Approx(1.4));
  CHECK(a.values[2] == doctest::Approx(0.5));
  CHECK(a.max_pairwise_ratio() == doctest::Approx(1.4 / 0.5));
  CHECK(a.source == FrequencyRatios<double>::Source::configured);

  const auto b = FrequencyRatios<double>::from_periods({0.2, 1.0 / 7.0, 0.4});
  CHECK(b.values[1] == doctest::Approx(1.4).epsilon(1e-13));
  CHECK(b.values[2] == doctest::Approx(0.5).epsilon(1e-13));

  CHECK_THROWS_AS(FrequencyRatios<double>::from_frequencies({5.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FrequencyRatios<double>::from_frequencies({5.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FrequencyRatios<double>::from_periods({0.2, -1.0}),
                  std::invalid_argument);

  std::vector<MeasurementRecord<double>> recs{
      exact_record(0, 1, bench_T, bench_sigma_sq),
      exact_record(0, 2, bench_T, bench_sigma_sq)};
  const auto c = FrequencyRatios<double>::from_records(recs, 3);
  CHECK(c.source == FrequencyRatios<double>::Source::measured);
  CHECK(c.values[1] == doctest::Approx(1e-3 / 0.724e-3).epsilon(1e-13));
  CHECK(c.values[2] == doctest::Approx(1e-3 / 0.652e-3).epsilon(1e-13));

  CHECK_THROWS_AS(FrequencyRatios<double>::from_records(recs, 4),
                  std::invalid_argument);  // no (0, 3) record
  recs[0].flags.push_back("ratio_fractional");
  CHECK_THROWS_AS(FrequencyRatios<double>::from_records(recs, 3),
                  std::invalid_argument);
}

TEST_CASE("closed-form inverse certifies against identity and Eigen") {
  const std::vector<std::vector<double>> freq_sets{
      {1.0, 1.3812154696132597, 1.5337423312883436},
      {1.0, 0.7, 1.9, 0.55, 1.31},
      {1.0, 1.0, 1.0, 1.0},
      {2.0, 2.6, 1.8, 3.1, 2.2, 1.9},
  };
  for (const auto& f : freq_sets) {
    const auto ratios = FrequencyRatios<double>::from_frequencies(f);
    const auto M = system_matrix_rate(ratios);
    const auto W = system_matrix_inverse(ratios);
    const auto I = Eigen::MatrixXd::Identity(M.rows(), M.cols());
    CHECK(infinity_norm<double>(W * M - I) < 1e-13);
    CHECK(infinity_norm<double>(M * W - I) < 1e-13);
    const Eigen::MatrixXd Winv = M.inverse();
    CHECK(infinity_norm<double>(W - Winv) < 1e-11 * infinity_norm(Winv));
  }
}

TEST_CASE("condition number and its frequency-spread bound") {
  // equal frequencies: kappa attains the bound exactly once n >= 4 rings
  const auto equal4 =
      FrequencyRatios<double>::from_frequencies({1.0, 1.0, 1.0, 1.0});
  CHECK(condition_number_inf(equal4) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(condition_bound(1.0) == doctest::Approx(5.0));

  // three equal rings sit below it
  const auto equal3 = FrequencyRatios<double>::from_frequencies({1.0, 1.0, 1.0});
  CHECK(condition_number_inf(equal3) == doctest::Approx(3.0).epsilon(1e-13));

  // the bound holds across spreads
  for (const auto& f : std::vector<std::vector<double>>{
           {1.0, 1.38, 1.53},
           {1.0, 0.5, 2.0, 0.9},
           {5.0, 7.0, 2.5, 6.0, 3.3}}) {
    const auto ratios = FrequencyRatios<double>::from_frequencies(f);
    CHECK(condition_number_inf(ratios) <=
          condition_bound(ratios.max_pairwise_ratio()) * (1.0 + 1e-12));
  }
}

TEST_CASE("exact measurements round-trip through the general solver") {
  std::vector<MeasurementRecord<double>> recs{
      exact_record(0, 1, bench_T, bench_sigma_sq),
      exact_record(0, 2, bench_T, bench_sigma_sq),
      exact_record(1, 2, bench_T, bench_sigma_sq)};
  const auto ratios = FrequencyRatios<double>::from_periods(bench_T);
  const auto sol = recover_method2_general(recs, ratios);

  REQUIRE(sol.sigma_sq_T0.size() == 3);
  CHECK(sol.method == RecoveryMethod::method2_general);
  CHECK(sol.sigma_sq_T0[0] == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(sol.sigma_sq_T0[1] == doctest::Approx(4e-6).epsilon(1e-12));
  CHECK(sol.sigma_sq_T0[2] == doctest::Approx(9e-6).epsilon(1e-12));
  CHECK(sol.residual_inf < 1e-18);
  CHECK(sol.flags.empty());
  CHECK(sol.kappa_inf > 1.0);
  CHECK(sol.kappa_inf <=
        condition_bound(ratios.max_pairwise_ratio()) * (1.0 + 1e-12));
}

TEST_CASE("five-ring bench round-trips including the (0,i) tail rows") {
  const std::vector<double> T{1e-3, 0.724e-3, 0.652e-3, 0.841e-3, 1.213e-3};
  const std::vector<double> s_sq{1e-3, 4e-3, 9e-3, 2.5e-3, 6.25e-3};
  std::vector<MeasurementRecord<double>> recs;
  for (const auto& p : canonical_pairs(5))
    recs.push_back(exact_record(p.first, p.second, T, s_sq));
  const auto ratios = FrequencyRatios<double>::from_periods(T);
  const auto sol = recover_method2_general(recs, ratios);
  REQUIRE(sol.sigma_sq_T0.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(sol.sigma_sq_T0[i] ==
          doctest::Approx(s_sq[i] * T[0]).epsilon(1e-11));
  CHECK(sol.residual_inf < 1e-15);
  CHECK(sol.flags.empty());
}

TEST_CASE("direct 3x3 solve and explicit inverse agree on noisy data") {
  // perturb each measurement by a few percent: the square system still has
  // an exact solution, so the two routes must agree to rounding
  std::vector<MeasurementRecord<double>> recs{
      exact_record(0, 1, bench_T, bench_sigma_sq),
      exact_record(0, 2, bench_T, bench_sigma_sq),
      exact_record(1, 2, bench_T, bench_sigma_sq)};
  recs[0].total_jitter.value *= 1.031;
  recs[1].total_jitter.value *= 0.978;
  recs[2].total_jitter.value *= 1.012;
  const auto ratios = FrequencyRatios<double>::from_periods(bench_T);
  const auto direct = recover_method2_3osc(recs, ratios);
  const auto general = recover_method2_general(recs, ratios);
  CHECK(direct.method == RecoveryMethod::method2_3osc);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(direct.sigma_sq_T0[i] ==
          doctest::Approx(general.sigma_sq_T0[i]).epsilon(1e-12));
  CHECK(direct.residual_inf < 1e-18);
  CHECK(general.residual_inf < 1e-18);

  CHECK_THROWS_AS(
      recover_method2_3osc(recs,
                           FrequencyRatios<double>::from_periods(
                               {1e-3, 0.7e-3, 0.6e-3, 0.5e-3})),
      std::invalid_argument);
  recs.pop_back();
  CHECK_THROWS_AS(recover_method2_general(recs, ratios),
                  std::invalid_argument);  // missing pair (1,2)
}

TEST_CASE("homogeneous-technology shortcut inverts its own hypothesis") {
  // sigma_i^2 f_i constant: sigma^2 proportional to the period
  const double f0 = 1e3, c = 1e-6;  // sigma_i^2 = c / f_i
  const double T0 = 1.0 / f0;
  for (const double rho : {0.8, 1.0, 1.3812154696132597}) {
    const double fi = rho * f0;
    const double s0_sq = c / f0, si_sq = c / fi;
    const double combined = rho * rho * s0_sq + si_sq;
    MeasurementRecord<double> rec;
    rec.pair = {0, 2};
    rec.ratio = rho;
    rec.total_jitter = AccumulatedVolatility<double>{
        std::sqrt(T0 * combined), T0};
    const auto out = recover_method1(rec, rho);
    CHECK(out.sigma_sq_T0_sampled ==
          doctest::Approx(si_sq * T0).epsilon(1e-12));
    CHECK(out.sigma_sq_T0_sampler ==
          doctest::Approx(s0_sq * T0).epsilon(1e-12));
    CHECK(out.assumed_ratio == rho);
    CHECK(out.pair == std::pair<int, int>{0, 2});
  }

  MeasurementRecord<double> bad;
  bad.pair = {1, 2};
  CHECK_THROWS_AS(recover_method1(bad, 1.2), std::invalid_argument);
  bad.pair = {0, 2};
  CHECK_THROWS_AS(recover_method1(bad, 0.0), std::invalid_argument);
}

TEST_CASE("the shortcut misattributes jitter when the hypothesis fails") {
  // bench rings do NOT satisfy sigma_i^2 f_i = const; method 1 must then
  // disagree with the exact answer while method 2 still nails it
  const auto rec01 = exact_record(0, 1, bench_T, bench_sigma_sq);
  const double rho1 = bench_T[0] / bench_T[1];
  const auto m1 = recover_method1(rec01, rho1);
  const double truth1 = bench_sigma_sq[1] * bench_T[0];
  CHECK(std::abs(m1.sigma_sq_T0_sampled - truth1) / truth1 > 0.10);
}

TEST_CASE("nonphysical measurement sets raise the negative-variance flag") {
  const std::vector<double> T{1e-3, 1e-3, 1e-3};
  std::vector<MeasurementRecord<double>> recs;
  const std::vector<std::pair<int, int>> pairs = canonical_pairs(3);
  const double acc_sq[3] = {1e-6, 1e-6, 3e-6};  // y2 > y0 + y1
  for (int k = 0; k < 3; ++k) {
    MeasurementRecord<double> rec;
    rec.pair = pairs[static_cast<std::size_t>(k)];
    rec.total_jitter =
        AccumulatedVolatility<double>{std::sqrt(acc_sq[k]), 1e-3};
    recs.push_back(rec);
  }
  const auto sol =
      recover_method2_general(recs, FrequencyRatios<double>::from_periods(T));
  REQUIRE(!sol.flags.empty());
  CHECK(sol.flags[0] == "negative_variance_osc0");
  CHECK(sol.sigma_sq_T0[0] < 0.0);
}

TEST_CASE("a thousandfold frequency spread raises the conditioning flag") {
  const std::vector<double> f{1.0, 1000.0, 1000.0};
  const auto ratios = FrequencyRatios<double>::from_frequencies(f);
  CHECK(condition_number_inf(ratios) > ill_conditioned_threshold);
  std::vector<MeasurementRecord<double>> recs;
  for (const auto& p : canonical_pairs(3)) {
    MeasurementRecord<double> rec;
    rec.pair = p;
    rec.total_jitter = AccumulatedVolatility<double>{1e-3, 1.0};
    recs.push_back(rec);
  }
  const auto sol = recover_method2_general(recs, ratios);
  bool flagged = false;
  for (const auto& fl : sol.flags) flagged = flagged || fl == "ill_conditioned";
  CHECK(flagged);
}

TEST_CASE("method names render for reports") {
  CHECK(std::string(to_string(RecoveryMethod::method1)) == "method1");
  CHECK(std::string(to_string(RecoveryMethod::method2_3osc)) ==
        "method2_3osc");
  CHECK(std::string(to_string(RecoveryMethod::method2_general)) ==
        "method2_general");
}
