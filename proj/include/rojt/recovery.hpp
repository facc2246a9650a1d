// Per-oscillator volatility recovery from differential measurements.
//
// A measurement of pair (i, j) sees only the combined jitter
// (f_j^2/f_i^2) sigma_i^2 + sigma_j^2. Two ways to get back to the
// individual sigma_i^2:
//
// Method 1 assumes a homogeneous technology: sigma_i^2 f_i is the same
// constant for every ring, i.e. the rate variance grows linearly with the
// period (sigma_0^2 = sigma_i^2 f_i/f_0). One pair (0, i) then suffices:
//     sigma_i^2 = sigma'_{0i}^2 / (1 + f_i^3/f_0^3),
//     sigma_0^2 = sigma_i^2 f_i / f_0.
//
// Method 2 drops that assumption and solves the linear system over the
// pairs (0,1), (0,2), (1,2), (0,3), ..., (0,n). In rate form with
// x_i = sigma_i^2 and ratios rho_i = f_i/f_0 the matrix is
//     row (i,j):   (rho_j^2/rho_i^2) x_i + x_j = sigma'_{ij}^2,
// whose inverse is known in closed form; the leading 3x3 block is
//     [ 1/(2 rho_1^2)          1/(2 rho_2^2)         -1/(2 rho_2^2)        ]
//     [ 1/2                   -rho_1^2/(2 rho_2^2)    rho_1^2/(2 rho_2^2)  ]
//     [-rho_2^2/(2 rho_1^2)    1/2                    1/2                  ]
// and every further row i >= 3 is
//     [-rho_i^2/(2 rho_1^2)   -rho_i^2/(2 rho_2^2)    rho_i^2/(2 rho_2^2)
//       0 ... 0   1 (diagonal)   0 ... 0 ].
// With L the largest pairwise frequency ratio, the infinity-norm
// condition number obeys kappa <= (1 + L^2)(1 + 1.5 L^2): the system
// stays benign for any realistic spread of ring frequencies.
//
// Everything is solved in units accumulated over the reference period
// T_0, i.e. the unknowns returned are sigma_i^2(T_0) = T_0 sigma_i^2;
// measurements enter as their raw accumulated values sigma'_{ij}(T_i)^2
// rescaled by T_0/T_i = rho_i. The three-oscillator path additionally
// offers the direct accumulated-form solve (the same equations scaled
// row-wise by T_i/T_0), which serves as an independent cross-check of
// the explicit inverse.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rojt/measurement.hpp"

namespace rojt {

enum class RecoveryMethod { method1, method2_3osc, method2_general };

inline const char* to_string(RecoveryMethod m) {
  switch (m) {
    case RecoveryMethod::method1: return "method1";
    case RecoveryMethod::method2_3osc: return "method2_3osc";
    case RecoveryMethod::method2_general: return "method2_general";
  }
  return "?";
}

template <typename Scalar = double>
struct FrequencyRatios {
  enum class Source { configured, measured };

  std::vector<Scalar> values;  // values[i] = f_i / f_0, values[0] == 1
  Source source = Source::configured;

  static FrequencyRatios from_frequencies(const std::vector<Scalar>& f,
                                          Source src = Source::configured) {
    if (f.size() < 2)
      throw std::invalid_argument(
          "FrequencyRatios: need at least two oscillators");
    FrequencyRatios out;
    out.source = src;
    out.values.reserve(f.size());
    for (const Scalar fi : f) {
      if (!(fi > Scalar(0)))
        throw std::invalid_argument(
            "FrequencyRatios: frequencies must be > 0");
      out.values.push_back(fi / f[0]);
    }
    return out;
  }

  static FrequencyRatios from_periods(const std::vector<Scalar>& T,
                                      Source src = Source::configured) {
    std::vector<Scalar> f;
    f.reserve(T.size());
    for (const Scalar Ti : T) {
      if (!(Ti > Scalar(0)))
        throw std::invalid_argument("FrequencyRatios: periods must be > 0");
      f.push_back(Scalar(1) / Ti);
    }
    return from_frequencies(f, src);
  }

  // Ratios measured on the pairs (0, i); each must have its integer part
  // resolved (no "ratio_fractional" flag).
  static FrequencyRatios from_records(
      const std::vector<MeasurementRecord<Scalar>>& records,
      std::size_t n_oscillators) {
    if (n_oscillators < 2)
      throw std::invalid_argument(
          "FrequencyRatios: need at least two oscillators");
    FrequencyRatios out;
    out.source = Source::measured;
    out.values.assign(n_oscillators, Scalar(0));
    out.values[0] = Scalar(1);
    for (std::size_t i = 1; i < n_oscillators; ++i) {
      const MeasurementRecord<Scalar>* found = nullptr;
      for (const auto& rec : records) {
        if (rec.pair == std::pair<int, int>{0, static_cast<int>(i)}) {
          found = &rec;
          break;
        }
      }
      if (!found)
        throw std::invalid_argument(
            "FrequencyRatios: no record for pair (0, " + std::to_string(i) +
            ")");
      for (const auto& flag : found->flags) {
        if (flag == "ratio_fractional")
          throw std::invalid_argument(
              "FrequencyRatios: record (0, " + std::to_string(i) +
              ") has an unresolved fractional ratio");
      }
      if (!(found->ratio > Scalar(0)))
        throw std::invalid_argument("FrequencyRatios: nonpositive ratio");
      out.values[i] = found->ratio;
    }
    return out;
  }

  Scalar max_pairwise_ratio() const {
    Scalar lo = values[0];
    Scalar hi = values[0];
    for (const Scalar v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi / lo;
  }
};

// Measurement pairs method 2 consumes, in row order:
// (0,1), (0,2), (1,2), (0,3), ..., (0,n)
inline std::vector<std::pair<int, int>> canonical_pairs(int n_oscillators) {
  if (n_oscillators < 3)
    throw std::invalid_argument("canonical_pairs: need at least 3 oscillators");
  std::vector<std::pair<int, int>> out{{0, 1}, {0, 2}, {1, 2}};
  for (int i = 3; i < n_oscillators; ++i) out.push_back({0, i});
  return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> system_matrix_rate(
    const FrequencyRatios<Scalar>& ratios) {
  const int m = static_cast<int>(ratios.values.size());
  if (m < 3)
    throw std::invalid_argument("system_matrix_rate: need at least 3 oscillators");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, m);
  const auto& r = ratios.values;
  M(0, 0) = r[1] * r[1];
  M(0, 1) = Scalar(1);
  M(1, 0) = r[2] * r[2];
  M(1, 2) = Scalar(1);
  M(2, 1) = (r[2] / r[1]) * (r[2] / r[1]);
  M(2, 2) = Scalar(1);
  for (int i = 3; i < m; ++i) {
    M(i, 0) = r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    M(i, i) = Scalar(1);
  }
  return M;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> system_matrix_inverse(
    const FrequencyRatios<Scalar>& ratios) {
  const int m = static_cast<int>(ratios.values.size());
  if (m < 3)
    throw std::invalid_argument(
        "system_matrix_inverse: need at least 3 oscillators");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> W =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, m);
  const auto& r = ratios.values;
  const Scalar r1s = r[1] * r[1];
  const Scalar r2s = r[2] * r[2];
  W(0, 0) = Scalar(1) / (Scalar(2) * r1s);
  W(0, 1) = Scalar(1) / (Scalar(2) * r2s);
  W(0, 2) = -W(0, 1);
  W(1, 0) = Scalar(0.5);
  W(1, 1) = -r1s / (Scalar(2) * r2s);
  W(1, 2) = -W(1, 1);
  W(2, 0) = -r2s / (Scalar(2) * r1s);
  W(2, 1) = Scalar(0.5);
  W(2, 2) = Scalar(0.5);
  for (int i = 3; i < m; ++i) {
    const Scalar ris = r[static_cast<std::size_t>(i)] *
                       r[static_cast<std::size_t>(i)];
    W(i, 0) = -ris / (Scalar(2) * r1s);
    W(i, 1) = -ris / (Scalar(2) * r2s);
    W(i, 2) = ris / (Scalar(2) * r2s);
    W(i, i) = Scalar(1);
  }
  return W;
}

template <typename Scalar>
Scalar infinity_norm(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M) {
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Scalar>
Scalar condition_number_inf(const FrequencyRatios<Scalar>& ratios) {
  return infinity_norm(system_matrix_rate(ratios)) *
         infinity_norm(system_matrix_inverse(ratios));
}

template <typename Scalar>
Scalar condition_bound(Scalar max_pairwise_ratio) {
  const Scalar L2 = max_pairwise_ratio * max_pairwise_ratio;
  return (Scalar(1) + L2) * (Scalar(1) + Scalar(1.5) * L2);
}

inline constexpr double ill_conditioned_threshold = 1e6;

template <typename Scalar = double>
struct VolatilitySolution {
  std::vector<Scalar> sigma_sq_T0;  // sigma_i^2(T_0), accumulated variance
  Scalar kappa_inf = Scalar(0);
  Scalar kappa_bound = Scalar(0);
  Scalar residual_inf = Scalar(0);
  RecoveryMethod method = RecoveryMethod::method2_general;
  std::vector<std::string> flags;
};

template <typename Scalar = double>
struct Method1Result {
  std::pair<int, int> pair{0, 1};
  Scalar sigma_sq_T0_sampled = Scalar(0);  // sigma_i^2(T_0)
  Scalar sigma_sq_T0_sampler = Scalar(0);  // sigma_0^2(T_0)
  Scalar assumed_ratio = Scalar(0);        // f_i / f_0
};

// Method 1 on one record of a pair (0, i), with the measurement
// accumulated over the sampler's own period T_0.
template <typename Scalar>
Method1Result<Scalar> recover_method1(const MeasurementRecord<Scalar>& record,
                                      Scalar ratio) {
  if (record.pair.first != 0)
    throw std::invalid_argument(
        "recover_method1: record must be sampled by oscillator 0");
  if (!(ratio > Scalar(0)))
    throw std::invalid_argument("recover_method1: ratio must be > 0");
  const Scalar acc_sq = record.total_jitter.value * record.total_jitter.value;
  Method1Result<Scalar> out;
  out.pair = record.pair;
  out.assumed_ratio = ratio;
  out.sigma_sq_T0_sampled = acc_sq / (Scalar(1) + ratio * ratio * ratio);
  out.sigma_sq_T0_sampler = out.sigma_sq_T0_sampled * ratio;
  return out;
}

namespace detail {

template <typename Scalar>
const MeasurementRecord<Scalar>& find_record(
    const std::vector<MeasurementRecord<Scalar>>& records,
    std::pair<int, int> pair) {
  for (const auto& rec : records)
    if (rec.pair == pair) return rec;
  throw std::invalid_argument("recovery: missing measurement for pair (" +
                              std::to_string(pair.first) + ", " +
                              std::to_string(pair.second) + ")");
}

// Shared tail: condition figures, residual on the accumulated canonical
// system, and the quality flags.
template <typename Scalar>
void finish_solution(
    const FrequencyRatios<Scalar>& ratios,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
    const std::vector<const MeasurementRecord<Scalar>*>& ordered,
    VolatilitySolution<Scalar>& out) {
  const int m = static_cast<int>(ratios.values.size());
  const auto M = system_matrix_rate(ratios);
  out.kappa_inf = condition_number_inf(ratios);
  out.kappa_bound = condition_bound(ratios.max_pairwise_ratio());

  const auto pairs = canonical_pairs(m);
  Scalar residual = Scalar(0);
  for (int row = 0; row < m; ++row) {
    const int i = pairs[static_cast<std::size_t>(row)].first;
    const Scalar rho_i = ratios.values[static_cast<std::size_t>(i)];
    const Scalar acc =
        ordered[static_cast<std::size_t>(row)]->total_jitter.value;
    // row in units accumulated over T_i: (T_i/T_0) * rate row = acc^2
    const Scalar lhs = (M.row(row) * x).value() / rho_i;
    residual = std::max(residual, std::abs(lhs - acc * acc));
  }
  out.residual_inf = residual;

  out.sigma_sq_T0.assign(x.data(), x.data() + m);
  for (int i = 0; i < m; ++i) {
    if (x(i) < Scalar(0))
      out.flags.push_back("negative_variance_osc" + std::to_string(i));
  }
  if (static_cast<double>(out.kappa_inf) > ill_conditioned_threshold)
    out.flags.push_back("ill_conditioned");
}

template <typename Scalar>
std::vector<const MeasurementRecord<Scalar>*> ordered_records(
    const std::vector<MeasurementRecord<Scalar>>& records, int m) {
  std::vector<const MeasurementRecord<Scalar>*> out;
  for (const auto& pair : canonical_pairs(m))
    out.push_back(&find_record(records, pair));
  return out;
}

// right-hand side in T_0-accumulated units: acc(T_i)^2 * (T_0/T_i)
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs_T0(
    const FrequencyRatios<Scalar>& ratios,
    const std::vector<const MeasurementRecord<Scalar>*>& ordered) {
  const int m = static_cast<int>(ratios.values.size());
  const auto pairs = canonical_pairs(m);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(m);
  for (int row = 0; row < m; ++row) {
    const int i = pairs[static_cast<std::size_t>(row)].first;
    const Scalar rho_i = ratios.values[static_cast<std::size_t>(i)];
    const Scalar acc =
        ordered[static_cast<std::size_t>(row)]->total_jitter.value;
    y(row) = acc * acc * rho_i;
  }
  return y;
}

}  // namespace detail

// Method 2 for exactly three oscillators: the accumulated canonical 3x3
// system solved directly by a rank-revealing factorization. Serves as the
// independent route against recover_method2_general.
template <typename Scalar>
VolatilitySolution<Scalar> recover_method2_3osc(
    const std::vector<MeasurementRecord<Scalar>>& records,
    const FrequencyRatios<Scalar>& ratios) {
  if (ratios.values.size() != 3)
    throw std::invalid_argument(
        "recover_method2_3osc: exactly three oscillators required");
  const auto ordered = detail::ordered_records(records, 3);
  const auto& r = ratios.values;

  // rows in the units each measurement is taken in: pair (i,j) accumulated
  // over T_i, i.e. (T_i/T_0) x scaled rate row
  Eigen::Matrix<Scalar, 3, 3> M;
  const Scalar tau1 = Scalar(1) / r[1];  // T_1/T_0
  M << r[1] * r[1], Scalar(1), Scalar(0),
       r[2] * r[2], Scalar(0), Scalar(1),
       Scalar(0), tau1 * (r[2] / r[1]) * (r[2] / r[1]), tau1;
  Eigen::Matrix<Scalar, 3, 1> y;
  for (int row = 0; row < 3; ++row) {
    const Scalar acc = ordered[static_cast<std::size_t>(row)]->total_jitter.value;
    y(row) = acc * acc;
  }
  const Eigen::Matrix<Scalar, 3, 1> x = M.colPivHouseholderQr().solve(y);

  VolatilitySolution<Scalar> out;
  out.method = RecoveryMethod::method2_3osc;
  detail::finish_solution(ratios, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(x),
                          ordered, out);
  return out;
}

// Method 2 for any number of oscillators >= 3, through the closed-form
// inverse of the rate system.
template <typename Scalar>
VolatilitySolution<Scalar> recover_method2_general(
    const std::vector<MeasurementRecord<Scalar>>& records,
    const FrequencyRatios<Scalar>& ratios) {
  const int m = static_cast<int>(ratios.values.size());
  if (m < 3)
    throw std::invalid_argument(
        "recover_method2_general: need at least 3 oscillators");
  const auto ordered = detail::ordered_records(records, m);
  const auto y = detail::rhs_T0(ratios, ordered);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x =
      system_matrix_inverse(ratios) * y;

  VolatilitySolution<Scalar> out;
  out.method = RecoveryMethod::method2_general;
  detail::finish_solution(ratios, x, ordered, out);
  return out;
}

}  // namespace rojt
