// Adaptive Gauss-Kronrod quadrature on a finite interval.
//
// Each segment is integrated with the 15-point Kronrod extension of the
// 7-point Gauss rule; |K15 - G7| serves as the segment error estimate.
// The segment with the largest estimate is bisected until the summed
// estimate meets the tolerance or the subdivision budget runs out.
//
// The interval starts pre-split into initial_segments pieces so that
// localized mass cannot slip between the nodes of a single coarse pass.
// A feature much narrower than (b - a) / (8 initial_segments) can still
// evade detection: size the interval to the integrand's scale.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rojt {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int segments = 0;
  bool converged = false;
};

class quadrature_error : public std::runtime_error {
 public:
  explicit quadrature_error(const std::string& what)
      : std::runtime_error(what) {}
};

namespace detail {

// Kronrod-15 abscissae (positive half; index 7 is the centre)
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};

inline constexpr double k15_weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

// Gauss-7 weights for the odd-index nodes above and the centre
inline constexpr double g7_weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

template <typename F>
inline void gauss_kronrod_15(F&& f, double a, double b, double& value,
                             double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k15 = k15_weights[7] * fc;
  double g7 = g7_weights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * gk_nodes[i];
    const double s = f(c - x) + f(c + x);
    k15 += k15_weights[i] * s;
    if (i % 2 == 1) g7 += g7_weights[i / 2] * s;
  }
  value = k15 * h;
  error = std::abs((k15 - g7) * h);
}

struct QuadSegment {
  double a, b, value, error;
};

}  // namespace detail

// Integrates f over [a, b] until the summed error estimate drops below
// max(abs_tol, rel_tol * |integral|). Throws quadrature_error if the
// subdivision budget is exhausted first.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    double rel_tol = 0.0,
                                    int max_segments = 4000,
                                    int initial_segments = 32) {
  if (!(b > a)) throw std::invalid_argument("integrate_adaptive: requires b > a");
  if (initial_segments < 1)
    throw std::invalid_argument(
        "integrate_adaptive: initial_segments must be >= 1");
  const int n0 = std::min(initial_segments, std::max(max_segments, 1));
  std::vector<detail::QuadSegment> segs;
  segs.reserve(static_cast<std::size_t>(n0) + 64);
  for (int i = 0; i < n0; ++i) {
    detail::QuadSegment s{a + (b - a) * i / n0, a + (b - a) * (i + 1) / n0,
                          0.0, 0.0};
    detail::gauss_kronrod_15(f, s.a, s.b, s.value, s.error);
    segs.push_back(s);
  }

  while (static_cast<int>(segs.size()) < max_segments) {
    double total = 0.0;
    double err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].value;
      err += segs[i].error;
      if (segs[i].error > segs[worst].error) worst = i;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total))) {
      return {total, err, static_cast<int>(segs.size()), true};
    }
    detail::QuadSegment seg = segs[worst];
    const double m = 0.5 * (seg.a + seg.b);
    detail::QuadSegment left{seg.a, m, 0.0, 0.0};
    detail::QuadSegment right{m, seg.b, 0.0, 0.0};
    detail::gauss_kronrod_15(f, left.a, left.b, left.value, left.error);
    detail::gauss_kronrod_15(f, right.a, right.b, right.value, right.error);
    segs[worst] = left;
    segs.push_back(right);
  }
  throw quadrature_error("integrate_adaptive: no convergence within " +
                         std::to_string(max_segments) + " segments");
}

}  // namespace rojt
