#pragma once

// Adaptive Gauss-Kronrod (7, 15) quadrature on a finite interval.

#include <array>
#include <cmath>
#include <limits>

namespace srgeo::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
Result gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = r * kronrod_nodes[i];
    const double sum = f(c - dx) + f(c + dx);
    kronrod += kronrod_weights[i] * sum;
    if (i % 2 == 1) gauss += gauss_weights[i / 2] * sum;
  }
  return {kronrod * r, std::abs((kronrod - gauss) * r), 15};
}

template <typename F>
Result adapt(F& f, double a, double b, double tol, int depth, const Result& whole) {
  if (whole.error <= tol || depth <= 0 || std::abs(b - a) < 1e-15 * std::abs(a + b)) {
    return whole;
  }
  const double m = 0.5 * (a + b);
  const Result left = gk15(f, a, m);
  const Result right = gk15(f, m, b);
  const Result l = adapt(f, a, m, 0.5 * tol, depth - 1, left);
  const Result rr = adapt(f, m, b, 0.5 * tol, depth - 1, right);
  return {l.value + rr.value, l.error + rr.error,
          whole.evaluations + l.evaluations + rr.evaluations};
}

}  // namespace detail

/// Integrates f over [a, b] to max(abs_tol, rel_tol * |integral|).
template <typename F>
Result integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                 int max_depth = 40) {
  const Result coarse = detail::gk15(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * std::abs(coarse.value));
  return detail::adapt(f, a, b, tol, max_depth, coarse);
}

}  // namespace srgeo::quad
