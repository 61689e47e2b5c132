#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace nmago {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class Fn>
Panel gauss_kronrod_15(const Fn& fn, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = fn(centre);
  double kronrod = fc * kKronrodW[7];
  double gauss = fc * kGaussW[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodX[j];
    const double pair = fn(centre - dx) + fn(centre + dx);
    kronrod += kKronrodW[j] * pair;
    if (j % 2 == 1) gauss += kGaussW[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return Panel{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of fn over [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |value|).  Only interior points are
/// sampled, so integrable endpoint singularities are tolerated.
template <class Fn>
QuadResult integrate(const Fn& fn, double a, double b, const QuadOptions& opts = {}) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  if (b < a) {
    out = integrate(fn, b, a, opts);
    out.value = -out.value;
    return out;
  }
  std::priority_queue<detail::Panel> heap;
  heap.push(detail::gauss_kronrod_15(fn, a, b));
  out.evaluations = 15;
  double value = heap.top().value;
  double error = heap.top().error;
  int subdivisions = 0;
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value)) &&
         subdivisions < opts.max_subdivisions) {
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // panel at machine resolution
      heap.push(worst);
      break;
    }
    const detail::Panel left = detail::gauss_kronrod_15(fn, worst.a, mid);
    const detail::Panel right = detail::gauss_kronrod_15(fn, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // re-sum to shed accumulated cancellation from the running updates
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.abs_error = error;
  out.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  return out;
}

/// Gauss-Legendre nodes and weights mapped to [0, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre_unit(int n);

}  // namespace nmago
