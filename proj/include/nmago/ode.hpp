#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace nmago {

template <std::size_t Dim>
using State = std::array<double, Dim>;

template <std::size_t Dim>
struct StepResult {
  State<Dim> y{};
  State<Dim> dydx_end{};  // FSAL stage, derivative at the step end
  double error_norm = 0.0;
};

/// One Dormand-Prince 5(4) step from (x, y) of length h.
///
/// `dydx` must hold rhs(x, y).  The returned error norm is the max over
/// components of |err_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)), so a
/// value <= 1 means the step is acceptable.
template <std::size_t Dim, class Rhs>
StepResult<Dim> dormand_prince_step(const Rhs& rhs, double x, const State<Dim>& y,
                                    const State<Dim>& dydx, double h, double rel_tol,
                                    double abs_tol) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  State<Dim> tmp{};
  const State<Dim>& k1 = dydx;
  for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  const State<Dim> k2 = rhs(x + c2 * h, tmp);
  for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  const State<Dim> k3 = rhs(x + c3 * h, tmp);
  for (std::size_t i = 0; i < Dim; ++i)
    tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  const State<Dim> k4 = rhs(x + c4 * h, tmp);
  for (std::size_t i = 0; i < Dim; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  const State<Dim> k5 = rhs(x + c5 * h, tmp);
  for (std::size_t i = 0; i < Dim; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  const State<Dim> k6 = rhs(x + h, tmp);

  StepResult<Dim> out;
  for (std::size_t i = 0; i < Dim; ++i)
    out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  out.dydx_end = rhs(x + h, out.y);
  double norm = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) {
    const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * out.dydx_end[i]);
    const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out.y[i]));
    norm = std::max(norm, std::abs(err) / scale);
  }
  out.error_norm = norm;
  return out;
}

/// Standard step-size update for a fifth-order pair.
inline double next_step_size(double h, double error_norm) {
  if (std::isnan(error_norm)) return 0.2 * h;
  if (!(error_norm > 0.0)) return 5.0 * h;
  const double factor = 0.9 * std::pow(error_norm, -0.2);
  return h * std::clamp(factor, 0.2, 5.0);
}

}  // namespace nmago
