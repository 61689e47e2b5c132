#include "nmago/problem.hpp"

#include <algorithm>
#include <cmath>

#include "nmago/error.hpp"

namespace nmago {

void ProblemSpec::check() const {
  if (dimension < 2) throw DomainError("dimension must be >= 2");
}

void ResidualReport::push(double r, double l, double rr) {
  const double m = l - rr;
  if (!margins.empty()) {
    const bool had_pos = std::any_of(margins.begin(), margins.end(), [](double v) { return v > 0; });
    const bool had_neg = std::any_of(margins.begin(), margins.end(), [](double v) { return v < 0; });
    if ((m > 0 && had_neg) || (m < 0 && had_pos)) uniform_sign = false;
  }
  radii.push_back(r);
  lhs.push_back(l);
  rhs.push_back(rr);
  margins.push_back(m);
  max_abs_margin = std::max(max_abs_margin, std::abs(m));
}

double eval_radial_operator(int N, double dz, double ddz, double r, bool root) {
  if (N < 2) throw DomainError("dimension must be >= 2");
  if (r < 0.0) throw DomainError("radius must be non-negative");
  double det = 0.0;
  if (r == 0.0) {
    det = std::pow((N - 1) * ddz, N);
  } else {
    const double radial = (N - 1) / r * dz;
    const double tangential = ddz + (N - 2) / r * dz;
    det = radial * std::pow(tangential, N - 1);
  }
  if (!root) return det;
  if (det < 0.0) throw ConvexityError("negative determinant: (N-1)-convexity lost");
  return std::pow(det, 1.0 / (N - 1));
}

double dense_determinant(std::vector<double> a, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) pivot = row;
    }
    if (a[pivot * n + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      det = -det;
    }
    const double p = a[col * n + col];
    det *= p;
    for (int row = col + 1; row < n; ++row) {
      const double factor = a[row * n + col] / p;
      for (int k = col; k < n; ++k) a[row * n + k] -= factor * a[col * n + k];
    }
  }
  return det;
}

double full_hessian_oracle(int N, const std::function<double(double)>& dzeta,
                           const std::function<double(double)>& ddzeta,
                           std::span<const double> x) {
  if (N < 2 || static_cast<int>(x.size()) != N) {
    throw DomainError("point dimension must equal N >= 2");
  }
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double r = std::sqrt(r2);
  if (r == 0.0) throw DomainError("oracle refuses |x| = 0; use the r = 0 branch");
  const double d1 = dzeta(r);
  const double d2 = ddzeta(r);
  // D^2 z = zeta'' x x^T / r^2 + (zeta'/r)(I - x x^T / r^2)
  std::vector<double> hess(static_cast<std::size_t>(N * N));
  double trace = 0.0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double proj = x[i] * x[j] / r2;
      const double id = (i == j) ? 1.0 : 0.0;
      hess[i * N + j] = d2 * proj + d1 / r * (id - proj);
    }
    trace += hess[i * N + i];
  }
  std::vector<double> m(hess.size());
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) m[i * N + j] = (i == j ? trace : 0.0) - hess[i * N + j];
  }
  return dense_determinant(std::move(m), N);
}

double radial_lhs(int N, double du, double ddu, double r) {
  if (r == 0.0) {
    const double base = (N - 1) * ddu;
    if (base < 0.0) throw ConvexityError("u''(0) < 0: (N-1)-convexity lost");
    return std::pow(base, static_cast<double>(N) / (N - 1));
  }
  const double radial = (N - 1) / r * du;
  if (radial < 0.0) throw ConvexityError("u' < 0: (N-1)-convexity lost");
  return std::pow(radial, 1.0 / (N - 1)) * (ddu + (N - 2) / r * du);
}

double eval_pde_residual(const ProblemSpec& spec, double u, double du, double ddu, double r) {
  spec.check();
  if (!(r > 0.0 && r < 1.0)) throw DomainError("residual radius must lie in (0, 1)");
  if (!(du > 0.0)) throw ConvexityError("u' <= 0: (N-1)-convexity lost");
  if (!(u > 0.0)) throw DomainError("u must be positive (f is defined on (0, inf))");
  return radial_lhs(spec.dimension, du, ddu, r) - spec.K(r) * spec.f(u);
}

double lipschitz_estimate(const ScalarFn& f, double lo, double hi, int samples) {
  if (samples < 2 || !(hi > lo)) return 0.0;
  double best = 0.0;
  double prev_x = lo;
  double prev_f = f(lo);
  for (int i = 1; i < samples; ++i) {
    const double x = lo + (hi - lo) * i / (samples - 1);
    const double fx = f(x);
    best = std::max(best, std::abs(fx - prev_f) / (x - prev_x));
    prev_x = x;
    prev_f = fx;
  }
  return best;
}

AssumptionReport validate_assumptions(const ProblemSpec& spec, int n_samples) {
  AssumptionReport rep;
  if (spec.dimension < 2) rep.notes.emplace_back("dimension < 2");
  n_samples = std::max(n_samples, 2);

  // f on a log-spaced grid of (1e-6, 1e6); compare in log space so that growth
  // beyond the double range is still judged correctly
  std::vector<double> s(static_cast<std::size_t>(n_samples));
  std::vector<double> logf(s.size());
  std::vector<double> fv(s.size());
  for (int i = 0; i < n_samples; ++i) {
    s[i] = std::pow(10.0, -6.0 + 12.0 * i / (n_samples - 1));
    fv[i] = spec.f(s[i]);
    logf[i] = spec.f.log_value(s[i]);
    if (!(fv[i] > 0.0)) rep.f_positive = false;  // +inf counts as positive, NaN does not
    if (std::isinf(fv[i])) ++rep.f_overflowed_samples;
  }
  for (int i = 1; i < n_samples; ++i) {
    const bool finite_pair = std::isfinite(fv[i]) && std::isfinite(fv[i - 1]);
    const bool decreasing = finite_pair ? fv[i] < fv[i - 1] - 1e-12 * std::abs(fv[i - 1])
                                        : logf[i] < logf[i - 1] - 1e-12 * std::abs(logf[i - 1]);
    if (decreasing) rep.f_nondecreasing = false;
    if (finite_pair) {
      const double slope = std::abs(fv[i] - fv[i - 1]) / (s[i] - s[i - 1]);
      if (!std::isfinite(slope)) rep.f_lipschitz_finite = false;
      rep.f_max_local_slope = std::max(rep.f_max_local_slope, slope);
    }
  }
  if (!rep.f_positive) rep.notes.emplace_back("f is not positive on (0, inf)");
  if (!rep.f_nondecreasing) rep.notes.emplace_back("f is decreasing somewhere on (0, inf)");
  if (!rep.f_lipschitz_finite) rep.notes.emplace_back("f has an unbounded local slope");
  if (rep.f_overflowed_samples > 0) {
    rep.notes.push_back("f exceeds the double range at " +
                        std::to_string(rep.f_overflowed_samples) + " large samples");
  }

  // K on [0, 1 - 1e-6]
  const int nk = 4 * n_samples;
  double prev = spec.K(0.0);
  double max_jump = 0.0;
  for (int i = 0; i < nk; ++i) {
    const double r = (1.0 - 1e-6) * i / (nk - 1);
    const double k = spec.K(r);
    if (!(k > 0.0) || !std::isfinite(k)) rep.K_positive = false;
    if (i > 0 && r < 0.9) {
      max_jump = std::max(max_jump, std::abs(k - prev) / std::max(std::abs(prev), 1e-300));
    }
    prev = k;
  }
  // with 4n uniform samples a continuous K changes little between neighbours away from r = 1
  if (!std::isfinite(max_jump) || max_jump > 1.0) {
    rep.K_continuous = false;
    rep.notes.emplace_back("K jumps between neighbouring samples on [0, 0.9]");
  }
  if (!rep.K_positive) rep.notes.emplace_back("K is not positive and finite on [0, 1)");

  // growth of K towards r = 1 on the last three decades of 1 - r
  const double k3 = spec.K(1.0 - 1e-3);
  const double k6 = spec.K(1.0 - 1e-6);
  if (k3 > 0.0 && k6 > 0.0 && std::isfinite(k3)) {
    const double slope = std::log(k6 / k3) / std::log(1e-3);  // d log K / d log(1 - r)
    const bool symbolic = spec.K.kind() == FnKind::PowerSingular && spec.K.center() &&
                          *spec.K.center() == 1.0 && spec.K.exponent() > 0.0;
    if (slope < -0.5 || symbolic || !std::isfinite(k6)) {
      rep.K_singular_at_one = true;
      rep.notes.emplace_back("K is singular at r = 1");
    }
  }
  return rep;
}

}  // namespace nmago
