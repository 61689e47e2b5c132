#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nmago/scalar_fn.hpp"

namespace nmago {

/// The triple (N, f, K) of det^{1/(N-1)}(Laplacian(z) I - D^2 z) = K(|x|) f(z) on the unit ball.
struct ProblemSpec {
  int dimension = 2;
  ScalarFn f = ScalarFn::constant(1.0);
  ScalarFn K = ScalarFn::constant(1.0);

  /// Throws DomainError unless dimension >= 2.
  void check() const;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Numerical record of an (in)equality LHS vs RHS sampled at radii.
struct ResidualReport {
  std::vector<double> radii;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> margins;  // lhs - rhs
  double max_abs_margin = 0.0;
  bool uniform_sign = true;  // all margins share a sign (zeros count as either)

  void push(double r, double l, double rr);
};

/// det(Laplacian(z) I - D^2 z) for z(x) = zeta(|x|), from the radial eigenvalues.
///
/// At r > 0 this is ((N-1)/r) zeta' [zeta'' + (N-2)/r zeta']^{N-1}; at r = 0 the
/// caller passes ddz = zeta''(0) and the value is ((N-1) zeta''(0))^N (dz ignored).
/// With `root = true` the positive (N-1)-th root is returned instead, and a
/// negative determinant raises ConvexityError.
[[nodiscard]] double eval_radial_operator(int N, double dz, double ddz, double r,
                                          bool root = false);

/// Independent oracle for eval_radial_operator: assembles the full N x N matrix
/// Laplacian(z) I - D^2 z at x and takes its determinant by pivoted elimination.
/// Refuses |x| = 0.
[[nodiscard]] double full_hessian_oracle(int N, const std::function<double(double)>& dzeta,
                                         const std::function<double(double)>& ddzeta,
                                         std::span<const double> x);

/// Determinant of a dense row-major n x n matrix by Gaussian elimination with
/// partial pivoting.
[[nodiscard]] double dense_determinant(std::vector<double> a, int n);

/// ((N-1)/r du)^{1/(N-1)} [ddu + (N-2)/r du] - K(r) f(u) for r in (0, 1).
[[nodiscard]] double eval_pde_residual(const ProblemSpec& spec, double u, double du, double ddu,
                                       double r);

/// Left-hand side of the radial ODE, ((N-1)/r du)^{1/(N-1)} [ddu + (N-2)/r du].
/// At r = 0 this is ((N-1) ddu)^{N/(N-1)} (du ignored).
[[nodiscard]] double radial_lhs(int N, double du, double ddu, double r);

struct AssumptionReport {
  bool f_positive = true;
  bool f_nondecreasing = true;
  bool f_lipschitz_finite = true;
  bool K_positive = true;
  bool K_continuous = true;
  bool K_singular_at_one = false;
  int f_overflowed_samples = 0;  // samples where f exceeds double range (counted positive)
  double f_max_local_slope = 0.0;
  std::vector<std::string> notes;

  [[nodiscard]] bool passed() const {
    return f_positive && f_nondecreasing && f_lipschitz_finite && K_positive && K_continuous;
  }
};

/// Samples f on a log grid of (1e-6, 1e6) (n_samples points) and K on
/// [0, 1 - 1e-6] (4 n_samples points); never throws on failing checks.
[[nodiscard]] AssumptionReport validate_assumptions(const ProblemSpec& spec, int n_samples = 64);

/// Largest finite-difference slope of f over `samples` uniform points on [lo, hi].
[[nodiscard]] double lipschitz_estimate(const ScalarFn& f, double lo, double hi,
                                        int samples = 257);

}  // namespace nmago
