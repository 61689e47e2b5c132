#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmago/interp.hpp"
#include "nmago/problem.hpp"

namespace nmago {

enum class SolveStatus { ReachedOne, BlewUp, Truncated };

[[nodiscard]] std::string to_string(SolveStatus s);

/// Constants of the local existence argument for the initial value problem
/// u(0) = u0, u'(0) = 0.
struct LocalIntervalPlan {
  double h_star = 0.0;  // half-width of the admissible band around u0
  double L = 0.0;       // Lipschitz bound of f on [u0 - h_star, u0 + h_star]
  double m = 0.0;       // f(u0 - h_star)
  double M = 0.0;       // L h_star + f(u0)
  double K_low = 0.0;   // inf K on [0, 1/2]
  double K_high = 0.0;  // sup K on [0, 1/2]
  double h = 0.0;       // selected interval length
  double contraction_bound = 0.0;
};

struct PicardDiagnostics {
  double h = 0.0;  // interval actually used after any halvings
  int iterations = 0;
  int halvings = 0;
  bool converged = false;
  double final_difference = 0.0;
  /// Largest ratio of successive sup-norm differences, over iterations whose
  /// previous difference is still above the round-off floor; 0 if none.
  double contraction_ratio = 0.0;
  std::vector<double> differences;
};

struct SolverOptions {
  int picard_nodes = 257;
  double picard_tol = 1e-12;  // scaled by max(1, u0)
  int picard_max_iter = 200;
  int max_halvings = 8;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double r_end = 1.0 - 1e-8;
  double blowup_threshold = 1e8;
  double max_step = 1.0 / 256;
  long max_steps = 2'000'000;
};

/// Grid solution of the radial problem together with its termination status.
/// Interpolation is a monotone piecewise cubic on (r, u) with slopes u' and on
/// (r, u') with slopes u''.  When u''' is stored, u'' between nodes comes from a
/// cubic Hermite on (r, u'') with slopes u'''.
struct RadialSolution {
  int N = 2;
  double u0 = 0.0;
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> du;
  std::vector<double> ddu;
  std::vector<double> dddu;  // from the differentiated ODE; may be empty
  SolveStatus status = SolveStatus::Truncated;
  std::optional<double> T;  // blow-up radius when status == BlewUp
  std::string reason;
  double u2_at_0 = 0.0;  // (1/(N-1)) (K(0) f(u0))^{(N-1)/N}
  LocalIntervalPlan plan;
  PicardDiagnostics picard;

  /// Rebuilds the interpolants; call after editing the grid.
  void finalize();
  [[nodiscard]] double end_radius() const { return r.back(); }
  [[nodiscard]] double u_at(double x) const;
  [[nodiscard]] double du_at(double x) const;
  /// u'' interpolant, else the derivative of the u' interpolant.
  [[nodiscard]] double ddu_at(double x) const;

 private:
  MonotoneCubic u_interp_;
  MonotoneCubic du_interp_;
  MonotoneCubic ddu_interp_;
};

/// u''' at r from the differentiated radial ODE; at r = 0 the limit
/// 2 (N-1) u''(0) K'(0) / ((N+1) K(0)).
[[nodiscard]] double third_derivative(const ProblemSpec& spec, double r, double u, double du,
                                      double ddu);

[[nodiscard]] LocalIntervalPlan plan_local_interval(const ProblemSpec& spec, double u0);

/// The integral operator u -> u0 + int_0^r t^{2-N}/(N-1) (int_0^t N s^{N-1} K f(u) ds)^{(N-1)/N} dt
/// discretised on Chebyshev nodes of [0, h].  Writing the inner integral as
/// t^N J(t) with J(t) = N int_0^1 s^{N-1} K f(u)(ts) ds gives
/// u'(t) = t J(t)^{(N-1)/N} / (N-1), which is regular at t = 0.
class PicardOperator {
 public:
  explicit PicardOperator(int N, int nodes = 257);

  struct Image {
    std::vector<double> u;
    std::vector<double> du;
    std::vector<double> ddu;
  };

  [[nodiscard]] std::vector<double> nodes(double h) const;
  /// One application to the node values `u` on [0, h].
  [[nodiscard]] Image apply(const ProblemSpec& spec, double u0, double h,
                            std::span<const double> u) const;
  [[nodiscard]] int size() const { return n_; }

 private:
  struct Weights;
  int N_;
  int n_;
  std::shared_ptr<const Weights> w_;
};

/// Picard iteration from u = u0 on [0, plan.h].  On success the result holds
/// the node values with status Truncated and reason "local interval", ready for
/// continue_ode; otherwise the reason is "picard stall" or "picard escape".
[[nodiscard]] RadialSolution picard_solve_local(const ProblemSpec& spec, double u0,
                                                const LocalIntervalPlan& plan,
                                                const SolverOptions& opts = {});

/// Adaptive Dormand-Prince integration of (u, v = u') from the end of `seed`
/// towards r = 1.
[[nodiscard]] RadialSolution continue_ode(const ProblemSpec& spec, const RadialSolution& seed,
                                          const SolverOptions& opts = {});

[[nodiscard]] RadialSolution solve_ivp(const ProblemSpec& spec, double u0,
                                       const SolverOptions& opts = {});

/// T from three radii where u crossed geometrically spaced levels, by Aitken
/// extrapolation of the crossing sequence.  Falls back to r3 when the
/// sequence is not contracting.
[[nodiscard]] double extrapolate_blowup(double r1, double r2, double r3);
/// Repeated Aitken extrapolation over any number of crossing radii (levels
/// spaced by a factor sqrt(10) up to the blow-up threshold).
[[nodiscard]] double extrapolate_blowup(std::span<const double> crossings);

}  // namespace nmago
