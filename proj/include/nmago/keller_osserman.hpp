#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmago/quadrature.hpp"
#include "nmago/scalar_fn.hpp"

namespace nmago {

enum class KOClass { Diverges, Converges, Inconclusive };

[[nodiscard]] std::string to_string(KOClass c);

enum class FMethod { Auto, Quadrature };

/// F(tau) = integral of f over (0, tau].  `Auto` uses the closed-form primitive;
/// `Quadrature` integrates numerically after the substitution s = tau x^2, which
/// absorbs integrable singularities of f at 0.  Throws DivergenceError ("F undefined")
/// when the integral diverges at 0.
[[nodiscard]] double eval_F(const ScalarFn& f, double tau, FMethod method = FMethod::Auto);
/// log F(tau), finite even where F overflows.
[[nodiscard]] double log_F(const ScalarFn& f, double tau);

/// Outcome of the geometric-ladder divergence test shared by the Keller-Osserman
/// classifier and the weight-class test at 0+.
struct LadderOutcome {
  KOClass verdict = KOClass::Inconclusive;  // Diverges == integral infinite
  std::vector<double> slopes;       // local log-log slope of the effective integrand
  std::vector<double> increments;   // integral between consecutive rungs
};

struct LadderOptions {
  double slope_margin = 0.05;
  int windows = 5;
  double saturation_tol = 1e-8;
};

/// Decides whether an integral towards a singular end diverges, from rung
/// positions log_x (increasing towards the end), the log of the effective
/// integrand e(x) at each rung, and the integral of e between rungs.
/// e ~ x^s diverges iff s >= -1: Converges when the last `windows` slopes are all
/// below -1 - margin; Diverges when they are all above -1 + margin, or when the
/// per-rung increments never shrink over those windows (no saturation).
[[nodiscard]] LadderOutcome ladder_test(std::span<const double> log_x,
                                        std::span<const double> log_e,
                                        std::span<const double> increments,
                                        const LadderOptions& opts = {});

/// Is the integral of F^{-(N-1)/(2N-1)} to infinity divergent (i.e. does the
/// Keller-Osserman type condition hold)?  Ladder tau_j = 2^j up to ~1e12.
[[nodiscard]] LadderOutcome classify_ko_detail(const ScalarFn& f, int N);
[[nodiscard]] KOClass classify_ko(const ScalarFn& f, int N);

/// Checkpointed G(t) = integral_a^t ((2N-1)/(N-1) F)^{-(N-1)/(2N-1)}.
class GTable {
 public:
  GTable(ScalarFn f, int N, double a, double t_max, QuadOptions quad = {});

  /// G at any t > 0: checkpoint plus quadrature of the remaining piece.
  [[nodiscard]] double operator()(double t) const;
  /// The integrand 1 / g'(G(tau)) = ((2N-1)/(N-1) F(tau))^{-(N-1)/(2N-1)}.
  [[nodiscard]] double integrand(double tau) const;

  [[nodiscard]] std::span<const double> t() const { return t_; }
  [[nodiscard]] std::span<const double> values() const { return G_; }
  [[nodiscard]] double anchor() const { return a_; }

 private:
  ScalarFn f_;
  int N_;
  double a_;
  QuadOptions quad_;
  std::vector<double> t_;
  std::vector<double> G_;
};

/// g = G^{-1}, built by integrating g' = ((2N-1)/(N-1) F(g))^{(N-1)/(2N-1)}, g(0) = a
/// with an embedded Runge-Kutta pair.  Values between stored nodes are produced by
/// a single step from the preceding node.
class GInverse {
 public:
  static constexpr double kOverflowGuard = 1e300;

  GInverse(ScalarFn f, int N, double a,
           double s_max = std::numeric_limits<double>::infinity(), double rel_tol = 1e-12);

  [[nodiscard]] double operator()(double s) const;
  [[nodiscard]] double first_derivative(double s) const;
  [[nodiscard]] double second_derivative(double s) const;
  /// g'(s) and g''(s) from a known value g(s).
  [[nodiscard]] double first_derivative_at_value(double g) const;
  [[nodiscard]] double second_derivative_at_value(double g) const;

  /// Largest s covered.  When `truncated()`, g crossed the overflow guard there.
  [[nodiscard]] double domain_limit() const { return s_.back(); }
  [[nodiscard]] bool truncated() const { return truncated_; }
  [[nodiscard]] std::span<const double> s() const { return s_; }
  [[nodiscard]] std::span<const double> values() const { return g_; }

 private:
  [[nodiscard]] double log_rate(double g) const;  // log g'(.) at value g

  ScalarFn f_;
  int N_;
  double a_;
  double rel_tol_;
  std::vector<double> s_;
  std::vector<double> g_;
  bool truncated_ = false;
};

struct KOOptions {
  double a = 1.0;
  double t_max = 1e300;
  double s_max = std::numeric_limits<double>::infinity();
  QuadOptions quad{};
  double g_rel_tol = 1e-12;
  int H_ladder_rungs = 60;   // tau_j = a 2^j, j = 0..rungs
  int H_window = 10;
  double H_stability = 1e-3;
};

/// Everything derived from (f, N, a): G, g = G^{-1}, the H(tau) ladder,
/// H_inf and the divergence classification.  Immutable once built.
class KOProfile {
 public:
  KOProfile(ScalarFn f, int N, const KOOptions& opts = {});

  [[nodiscard]] int dimension() const { return N_; }
  [[nodiscard]] const ScalarFn& f() const { return f_; }
  [[nodiscard]] double anchor() const { return a_; }
  [[nodiscard]] KOClass classification() const { return classification_; }
  [[nodiscard]] const GTable& G() const { return *G_; }
  [[nodiscard]] const GInverse& g() const { return *g_; }
  [[nodiscard]] std::optional<double> H_inf() const { return H_inf_; }
  [[nodiscard]] std::span<const double> H_tau() const { return H_tau_; }
  [[nodiscard]] std::span<const double> H_values() const { return H_vals_; }
  [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

  /// H(tau) = G(tau) f(tau) ((2N-1)/(N-1) F(tau))^{-N/(2N-1)}, the closed form of
  /// -G G'' / (G')^2; H(a) = 0.
  [[nodiscard]] double H(double tau) const;

 private:
  ScalarFn f_;
  int N_;
  double a_;
  KOClass classification_ = KOClass::Inconclusive;
  std::shared_ptr<const GTable> G_;
  std::shared_ptr<const GInverse> g_;
  std::vector<double> H_tau_;
  std::vector<double> H_vals_;
  std::optional<double> H_inf_;
  std::vector<std::string> warnings_;
};

/// G table for (f, N, a) on [a, t_max]; warns through `warning` when (f2) is not
/// classified as holding.
[[nodiscard]] GTable build_G(const ScalarFn& f, int N, double a, double t_max);
[[nodiscard]] GInverse build_g(const ScalarFn& f, int N, double a,
                               double s_max = std::numeric_limits<double>::infinity());
[[nodiscard]] double eval_H(const KOProfile& profile, double tau);
/// H_inf when H varies by less than the stability threshold over the last window
/// of the geometric ladder; absent otherwise.
[[nodiscard]] std::optional<double> estimate_H_inf(const KOProfile& profile);

}  // namespace nmago
