#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nmago/keller_osserman.hpp"
#include "nmago/problem.hpp"
#include "nmago/scalar_fn.hpp"

namespace nmago {

enum class WeightVerdict { InClass, NotInClass, Inconclusive };

[[nodiscard]] std::string to_string(WeightVerdict v);

struct WeightClass {
  WeightVerdict verdict = WeightVerdict::Inconclusive;
  std::string reason;
};

/// Membership of p in the class of weights that decrease, blow up at 0+ and
/// have a divergent integral of P^{(N-1)/N} at 0+, where P(t) = int_t^1 p.
/// Reasons for NotInClass: "p not decreasing", "p bounded at 0",
/// "P bounded at 0", "P_infty integral converges".
[[nodiscard]] WeightClass validate_weight_class(const ScalarFn& p, int N);

/// P(t) = int_t^1 p and phi(t) = int_t^1 (N/(N-1) P)^{(N-1)/N}, tabulated on
/// nodes that are uniform on [1/2, 1] and geometric (four per octave) below,
/// with a power or logarithmic tail model under the smallest node.
class PhiProfile {
 public:
  PhiProfile(ScalarFn p, int N);

  [[nodiscard]] int dimension() const { return N_; }
  [[nodiscard]] const ScalarFn& weight() const { return p_; }

  [[nodiscard]] double p(double t) const { return p_(t); }
  [[nodiscard]] double P(double t) const;
  [[nodiscard]] double phi(double t) const;
  [[nodiscard]] double dphi(double t) const;   // -(N/(N-1) P)^{(N-1)/N}
  [[nodiscard]] double ddphi(double t) const;  // p (N/(N-1) P)^{-1/N}
  [[nodiscard]] double S(double t) const;      // phi phi'' / phi'^2

  /// Ascending nodes and phi there.
  [[nodiscard]] std::span<const double> t() const { return t_; }
  [[nodiscard]] std::span<const double> values() const { return phi_; }
  /// -phi' ~ alpha t^{-s} on the last decade of nodes: returns s.
  [[nodiscard]] double tail_exponent() const { return tail_s_; }
  /// phi(0+) = infinity according to the tail model (s >= 1 within tolerance).
  [[nodiscard]] bool tail_diverges() const { return tail_s_ >= 1.0 - 2e-2; }

 private:
  [[nodiscard]] double q(double t) const { return -dphi(t); }

  ScalarFn p_;
  int N_;
  std::vector<double> t_;
  std::vector<double> phi_;
  double tail_s_ = 0.0;
};

[[nodiscard]] PhiProfile build_P_phi(const ScalarFn& p, int N);

enum class WeightTransform { ShrinkScale, Amplify };

/// ShrinkScale(eps): t -> eps p(2t).  Amplify(M): t -> M p(t).
[[nodiscard]] ScalarFn transform_weight(const ScalarFn& p, WeightTransform mode, double factor);

struct Envelope {
  double c = 0.0;
  double d = 0.0;
};

/// c = min and d = max of K(r) / p(1 - r) on [r_lo, 1 - 1e-8].  Throws
/// AssumptionError ("envelope mismatch") when the ratio drifts by more than a
/// factor 1e3 across the window.
[[nodiscard]] Envelope fit_envelope(const ScalarFn& K, const ScalarFn& p, double r_lo = 0.5);

struct WValue {
  double w = 0.0;
  double dw = 0.0;
  double ddw = 0.0;
  double y = 0.0;    // (1 - r^2) / 2
  double phi = 0.0;  // phi(y)
  double s = 0.0;    // k phi(y)^{N/(2N-1)}, the argument of g
  double g1 = 0.0;   // g'(s)
  double g2 = 0.0;   // g''(s)
};

/// r -> g(k phi^{N/(2N-1)}(y(r))) with its first two derivatives.
class WFunction {
 public:
  WFunction(std::shared_ptr<const KOProfile> ko, std::shared_ptr<const PhiProfile> phi, double k);

  [[nodiscard]] WValue eval(double r) const;
  [[nodiscard]] double operator()(double r) const { return eval(r).w; }
  [[nodiscard]] double k() const { return k_; }
  [[nodiscard]] const KOProfile& ko() const { return *ko_; }
  [[nodiscard]] const PhiProfile& phi_profile() const { return *phi_; }
  /// False where g(s) left the range covered before the overflow guard.
  [[nodiscard]] bool within_domain(double r) const;

 private:
  std::shared_ptr<const KOProfile> ko_;
  std::shared_ptr<const PhiProfile> phi_;
  double k_;
};

[[nodiscard]] WFunction build_w(std::shared_ptr<const KOProfile> ko,
                                std::shared_ptr<const PhiProfile> phi, double k);

/// ResidualReport of LHS(w) - K(r) f(w) with the factored evaluation and the
/// auxiliary quantities of the construction.
struct InequalityReport : ResidualReport {
  std::vector<double> factored_lhs;
  std::vector<double> delta;
  std::vector<double> theta;
  std::vector<double> S;
  std::vector<double> bracket;  // delta + N(N-2)/(N-1) (1/H) P/p
  std::vector<double> excluded;  // radii dropped because H(w) vanished
  double max_cross_rel_error = 0.0;
  [[nodiscard]] double min_margin() const;
  [[nodiscard]] double max_margin() const;
};

[[nodiscard]] InequalityReport eval_inequality_residual(const WFunction& w, const ProblemSpec& spec,
                                                        std::span<const double> radii);

/// 120 uniform radii on (0, 0.9] and 80 with 1 - r geometric from 0.1 to 1e-6.
[[nodiscard]] std::vector<double> certification_radii();

struct BoundInputs {
  ScalarFn p = ScalarFn::power_singular(3.0);
  double a = 1.0;
  double envelope_r_lo = 0.5;
  int max_halvings = 40;
  int max_doublings = 40;
  double sub_safety = 0.99;
  double super_safety = 1.01;
  std::vector<double> radii = certification_radii();
};

struct BoundFamily {
  int N = 2;
  ScalarFn p;
  ScalarFn p_sub;  // eps p(2t)
  ScalarFn p_sup;  // M p(t)
  double eps = 0.0;
  double M = 0.0;
  double c = 0.0;
  double d = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  WeightClass weight_class;
  std::shared_ptr<const KOProfile> ko;
  std::shared_ptr<const PhiProfile> phi_sub;
  std::shared_ptr<const PhiProfile> phi_sup;
  std::shared_ptr<const WFunction> w1;
  std::shared_ptr<const WFunction> w2;
  InequalityReport sub_report;
  InequalityReport super_report;
  bool w1_blows_up = false;
  bool w2_blows_up = false;
  std::vector<std::string> notes;
};

/// Halving search for k1 (sub-solution: all margins <= 0) and doubling search
/// for k2 (super-solution: all margins >= 0), each on its own transformed
/// weight.  Throws PreconditionError when p is not in class, the
/// Keller-Osserman condition is not established or H_inf is absent, and
/// DivergenceError ("no certified bounds") when a search is exhausted.
[[nodiscard]] BoundFamily find_k_bounds(const ProblemSpec& spec, const BoundInputs& inputs = {});

}  // namespace nmago
