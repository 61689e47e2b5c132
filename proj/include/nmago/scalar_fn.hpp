#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nmago/interp.hpp"

namespace nmago {

enum class FnKind { Power, Exponential, Affine, Constant, PowerSingular, Tabulated, Polynomial };

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = true;
  bool hi_open = true;

  [[nodiscard]] bool contains(double x) const {
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }
};

/// Symbolic description of a real function of one variable.
///
/// Kinds and their formulas:
///   Power          scale * s^p              on (0, inf)
///   Exponential    scale * exp(rate * s)    on R
///   Affine         slope * s + intercept    on R
///   Constant       value                    on R
///   PowerSingular  scale * (center - s)^-g  on (-inf, center), or scale * s^-g on (0, inf)
///   Tabulated      monotone cubic through (x_i, y_i), constant outside the table
///   Polynomial     sum_i c_i s^i            on R
///
/// Every kind carries a closed-form primitive, which the quadrature-free paths
/// of the Keller-Osserman and weight constructions rely on.
class ScalarFn {
 public:
  ScalarFn() : ScalarFn(constant(1.0)) {}

  static ScalarFn power(double exponent, double scale = 1.0);
  static ScalarFn exponential(double scale = 1.0, double rate = 1.0);
  static ScalarFn affine(double slope, double intercept);
  static ScalarFn constant(double value);
  static ScalarFn power_singular(double exponent, double scale = 1.0,
                                 std::optional<double> center = std::nullopt);
  static ScalarFn tabulated(std::vector<double> xs, std::vector<double> ys);
  static ScalarFn polynomial(std::vector<double> coefficients);

  [[nodiscard]] double operator()(double s) const;
  [[nodiscard]] double derivative(double s) const;
  [[nodiscard]] double second_derivative(double s) const;
  /// log f(s) without forming f(s); stays finite where f overflows.
  [[nodiscard]] double log_value(double s) const;

  /// An antiderivative (fixed additive constant per kind).
  [[nodiscard]] double primitive(double s) const;
  /// lim_{s -> 0+} primitive(s), absent when the integral diverges at 0.
  [[nodiscard]] std::optional<double> primitive_at_zero() const;
  [[nodiscard]] double integral(double lo, double hi) const;
  /// log of the integral over (0, tau]; closed form for power/exponential growth.
  [[nodiscard]] double log_integral_from_zero(double tau) const;

  /// s -> factor * f(s)
  [[nodiscard]] ScalarFn scaled(double factor) const;
  /// s -> f(factor * s)
  [[nodiscard]] ScalarFn with_argument_scale(double factor) const;

  [[nodiscard]] FnKind kind() const { return kind_; }
  [[nodiscard]] Interval domain() const;
  /// Exponent of Power / PowerSingular kinds.
  [[nodiscard]] double exponent() const { return a_; }
  [[nodiscard]] double scale() const { return b_; }
  [[nodiscard]] double rate() const { return c_; }
  [[nodiscard]] double slope() const { return a_; }
  [[nodiscard]] double intercept() const { return b_; }
  [[nodiscard]] double value() const { return a_; }
  [[nodiscard]] std::optional<double> center() const { return center_; }
  [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }
  [[nodiscard]] const std::vector<double>& table_x() const { return xs_; }
  [[nodiscard]] const std::vector<double>& table_y() const { return ys_; }

  /// Short textual form in the CLI grammar, e.g. "power:2" or "power_singular:3,1,1".
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const ScalarFn& lhs, const ScalarFn& rhs);

 private:
  explicit ScalarFn(FnKind kind) : kind_(kind) {}

  FnKind kind_;
  // per-kind parameters, see the accessors for their meaning
  double a_ = 0.0;
  double b_ = 1.0;
  double c_ = 1.0;
  std::optional<double> center_;
  std::vector<double> coeffs_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  MonotoneCubic table_;
};

[[nodiscard]] std::string to_string(FnKind kind);
[[nodiscard]] FnKind fn_kind_from_string(const std::string& name);

/// Parses the CLI grammar KIND[:P1,P2,...]; throws ConfigError on failure.
[[nodiscard]] ScalarFn parse_scalar_fn(const std::string& text);

}  // namespace nmago
