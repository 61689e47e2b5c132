#pragma once

#include <span>
#include <vector>

namespace nmago {

/// Piecewise cubic Hermite interpolant on strictly increasing abscissae.
///
/// Two constructions are offered: `pchip` derives Fritsch-Carlson slopes from
/// the data (shape preserving, used for tabulated functions), `with_slopes`
/// takes caller-supplied derivatives and only limits them where they would
/// break monotonicity of the data (used for ODE output, where exact slopes
/// are known).  `hermite` uses the given slopes unchanged.  Outside the
/// table the interpolant extends by constants.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  static MonotoneCubic pchip(std::vector<double> xs, std::vector<double> ys);
  static MonotoneCubic with_slopes(std::vector<double> xs, std::vector<double> ys,
                                   std::vector<double> slopes);
  static MonotoneCubic hermite(std::vector<double> xs, std::vector<double> ys,
                               std::vector<double> slopes);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double derivative(double x) const;
  [[nodiscard]] double second_derivative(double x) const;
  /// Exact integral of the interpolant over [lo, hi] (constant extension outside).
  [[nodiscard]] double integral(double lo, double hi) const;

  [[nodiscard]] std::span<const double> xs() const { return xs_; }
  [[nodiscard]] std::span<const double> ys() const { return ys_; }
  [[nodiscard]] std::span<const double> slopes() const { return ms_; }
  [[nodiscard]] bool empty() const { return xs_.empty(); }
  [[nodiscard]] double front_x() const { return xs_.front(); }
  [[nodiscard]] double back_x() const { return xs_.back(); }

 private:
  MonotoneCubic(std::vector<double> xs, std::vector<double> ys, std::vector<double> ms);
  [[nodiscard]] std::size_t segment(double x) const;
  /// Integral of the cubic on segment i from xs_[i] to x (x inside the segment).
  [[nodiscard]] double partial_integral(std::size_t i, double x) const;

  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> ms_;
};

}  // namespace nmago
