#include "nmago/interp.hpp"

#include <algorithm>
#include <cmath>

#include "nmago/error.hpp"

namespace nmago {

namespace {

void check_abscissae(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2 || xs.size() != ys.size()) {
    throw DomainError("interpolation table needs at least two (x, y) pairs of equal length");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw DomainError("interpolation abscissae must be strictly increasing");
    }
  }
}

// Fritsch-Carlson limiter: rescale a pair of end slopes so the Hermite cubic on a
// monotone segment stays monotone.
void limit_pair(double delta, double& m0, double& m1) {
  if (delta == 0.0) {
    m0 = 0.0;
    m1 = 0.0;
    return;
  }
  if (m0 * delta < 0.0) m0 = 0.0;
  if (m1 * delta < 0.0) m1 = 0.0;
  const double a = m0 / delta;
  const double b = m1 / delta;
  const double s = a * a + b * b;
  if (s > 9.0) {
    const double tau = 3.0 / std::sqrt(s);
    m0 = tau * a * delta;
    m1 = tau * b * delta;
  }
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys,
                             std::vector<double> ms)
    : xs_(std::move(xs)), ys_(std::move(ys)), ms_(std::move(ms)) {}

MonotoneCubic MonotoneCubic::pchip(std::vector<double> xs, std::vector<double> ys) {
  check_abscissae(xs, ys);
  const std::size_t n = xs.size();
  std::vector<double> h(n - 1), delta(n - 1), m(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = xs[i + 1] - xs[i];
    delta[i] = (ys[i + 1] - ys[i]) / h[i];
  }
  if (n == 2) {
    m[0] = m[1] = delta[0];
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] > 0.0) {
        // weighted harmonic mean (Fritsch-Butland)
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    // one-sided three-point end slopes, clipped to preserve shape
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (s * d0 <= 0.0) {
        s = 0.0;
      } else if (d0 * d1 < 0.0 && std::abs(s) > std::abs(3.0 * d0)) {
        s = 3.0 * d0;
      }
      return s;
    };
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }
  return MonotoneCubic(std::move(xs), std::move(ys), std::move(m));
}

MonotoneCubic MonotoneCubic::with_slopes(std::vector<double> xs, std::vector<double> ys,
                                         std::vector<double> slopes) {
  check_abscissae(xs, ys);
  if (slopes.size() != xs.size()) {
    throw DomainError("slope table length differs from abscissae");
  }
  // Limit only where the data is monotone on both neighbouring segments; exact
  // derivatives of a monotone solution pass untouched.
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double delta = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    double m0 = slopes[i];
    double m1 = slopes[i + 1];
    limit_pair(delta, m0, m1);
    slopes[i] = m0;
    slopes[i + 1] = m1;
  }
  return MonotoneCubic(std::move(xs), std::move(ys), std::move(slopes));
}

MonotoneCubic MonotoneCubic::hermite(std::vector<double> xs, std::vector<double> ys,
                                     std::vector<double> slopes) {
  check_abscissae(xs, ys);
  if (slopes.size() != xs.size()) {
    throw DomainError("slope table length differs from abscissae");
  }
  return MonotoneCubic(std::move(xs), std::move(ys), std::move(slopes));
}

std::size_t MonotoneCubic::segment(double x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = (it == xs_.begin()) ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  return std::min(i, xs_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const std::size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * ys_[i] + h10 * h * ms_[i] + h01 * ys_[i + 1] + h11 * h * ms_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  if (x < xs_.front() || x > xs_.back()) return 0.0;
  const std::size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  const double d00 = (6.0 * t2 - 6.0 * t) / h;
  const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double d01 = (-6.0 * t2 + 6.0 * t) / h;
  const double d11 = 3.0 * t2 - 2.0 * t;
  return d00 * ys_[i] + d10 * ms_[i] + d01 * ys_[i + 1] + d11 * ms_[i + 1];
}

double MonotoneCubic::second_derivative(double x) const {
  if (x < xs_.front() || x > xs_.back()) return 0.0;
  const std::size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double e00 = (12.0 * t - 6.0) / (h * h);
  const double e10 = (6.0 * t - 4.0) / h;
  const double e01 = (-12.0 * t + 6.0) / (h * h);
  const double e11 = (6.0 * t - 2.0) / h;
  return e00 * ys_[i] + e10 * ms_[i] + e01 * ys_[i + 1] + e11 * ms_[i + 1];
}

double MonotoneCubic::partial_integral(std::size_t i, double x) const {
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  // antiderivatives of the Hermite basis in t, times h
  const double i00 = t4 / 2.0 - t3 + t;
  const double i10 = t4 / 4.0 - 2.0 * t3 / 3.0 + t2 / 2.0;
  const double i01 = -t4 / 2.0 + t3;
  const double i11 = t4 / 4.0 - t3 / 3.0;
  return h * (i00 * ys_[i] + i10 * h * ms_[i] + i01 * ys_[i + 1] + i11 * h * ms_[i + 1]);
}

double MonotoneCubic::integral(double lo, double hi) const {
  if (hi < lo) return -integral(hi, lo);
  double total = 0.0;
  const double x0 = xs_.front();
  const double xn = xs_.back();
  if (lo < x0) {
    total += ys_.front() * (std::min(hi, x0) - lo);
    lo = x0;
  }
  if (hi > xn) {
    total += ys_.back() * (hi - std::max(lo, xn));
    hi = xn;
  }
  if (lo >= hi) return total;
  const std::size_t i0 = segment(lo);
  const std::size_t i1 = segment(hi);
  if (i0 == i1) return total + partial_integral(i0, hi) - partial_integral(i0, lo);
  total += partial_integral(i0, xs_[i0 + 1]) - partial_integral(i0, lo);
  for (std::size_t i = i0 + 1; i < i1; ++i) total += partial_integral(i, xs_[i + 1]);
  total += partial_integral(i1, hi);
  return total;
}

}  // namespace nmago
