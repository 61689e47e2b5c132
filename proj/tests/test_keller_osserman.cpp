#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "nmago/error.hpp"
#include "nmago/keller_osserman.hpp"

using namespace nmago;

namespace {

// f = 1, N = 2, a = 1: G(t) = (3^{2/3}/2)(t^{2/3} - 1), g(s) = ((2/3^{2/3}) s + 1)^{3/2}
double G_const(double t) { return std::cbrt(9.0) / 2.0 * (std::pow(t, 2.0 / 3.0) - 1.0); }
double g_const(double s) { return std::pow(2.0 / std::cbrt(9.0) * s + 1.0, 1.5); }

}  // namespace

TEST_CASE("eval_F examples") {
  CHECK(eval_F(ScalarFn::power(1.0), 2.0) == doctest::Approx(2.0));
  CHECK(eval_F(ScalarFn::constant(1.0), 3.0) == doctest::Approx(3.0));
  CHECK(eval_F(ScalarFn::exponential(), 1.0) == doctest::Approx(std::exp(1.0) - 1.0));
  CHECK(eval_F(ScalarFn::power(-0.5), 4.0, FMethod::Quadrature) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK_THROWS_AS((void)eval_F(ScalarFn::power(-1.0), 1.0), DivergenceError);
  for (double tau : {0.1, 1.0, 7.5}) {
    CHECK(eval_F(ScalarFn::power(2.0), tau, FMethod::Quadrature) ==
          doctest::Approx(eval_F(ScalarFn::power(2.0), tau)).epsilon(1e-10));
  }
  CHECK(log_F(ScalarFn::exponential(), 1000.0) == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("classification examples") {
  CHECK(classify_ko(ScalarFn::constant(1.0), 2) == KOClass::Diverges);
  CHECK(classify_ko(ScalarFn::power(1.0), 2) == KOClass::Diverges);
  CHECK(classify_ko(ScalarFn::power(3.0), 2) == KOClass::Converges);
  CHECK(classify_ko(ScalarFn::exponential(), 3) == KOClass::Converges);
}

TEST_CASE("property: classification flips at N/(N-1)") {
  for (int N = 2; N <= 5; ++N) {
    const double pstar = N / (N - 1.0);
    for (double p : {0.5, pstar - 0.3, pstar - 0.05, pstar}) {
      CAPTURE(N);
      CAPTURE(p);
      CHECK(classify_ko(ScalarFn::power(p), N) == KOClass::Diverges);
    }
    for (double p : {pstar + 0.2, pstar + 1.0, 2.0 * N}) {
      CAPTURE(N);
      CAPTURE(p);
      CHECK(classify_ko(ScalarFn::power(p), N) == KOClass::Converges);
    }
    CHECK(classify_ko(ScalarFn::power(pstar + 0.05), N) != KOClass::Diverges);
  }
}

TEST_CASE("G and g closed forms for f = 1, N = 2") {
  const KOProfile ko(ScalarFn::constant(1.0), 2);
  CHECK(ko.G()(1.0) == 0.0);
  CHECK(ko.g()(0.0) == 1.0);
  CHECK(std::abs(ko.G()(8.0) - 3.1201) <= 1e-3);
  for (double t : {1.5, 8.0, 100.0, 1e6}) CHECK(ko.G()(t) == doctest::Approx(G_const(t)).epsilon(1e-10));
  for (double s : {0.1, 3.1201, 50.0}) CHECK(ko.g()(s) == doctest::Approx(g_const(s)).epsilon(1e-10));
  CHECK(std::abs(ko.g()(3.1201) - 8.0) < 1e-3);
  CHECK(std::abs(ko.G()(ko.g()(2.0)) - 2.0) <= 1e-8);
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = 10.0 * i / 200;
    worst = std::max(worst, std::abs(ko.G()(ko.g()(t)) - t));
  }
  CHECK(worst <= 1e-8);
  // below the anchor G is the negative integral
  CHECK(ko.G()(0.5) == doctest::Approx(G_const(0.5)).epsilon(1e-9));
}

TEST_CASE("G against tanh-sinh for exponential f") {
  const int N = 3;
  const KOProfile ko(ScalarFn::exponential(), N);
  boost::math::quadrature::tanh_sinh<double> ts;
  auto integrand = [](double tau) {
    return std::pow(2.5 * (std::exp(tau) - 1.0), -2.0 / 5.0);
  };
  for (double t : {2.0, 10.0, 30.0}) {
    CHECK(ko.G()(t) == doctest::Approx(ts.integrate(integrand, 1.0, t)).epsilon(1e-9));
  }
  CHECK(ko.g().truncated());
}

TEST_CASE("H ladder") {
  const KOProfile c1(ScalarFn::constant(1.0), 2);
  REQUIRE(c1.H_inf().has_value());
  CHECK(std::abs(*c1.H_inf() - 0.5) <= 0.01);
  CHECK(c1.H(1.0) == 0.0);
  for (double tau : {1.5, 10.0, 1e4}) {
    CHECK(c1.H(tau) == doctest::Approx((1.0 - std::pow(tau, -2.0 / 3.0)) / 2.0).epsilon(1e-9));
    CHECK(eval_H(c1, tau) == c1.H(tau));
  }

  const KOProfile lin(ScalarFn::power(1.0), 2);
  REQUIRE(lin.H_inf().has_value());
  CHECK(std::abs(*lin.H_inf() - 2.0) <= 0.02);
  CHECK(estimate_H_inf(lin) == lin.H_inf());

  const KOProfile quad(ScalarFn::power(2.0), 2);
  CHECK_FALSE(quad.H_inf().has_value());
}

TEST_CASE("property: H nonnegative and vanishing at the anchor") {
  for (int N : {2, 3, 4}) {
    for (const ScalarFn& f : {ScalarFn::constant(1.0), ScalarFn::power(1.0)}) {
      const KOProfile ko(f, N);
      for (double v : ko.H_values()) CHECK(v >= 0.0);
      double prev = INFINITY;
      for (int k = 1; k <= 8; ++k) {
        const double h = ko.H(1.0 + std::pow(10.0, -k));
        CHECK(h <= prev);
        prev = h;
      }
      CHECK(prev < 1e-5);
    }
  }
}

TEST_CASE("property: G and g monotone, g convex, ODE identity") {
  for (int N : {2, 3, 5}) {
    for (const ScalarFn& f : {ScalarFn::constant(1.0), ScalarFn::power(1.0), ScalarFn::power(0.5)}) {
      const KOProfile ko(f, N);
      auto Gv = ko.G().values();
      for (std::size_t i = 1; i < Gv.size(); ++i) CHECK(Gv[i] > Gv[i - 1]);
      const auto s = ko.g().s();
      const auto gv = ko.g().values();
      double worst = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) CHECK(gv[i] > gv[i - 1]);
        const double g1 = ko.g().first_derivative_at_value(gv[i]);
        const double g2 = ko.g().second_derivative_at_value(gv[i]);
        CHECK(g2 > 0.0);
        const double lhs = std::pow(g1, 1.0 / (N - 1)) * g2;
        worst = std::max(worst, std::abs(lhs / f(gv[i]) - 1.0));
      }
      CHECK(worst <= 1e-6);
    }
  }
}

TEST_CASE("g derivative matches a finite difference of the table") {
  const KOProfile ko(ScalarFn::power(1.0), 3);
  for (double s : {0.5, 2.0, 10.0}) {
    const double h = 1e-5 * s;
    const double fd = (ko.g()(s + h) - ko.g()(s - h)) / (2 * h);
    CHECK(ko.g().first_derivative(s) == doctest::Approx(fd).epsilon(1e-7));
    const double fd2 = (ko.g().first_derivative(s + h) - ko.g().first_derivative(s - h)) / (2 * h);
    CHECK(ko.g().second_derivative(s) == doctest::Approx(fd2).epsilon(1e-6));
  }
}

TEST_CASE("property: reanchoring shifts G by a constant") {
  for (const ScalarFn& f : {ScalarFn::constant(1.0), ScalarFn::power(1.0)}) {
    KOOptions o2;
    o2.a = 2.0;
    const KOProfile k1(f, 3);
    const KOProfile k2(f, 3, o2);
    const double offset = k1.G()(3.0) - k2.G()(3.0);
    for (double t : {1.5, 5.0, 50.0, 1e5}) {
      CHECK(k1.G()(t) - k2.G()(t) == doctest::Approx(offset).epsilon(1e-9));
    }
    CHECK(offset == doctest::Approx(k1.G()(2.0)).epsilon(1e-9));
  }
}

TEST_CASE("warning when the condition is not established") {
  const KOProfile ko(ScalarFn::power(3.0), 2);
  CHECK(ko.classification() == KOClass::Converges);
  CHECK_FALSE(ko.warnings().empty());
}
