#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "nmago/bounds.hpp"
#include "nmago/error.hpp"

using namespace nmago;

namespace {

// phi for p = t^-3, N = 2
double phi_closed(double t) {
  const double s = std::sqrt(1.0 - t * t);
  return std::log((1.0 + s) / t) - s;
}

double g_const(double s) { return std::pow(2.0 / std::cbrt(9.0) * s + 1.0, 1.5); }

ProblemSpec model_spec() {
  return ProblemSpec{3, ScalarFn::power(1.0), ScalarFn::power_singular(3.0, 1.0, 1.0)};
}

const BoundFamily& model_family() {
  static const BoundFamily fam = find_k_bounds(model_spec());
  return fam;
}

}  // namespace

TEST_CASE("weight class examples") {
  CHECK(validate_weight_class(ScalarFn::power_singular(3.0), 2).verdict == WeightVerdict::InClass);
  const WeightClass w2 = validate_weight_class(ScalarFn::power_singular(2.0), 2);
  CHECK(w2.verdict == WeightVerdict::NotInClass);
  CHECK(w2.reason == "P_infty integral converges");
  const WeightClass w05 = validate_weight_class(ScalarFn::power_singular(0.5), 3);
  CHECK(w05.verdict == WeightVerdict::NotInClass);
  CHECK(w05.reason == "P bounded at 0");
  CHECK(validate_weight_class(ScalarFn::power(1.0), 2).reason == "p not decreasing");
  CHECK(validate_weight_class(ScalarFn::constant(2.0), 2).verdict == WeightVerdict::NotInClass);
  CHECK(validate_weight_class(ScalarFn::power_singular(3.5), 3).verdict == WeightVerdict::InClass);
}

TEST_CASE("property: the exponent rule for power weights") {
  for (int N : {2, 3, 4}) {
    const double gamma_star = (2.0 * N - 1) / (N - 1);
    for (double gamma : {gamma_star, gamma_star + 0.5, gamma_star + 2.0}) {
      CHECK(validate_weight_class(ScalarFn::power_singular(gamma), N).verdict == WeightVerdict::InClass);
    }
    for (double gamma : {1.5, gamma_star - 0.3}) {
      CHECK(validate_weight_class(ScalarFn::power_singular(gamma), N).verdict != WeightVerdict::InClass);
    }
  }
}

TEST_CASE("transform_weight") {
  const ScalarFn p = ScalarFn::power_singular(3.0);
  const ScalarFn s = transform_weight(p, WeightTransform::ShrinkScale, 0.5);
  const ScalarFn a = transform_weight(p, WeightTransform::Amplify, 4.0);
  for (double t : {0.1, 0.5, 0.9}) {
    CHECK(s(t) == doctest::Approx(std::pow(t, -3.0) / 16.0));
    CHECK(a(t) == doctest::Approx(4.0 * std::pow(t, -3.0)));
  }
  CHECK_THROWS_AS((void)transform_weight(p, WeightTransform::Amplify, 0.0), DomainError);
  CHECK_THROWS_AS((void)transform_weight(p, WeightTransform::ShrinkScale, -1.0), DomainError);
  for (int N : {2, 3}) {
    const WeightVerdict v = validate_weight_class(p, N).verdict;
    CHECK(validate_weight_class(s, N).verdict == v);
    CHECK(validate_weight_class(a, N).verdict == v);
    CHECK(validate_weight_class(transform_weight(s, WeightTransform::ShrinkScale, 0.5), N).verdict == v);
  }
  const PhiProfile base(p, 3);
  const PhiProfile amp(a, 3);
  for (double t : {0.01, 0.3, 0.8}) CHECK(amp.P(t) == doctest::Approx(4.0 * base.P(t)).epsilon(1e-12));
}

TEST_CASE("P and phi examples") {
  const PhiProfile prof = build_P_phi(ScalarFn::power_singular(3.0), 2);
  CHECK(prof.P(1.0) == 0.0);
  CHECK(prof.phi(1.0) == 0.0);
  CHECK(prof.P(0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(std::abs(prof.phi(0.5) - 0.4510) < 1e-4);
  for (double t : {0.9, 0.5, 0.1, 1e-3, 1e-8, 1e-20}) {
    CHECK(prof.phi(t) == doctest::Approx(phi_closed(t)).epsilon(1e-8));
  }
  CHECK(prof.tail_diverges());
  const auto ts = prof.t();
  const auto vs = prof.values();
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(vs[i] < vs[i - 1]);
}

TEST_CASE("phi against tanh-sinh") {
  const int N = 3;
  const double gamma = 3.5;
  const PhiProfile prof(ScalarFn::power_singular(gamma), N);
  boost::math::quadrature::tanh_sinh<double> ts;
  auto P = [&](double t) { return (std::pow(t, 1 - gamma) - 1) / (gamma - 1); };
  auto q = [&](double t) { return std::pow(1.5 * P(t), 2.0 / 3.0); };
  for (double t : {0.7, 0.2, 0.01}) {
    CHECK(prof.P(t) == doctest::Approx(P(t)).epsilon(1e-12));
    CHECK(prof.phi(t) == doctest::Approx(ts.integrate(q, t, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("property: phi identities and the S bound") {
  for (int N : {2, 3}) {
    for (double gamma : {(2.0 * N - 1) / (N - 1), 3.5}) {
      const PhiProfile prof(ScalarFn::power_singular(gamma), N);
      const double bound = (2.0 * N - 1) / (N - 1);
      for (double t : prof.t()) {
        if (t >= 1.0) continue;
        const double d1 = prof.dphi(t);
        const double d2 = prof.ddphi(t);
        CHECK(std::pow(-d1, 1.0 / (N - 1)) * d2 == doctest::Approx(prof.p(t)).epsilon(1e-6));
        CHECK(d1 / d2 == doctest::Approx(-(N / (N - 1.0)) * prof.P(t) / prof.p(t)).epsilon(1e-6));
        CHECK(d1 * d1 / (prof.phi(t) * d2) <= bound * (1 + 1e-6));
        CHECK(prof.S(t) == doctest::Approx(prof.phi(t) * d2 / (d1 * d1)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("envelope examples") {
  const ScalarFn p = ScalarFn::power_singular(3.0);
  const Envelope e1 = fit_envelope(ScalarFn::power_singular(3.0, 1.0, 1.0), p);
  CHECK(e1.c == doctest::Approx(1.0));
  CHECK(e1.d == doctest::Approx(1.0));
  const Envelope e2 = fit_envelope(ScalarFn::power_singular(3.0, 2.0, 1.0), p);
  CHECK(e2.c == doctest::Approx(2.0));
  CHECK(e2.d == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)fit_envelope(ScalarFn::power_singular(2.0, 1.0, 1.0), p), AssumptionError);
}

TEST_CASE("w construction") {
  auto ko = std::make_shared<const KOProfile>(ScalarFn::constant(1.0), 2);
  auto phi = std::make_shared<const PhiProfile>(ScalarFn::power_singular(3.0), 2);
  const WFunction w = build_w(ko, phi, 1.0);
  const double expect = g_const(std::pow(phi_closed(0.5), 2.0 / 3.0));
  CHECK(w(0.0) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(std::abs(w(0.0) - 1.958) < 1e-3);
  double prev = 0.0;
  for (double k : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double v = build_w(ko, phi, k)(0.0);
    CHECK(v > prev);
    prev = v;
  }
  prev = 0.0;
  for (double r : {0.0, 0.3, 0.6, 0.9, 0.99, 0.9999, 1 - 1e-6}) {
    const double v = w(r);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 10.0);
  CHECK(w(1 - 1e-12) > prev);
  // derivatives against finite differences
  for (double r : {0.2, 0.7}) {
    const double h = 1e-5;
    const WValue v = w.eval(r);
    CHECK(v.dw == doctest::Approx((w(r + h) - w(r - h)) / (2 * h)).epsilon(1e-7));
    CHECK(v.ddw == doctest::Approx((w.eval(r + h).dw - w.eval(r - h).dw) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("property: y identities and the definition chain") {
  auto ko = std::make_shared<const KOProfile>(ScalarFn::power(1.0), 3);
  auto phi = std::make_shared<const PhiProfile>(ScalarFn::power_singular(3.0), 3);
  const double k = 1.7;
  const WFunction w(ko, phi, k);
  const int N = 3;
  for (double r : {0.0, 0.1, 0.5, 0.9, 0.999}) {
    const double y = (1 - r * r) / 2;
    const double dy = -r;
    const double ddy = -1.0;
    CHECK(std::pow(-1.0, N) * dy * std::pow(ddy, N - 1) == r);
    const WValue v = w.eval(r);
    CHECK(v.y == doctest::Approx(y).epsilon(1e-15));
    const double chain = k * std::pow(phi->phi(y), N / (2.0 * N - 1));
    CHECK(ko->G()(v.w) == doctest::Approx(chain).epsilon(1e-8));
  }
}

TEST_CASE("inequality residual") {
  const ProblemSpec s = model_spec();
  const BoundFamily& fam = model_family();
  const InequalityReport& rep = fam.super_report;
  REQUIRE(rep.radii.size() >= 190);
  for (std::size_t i = 0; i < rep.theta.size(); ++i) {
    CHECK(rep.theta[i] > 0.0);
  }
  for (double v : rep.S) CHECK(v > 0.0);
  CHECK(rep.max_cross_rel_error <= 1e-6);
  CHECK(fam.sub_report.max_cross_rel_error <= 1e-6);
  const std::vector<double> bad{0.5, 1.0};
  CHECK_THROWS((void)eval_inequality_residual(*fam.w2, s, bad));
}

TEST_CASE("certification radii") {
  const auto radii = certification_radii();
  CHECK(radii.size() == 200);
  for (std::size_t i = 1; i < radii.size(); ++i) CHECK(radii[i] > radii[i - 1]);
  CHECK(radii.front() > 0.0);
  CHECK(radii.back() == doctest::Approx(1 - 1e-6).epsilon(1e-15));
}

TEST_CASE("find_k_bounds on the model problem") {
  const ProblemSpec s = model_spec();
  const BoundFamily& fam = model_family();
  CHECK(fam.k1 < fam.k2);
  CHECK((*fam.w1)(0.0) < (*fam.w2)(0.0));
  CHECK(fam.sub_report.max_margin() <= 0.0);
  CHECK(fam.super_report.min_margin() >= 0.0);
  CHECK(fam.C1 > 0.0);
  CHECK(fam.C1 < fam.C2);
  CHECK(fam.c == doctest::Approx(1.0));
  CHECK(fam.d == doctest::Approx(1.0));
  CHECK(fam.w1_blows_up);
  CHECK(fam.w2_blows_up);

  std::vector<double> fresh;
  for (int i = 0; i < 40; ++i) fresh.push_back(0.013 + 0.87 * i / 39.0);
  for (int i = 1; i <= 10; ++i) fresh.push_back(1 - std::pow(10.0, -1.0 - 0.47 * i));
  const InequalityReport sub = eval_inequality_residual(*fam.w1, s, fresh);
  const InequalityReport sup = eval_inequality_residual(*fam.w2, s, fresh);
  CHECK(sub.max_margin() <= 0.0);
  CHECK(sup.min_margin() >= 0.0);

  // residual sign stability further out in k
  const WFunction w_small(fam.ko, fam.phi_sub, fam.k1 / 4);
  const WFunction w_large(fam.ko, fam.phi_sup, fam.k2 * 4);
  CHECK(eval_inequality_residual(w_small, s, certification_radii()).max_margin() <= 0.0);
  CHECK(eval_inequality_residual(w_large, s, certification_radii()).min_margin() >= 0.0);
}

TEST_CASE("find_k_bounds preconditions") {
  CHECK_THROWS_AS((void)find_k_bounds(ProblemSpec{2, ScalarFn::power(2.0), ScalarFn::power_singular(3.0, 1.0, 1.0)}),
                  PreconditionError);
  BoundInputs bad;
  bad.p = ScalarFn::power_singular(2.0);
  CHECK_THROWS_AS((void)find_k_bounds(ProblemSpec{2, ScalarFn::constant(1.0), ScalarFn::power_singular(2.0, 1.0, 1.0)}, bad),
                  PreconditionError);
  CHECK_THROWS_AS((void)find_k_bounds(ProblemSpec{2, ScalarFn::power(3.0), ScalarFn::power_singular(3.0, 1.0, 1.0)}),
                  PreconditionError);
}
