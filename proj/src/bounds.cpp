#include "nmago/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nmago/error.hpp"
#include "nmago/quadrature.hpp"

namespace nmago {

std::string to_string(WeightVerdict v) {
  switch (v) {
    case WeightVerdict::InClass:
      return "InClass";
    case WeightVerdict::NotInClass:
      return "NotInClass";
    case WeightVerdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

WeightClass validate_weight_class(const ScalarFn& p, int N) {
  if (N < 2) throw DomainError("dimension must be >= 2");
  WeightClass out;

  // strictly decreasing on (0, 1): uniform grid plus a geometric approach to 0
  std::vector<double> grid;
  for (int i = 1; i < 256; ++i) grid.push_back(i / 256.0);
  for (int j = 1; j <= 120; ++j) grid.push_back(std::ldexp(1.0, -8) * std::pow(2.0, -j / 2.0));
  std::sort(grid.begin(), grid.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = p(grid[i]);
    if (!(v > 0.0)) return {WeightVerdict::NotInClass, "p not positive"};
    if (i > 0 && !(v < p(grid[i - 1]))) return {WeightVerdict::NotInClass, "p not decreasing"};
  }

  // rungs t_j = 2^-j towards 0+, as x_j = 1 / t_j towards infinity
  constexpr int kRungs = 50;
  std::vector<double> log_x, log_p;
  for (int j = 1; j <= kRungs; ++j) {
    const double t = std::ldexp(1.0, -j);
    log_x.push_back(-std::log(t));
    log_p.push_back(p.log_value(t));
  }
  bool unbounded = true;
  for (int j = kRungs - 6; j + 1 < kRungs; ++j) {
    if (!((log_p[j + 1] - log_p[j]) / (log_x[j + 1] - log_x[j]) > 1e-3)) unbounded = false;
  }
  if (!unbounded) return {WeightVerdict::NotInClass, "p bounded at 0"};

  // int_0 p dt = int^inf p(1/x) x^-2 dx
  std::vector<double> log_e, inc;
  for (int j = 1; j <= kRungs; ++j) {
    const double t = std::ldexp(1.0, -j);
    log_e.push_back(p.log_value(t) + 2.0 * std::log(t));
    if (j < kRungs) inc.push_back(p.integral(std::ldexp(1.0, -j - 1), t));
  }
  const KOClass P_at_zero = ladder_test(log_x, log_e, inc).verdict;
  if (P_at_zero == KOClass::Converges) return {WeightVerdict::NotInClass, "P bounded at 0"};

  const double expo = (N - 1.0) / N;
  auto Pq = [&](double t) { return std::pow(p.integral(t, 1.0), expo); };
  log_e.clear();
  inc.clear();
  for (int j = 1; j <= kRungs; ++j) {
    const double t = std::ldexp(1.0, -j);
    log_e.push_back(expo * std::log(p.integral(t, 1.0)) + 2.0 * std::log(t));
    if (j < kRungs) inc.push_back(integrate(Pq, std::ldexp(1.0, -j - 1), t).value);
  }
  const KOClass tail = ladder_test(log_x, log_e, inc).verdict;
  if (tail == KOClass::Converges) return {WeightVerdict::NotInClass, "P_infty integral converges"};
  if (tail == KOClass::Inconclusive || P_at_zero == KOClass::Inconclusive) {
    return {WeightVerdict::Inconclusive, "divergence of the P integral not resolved"};
  }
  out.verdict = WeightVerdict::InClass;
  return out;
}

// ---------------------------------------------------------------------------

PhiProfile::PhiProfile(ScalarFn p, int N) : p_(std::move(p)), N_(N) {
  if (N < 2) throw DomainError("dimension must be >= 2");
  // descending construction from t = 1
  std::vector<double> desc;
  for (int i = 0; i <= 32; ++i) desc.push_back(1.0 - 0.5 * i / 32.0);
  for (int j = 5; j <= 200; ++j) desc.push_back(std::pow(2.0, -j / 4.0));
  std::vector<double> vals(desc.size(), 0.0);
  auto qf = [this](double t) { return q(t); };
  QuadOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 0.0;
  for (std::size_t i = 1; i < desc.size(); ++i) {
    const QuadResult res = integrate(qf, desc[i], desc[i - 1], opts);
    if (!std::isfinite(res.value)) throw DivergenceError("phi: weight not integrable on (0, 1)");
    vals[i] = vals[i - 1] + res.value;
  }
  t_.assign(desc.rbegin(), desc.rend());
  phi_.assign(vals.rbegin(), vals.rend());
  const double t_min = t_.front();
  tail_s_ = (std::log(q(t_min)) - std::log(q(10.0 * t_min))) / std::log(10.0);
}

double PhiProfile::P(double t) const {
  if (!(t > 0.0) || t > 1.0) throw DomainError("P needs t in (0, 1]");
  if (t == 1.0) return 0.0;
  return p_.integral(t, 1.0);
}

double PhiProfile::dphi(double t) const {
  return -std::pow(N_ / (N_ - 1.0) * P(t), (N_ - 1.0) / N_);
}

double PhiProfile::ddphi(double t) const {
  return p_(t) * std::pow(N_ / (N_ - 1.0) * P(t), -1.0 / N_);
}

double PhiProfile::phi(double t) const {
  if (!(t > 0.0) || t > 1.0) throw DomainError("phi needs t in (0, 1]");
  if (t == 1.0) return 0.0;
  const double t_min = t_.front();
  if (t < t_min) {
    const double qm = q(t_min);
    const double s = tail_s_;
    if (std::abs(s - 1.0) < 2e-2) return phi_.front() + qm * t_min * std::log(t_min / t);
    return phi_.front() + qm * t_min * (1.0 - std::pow(t / t_min, 1.0 - s)) / (1.0 - s);
  }
  // smallest node >= t
  const auto it = std::lower_bound(t_.begin(), t_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - t_.begin());
  if (t_[j] == t) return phi_[j];
  auto qf = [this](double x) { return q(x); };
  QuadOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 0.0;
  return phi_[j] + integrate(qf, t, t_[j], opts).value;
}

double PhiProfile::S(double t) const {
  const double d1 = dphi(t);
  return phi(t) * ddphi(t) / (d1 * d1);
}

PhiProfile build_P_phi(const ScalarFn& p, int N) { return PhiProfile(p, N); }

ScalarFn transform_weight(const ScalarFn& p, WeightTransform mode, double factor) {
  if (!(factor > 0.0)) throw DomainError("weight transform factor must be positive");
  if (mode == WeightTransform::ShrinkScale) return p.with_argument_scale(2.0).scaled(factor);
  return p.scaled(factor);
}

Envelope fit_envelope(const ScalarFn& K, const ScalarFn& p, double r_lo) {
  if (!(r_lo > 0.0 && r_lo < 1.0)) throw DomainError("envelope window must start in (0, 1)");
  Envelope env{std::numeric_limits<double>::infinity(), 0.0};
  constexpr int kPoints = 400;
  const double lo = std::log(1.0 - r_lo);
  const double hi = std::log(1e-8);
  double first = 0.0;
  double last = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double one_minus_r = std::exp(lo + (hi - lo) * i / (kPoints - 1));
    const double ratio = K(1.0 - one_minus_r) / p(one_minus_r);
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
      throw AssumptionError("envelope mismatch: K / p(1 - r) not positive and finite");
    }
    if (i == 0) first = ratio;
    last = ratio;
    env.c = std::min(env.c, ratio);
    env.d = std::max(env.d, ratio);
  }
  if (std::abs(std::log(last / first)) > std::log(1e3)) {
    throw AssumptionError("envelope mismatch: K / p(1 - r) drifts by more than 1e3 on the window");
  }
  return env;
}

// ---------------------------------------------------------------------------

WFunction::WFunction(std::shared_ptr<const KOProfile> ko, std::shared_ptr<const PhiProfile> phi,
                     double k)
    : ko_(std::move(ko)), phi_(std::move(phi)), k_(k) {
  if (!(k > 0.0)) throw DomainError("k must be positive");
  if (ko_->dimension() != phi_->dimension()) throw DomainError("dimension mismatch");
}

WValue WFunction::eval(double r) const {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("w needs r in [0, 1)");
  const int N = ko_->dimension();
  const double beta = N / (2.0 * N - 1.0);
  WValue v;
  v.y = 0.5 * (1.0 - r) * (1.0 + r);
  v.phi = phi_->phi(v.y);
  v.s = k_ * std::pow(v.phi, beta);
  v.w = ko_->g()(v.s);
  v.g1 = ko_->g().first_derivative_at_value(v.w);
  v.g2 = ko_->g().second_derivative_at_value(v.w);
  const double A = k_ * beta * std::pow(v.phi, beta - 1.0);
  const double d1 = phi_->dphi(v.y);
  const double d2 = phi_->ddphi(v.y);
  const double r2 = r * r;
  v.dw = A * v.g1 * (-d1) * r;
  v.ddw = A * (A * v.g2 * d1 * d1 * r2 - (N - 1.0) / (2.0 * N - 1.0) * v.g1 * d1 * d1 / v.phi * r2 +
               v.g1 * d2 * r2 + v.g1 * (-d1));
  return v;
}

bool WFunction::within_domain(double r) const {
  if (!ko_->g().truncated()) return true;
  const int N = ko_->dimension();
  const double y = 0.5 * (1.0 - r) * (1.0 + r);
  return k_ * std::pow(phi_->phi(y), N / (2.0 * N - 1.0)) <= ko_->g().domain_limit();
}

WFunction build_w(std::shared_ptr<const KOProfile> ko, std::shared_ptr<const PhiProfile> phi,
                  double k) {
  return WFunction(std::move(ko), std::move(phi), k);
}

double InequalityReport::min_margin() const {
  return margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
}

double InequalityReport::max_margin() const {
  return margins.empty() ? 0.0 : *std::max_element(margins.begin(), margins.end());
}

InequalityReport eval_inequality_residual(const WFunction& w, const ProblemSpec& spec,
                                          std::span<const double> radii) {
  spec.check();
  const int N = spec.dimension;
  if (N != w.ko().dimension()) throw DomainError("dimension mismatch between spec and w");
  const double beta = N / (2.0 * N - 1.0);
  const double lead = std::pow(N - 1.0, 1.0 / (N - 1)) *
                      std::pow(w.k(), (2.0 * N - 1.0) / (N - 1)) *
                      std::pow(beta, N / (N - 1.0));
  const PhiProfile& phi = w.phi_profile();
  InequalityReport rep;
  for (double r : radii) {
    if (!(r > 0.0 && r <= 1.0 - 1e-6)) throw DomainError("residual radii must lie in (0, 1 - 1e-6]");
    const WValue v = w.eval(r);
    const double H = w.ko().H(v.w);
    if (!(H > 1e-12) || !std::isfinite(H) || !std::isfinite(v.w)) {
      rep.excluded.push_back(r);
      continue;
    }
    const double lhs = radial_lhs(N, v.dw, v.ddw, r);
    const double rhs = spec.K(r) * spec.f(v.w);
    const double invH = 1.0 / H;
    const double p = phi.p(v.y);
    const double P = phi.P(v.y);
    const double S = phi.S(v.y);
    const double r2 = r * r;
    const double theta = beta / S * r2 - (N - 1.0) / (2.0 * N - 1.0) * invH / S * r2 + invH * r2;
    const double delta = theta + N / (N - 1.0) * invH * P / p;
    const double bracket = delta + N * (N - 2.0) / (N - 1.0) * invH * P / p;
    const double fact = lead * p * spec.f(v.w) * bracket;
    rep.push(r, lhs, rhs);
    rep.factored_lhs.push_back(fact);
    rep.delta.push_back(delta);
    rep.theta.push_back(theta);
    rep.S.push_back(S);
    rep.bracket.push_back(bracket);
    const double rel = std::abs(lhs - fact) / std::max(std::abs(lhs), 1e-300);
    rep.max_cross_rel_error = std::max(rep.max_cross_rel_error, rel);
  }
  return rep;
}

std::vector<double> certification_radii() {
  std::vector<double> radii;
  for (int i = 1; i <= 120; ++i) radii.push_back(0.9 * i / 120.0);
  for (int i = 1; i <= 80; ++i) {
    const double one_minus_r = std::exp(std::log(0.1) + (std::log(1e-6) - std::log(0.1)) * i / 80.0);
    radii.push_back(1.0 - one_minus_r);
  }
  return radii;
}

namespace {

// min and max of K(r) / p(1 - r) over [0, 1 - 1e-8]
std::pair<double, double> global_ratio(const ScalarFn& K, const ScalarFn& p) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  auto visit = [&](double r) {
    const double ratio = K(r) / p(1.0 - r);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  };
  for (int i = 0; i <= 1000; ++i) visit(0.999 * i / 1000.0);
  for (int i = 1; i <= 250; ++i) visit(1.0 - std::pow(10.0, -3.0 - 5.0 * i / 250.0));
  return {lo, hi};
}

}  // namespace

BoundFamily find_k_bounds(const ProblemSpec& spec, const BoundInputs& in) {
  spec.check();
  const int N = spec.dimension;
  BoundFamily fam;
  fam.N = N;
  fam.p = in.p;
  fam.weight_class = validate_weight_class(in.p, N);
  if (fam.weight_class.verdict != WeightVerdict::InClass) {
    throw PreconditionError("weight not in class: " +
                            (fam.weight_class.reason.empty() ? to_string(fam.weight_class.verdict)
                                                             : fam.weight_class.reason));
  }
  KOOptions ko_opts;
  ko_opts.a = in.a;
  fam.ko = std::make_shared<const KOProfile>(spec.f, N, ko_opts);
  if (fam.ko->classification() != KOClass::Diverges) {
    throw PreconditionError("Keller-Osserman condition not established (" +
                            to_string(fam.ko->classification()) + ")");
  }
  if (!fam.ko->H_inf()) throw PreconditionError("H_inf absent: H does not stabilize");

  const Envelope env = fit_envelope(spec.K, in.p, in.envelope_r_lo);
  fam.c = env.c;
  fam.d = env.d;
  const auto [ratio_lo, ratio_hi] = global_ratio(spec.K, in.p);
  fam.eps = in.sub_safety * ratio_lo;
  fam.M = in.super_safety * ratio_hi;
  fam.p_sub = transform_weight(in.p, WeightTransform::ShrinkScale, fam.eps);
  fam.p_sup = transform_weight(in.p, WeightTransform::Amplify, fam.M);
  fam.notes.push_back("sub-solution weight " + fam.p_sub.describe());
  fam.notes.push_back("super-solution weight " + fam.p_sup.describe());
  fam.phi_sub = std::make_shared<const PhiProfile>(fam.p_sub, N);
  fam.phi_sup = std::make_shared<const PhiProfile>(fam.p_sup, N);

  auto certify_sub = [&](double k, InequalityReport& rep) {
    rep = eval_inequality_residual(WFunction(fam.ko, fam.phi_sub, k), spec, in.radii);
    return rep.excluded.empty() && rep.max_margin() <= 0.0;
  };
  auto certify_sup = [&](double k, InequalityReport& rep) {
    rep = eval_inequality_residual(WFunction(fam.ko, fam.phi_sup, k), spec, in.radii);
    return rep.excluded.empty() && rep.min_margin() >= 0.0;
  };

  double k = 1.0;
  bool found = false;
  for (int i = 0; i <= in.max_halvings; ++i, k *= 0.5) {
    if (certify_sub(k, fam.sub_report)) {
      found = true;
      break;
    }
  }
  if (!found) {
    throw DivergenceError("no certified bounds: best sub-solution margin " +
                          std::to_string(fam.sub_report.max_margin()));
  }
  fam.k1 = k;
  fam.w1 = std::make_shared<const WFunction>(fam.ko, fam.phi_sub, fam.k1);

  k = 1.0;
  found = false;
  for (int i = 0; i <= in.max_doublings; ++i, k *= 2.0) {
    if (certify_sup(k, fam.super_report) && k > fam.k1 &&
        WFunction(fam.ko, fam.phi_sup, k)(0.0) > (*fam.w1)(0.0)) {
      found = true;
      break;
    }
  }
  if (!found) {
    throw DivergenceError("no certified bounds: best super-solution margin " +
                          std::to_string(fam.super_report.min_margin()));
  }
  fam.k2 = k;
  fam.w2 = std::make_shared<const WFunction>(fam.ko, fam.phi_sup, fam.k2);

  const auto& b1 = fam.sub_report.bracket;
  const auto& b2 = fam.super_report.bracket;
  fam.C1 = std::min(*std::min_element(b1.begin(), b1.end()), *std::min_element(b2.begin(), b2.end()));
  fam.C2 = std::max(*std::max_element(b1.begin(), b1.end()), *std::max_element(b2.begin(), b2.end()));

  const double r_probe = 1.0 - 1e-6;
  const bool tails = fam.ko->classification() == KOClass::Diverges;
  fam.w1_blows_up = (*fam.w1)(r_probe) > 1e4 || (tails && fam.phi_sub->tail_diverges());
  fam.w2_blows_up = (*fam.w2)(r_probe) > 1e4 || (tails && fam.phi_sup->tail_diverges());
  return fam;
}

}  // namespace nmago
