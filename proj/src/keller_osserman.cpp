#include "nmago/keller_osserman.hpp"

#include <algorithm>
#include <cmath>

#include "nmago/error.hpp"
#include "nmago/ode.hpp"

namespace nmago {

namespace {

// log of the constant (2N-1)/(N-1)
double log_ko_const(int N) { return std::log((2.0 * N - 1.0) / (N - 1.0)); }

void check_dimension(int N) {
  if (N < 2) throw DomainError("dimension must be >= 2");
}

}  // namespace

std::string to_string(KOClass c) {
  switch (c) {
    case KOClass::Diverges:
      return "Diverges";
    case KOClass::Converges:
      return "Converges";
    case KOClass::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

double eval_F(const ScalarFn& f, double tau, FMethod method) {
  if (!(tau > 0.0)) throw DomainError("F needs tau > 0");
  if (method == FMethod::Auto) {
    const auto zero = f.primitive_at_zero();
    if (!zero) throw DivergenceError("F undefined: integral of f diverges at 0");
    return f.primitive(tau) - *zero;
  }
  // s = tau x^2, ds = 2 tau x dx
  auto integrand = [&](double x) { return f(tau * x * x) * 2.0 * tau * x; };
  QuadOptions opts;
  opts.max_subdivisions = 2000;
  const QuadResult res = integrate(integrand, 0.0, 1.0, opts);
  if (!res.converged || !std::isfinite(res.value)) {
    throw DivergenceError("F undefined: quadrature of f on (0, tau] does not converge");
  }
  return res.value;
}

double log_F(const ScalarFn& f, double tau) {
  if (!(tau > 0.0)) throw DomainError("F needs tau > 0");
  return f.log_integral_from_zero(tau);
}

LadderOutcome ladder_test(std::span<const double> log_x, std::span<const double> log_e,
                          std::span<const double> increments, const LadderOptions& opts) {
  LadderOutcome out;
  const std::size_t n = log_x.size();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    out.slopes.push_back((log_e[j + 1] - log_e[j]) / (log_x[j + 1] - log_x[j]));
  }
  out.increments.assign(increments.begin(), increments.end());
  const auto w = static_cast<std::size_t>(opts.windows);
  if (out.slopes.size() < w || out.increments.size() < w + 1) return out;

  auto tail_slopes = std::span(out.slopes).last(w);
  const bool all_conv = std::all_of(tail_slopes.begin(), tail_slopes.end(),
                                    [&](double s) { return s < -1.0 - opts.slope_margin; });
  if (all_conv) {
    out.verdict = KOClass::Converges;
    return out;
  }
  const bool all_div = std::all_of(tail_slopes.begin(), tail_slopes.end(),
                                   [&](double s) { return s > -1.0 + opts.slope_margin; });
  if (all_div) {
    out.verdict = KOClass::Diverges;
    return out;
  }
  // No saturation: the integral keeps gaining at least as much per rung.
  auto tail_inc = std::span(out.increments).last(w + 1);
  bool growing = true;
  for (std::size_t j = 0; j + 1 < tail_inc.size(); ++j) {
    const double prev = tail_inc[j];
    const double next = tail_inc[j + 1];
    if (!(prev > 0.0) || !(next >= (1.0 - opts.saturation_tol) * prev)) growing = false;
  }
  out.verdict = growing ? KOClass::Diverges : KOClass::Inconclusive;
  return out;
}

LadderOutcome classify_ko_detail(const ScalarFn& f, int N) {
  check_dimension(N);
  const double expo = (N - 1.0) / (2.0 * N - 1.0);
  constexpr int kRungs = 40;  // 2^40 ~ 1.1e12
  std::vector<double> log_x, log_e, inc;
  for (int j = 0; j <= kRungs; ++j) {
    const double tau = std::ldexp(1.0, j);
    log_x.push_back(std::log(tau));
    log_e.push_back(-expo * log_F(f, tau));
  }
  auto q = [&](double tau) { return std::exp(-expo * log_F(f, tau)); };
  for (int j = 0; j < kRungs; ++j) {
    inc.push_back(integrate(q, std::ldexp(1.0, j), std::ldexp(1.0, j + 1)).value);
  }
  return ladder_test(log_x, log_e, inc);
}

KOClass classify_ko(const ScalarFn& f, int N) { return classify_ko_detail(f, N).verdict; }

// ---------------------------------------------------------------------------

GTable::GTable(ScalarFn f, int N, double a, double t_max, QuadOptions quad)
    : f_(std::move(f)), N_(N), a_(a), quad_(quad) {
  check_dimension(N);
  if (!(a > 0.0)) throw DomainError("anchor a must be positive");
  if (!(t_max > a)) throw DomainError("t_max must exceed the anchor a");
  // uniform on [a, 2a], geometric (ratio 2) beyond
  t_.push_back(a);
  for (int i = 1; i <= 16 && t_.back() < t_max; ++i) t_.push_back(std::min(a + a * i / 16.0, t_max));
  while (t_.back() < t_max) t_.push_back(std::min(2.0 * t_.back(), t_max));
  G_.assign(t_.size(), 0.0);
  auto q = [this](double tau) { return integrand(tau); };
  for (std::size_t i = 1; i < t_.size(); ++i) {
    G_[i] = G_[i - 1] + integrate(q, t_[i - 1], t_[i], quad_).value;
  }
}

double GTable::integrand(double tau) const {
  const double expo = (N_ - 1.0) / (2.0 * N_ - 1.0);
  return std::exp(-expo * (log_ko_const(N_) + log_F(f_, tau)));
}

double GTable::operator()(double t) const {
  if (!(t > 0.0)) throw DomainError("G needs t > 0");
  auto q = [this](double tau) { return integrand(tau); };
  if (t < a_) return -integrate(q, t, a_, quad_).value;
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - t_.begin()) - 1;
  if (t == t_[j]) return G_[j];
  return G_[j] + integrate(q, t_[j], t, quad_).value;
}

// ---------------------------------------------------------------------------

GInverse::GInverse(ScalarFn f, int N, double a, double s_max, double rel_tol)
    : f_(std::move(f)), N_(N), a_(a), rel_tol_(rel_tol) {
  check_dimension(N);
  if (!(a > 0.0)) throw DomainError("anchor a must be positive");
  if (!(s_max > 0.0)) throw DomainError("s_max must be positive");
  auto rhs = [this](double, const State<1>& y) {
    return State<1>{std::exp(log_rate(y[0]))};
  };
  double s = 0.0;
  State<1> y{a};
  s_.push_back(s);
  g_.push_back(a);
  State<1> dy = rhs(s, y);
  double h = 1e-3 * a / dy[0];
  constexpr long kMaxSteps = 4'000'000;
  long steps = 0;
  while (s < s_max) {
    h = std::min(h, s_max - s);
    if (++steps > kMaxSteps || !(h > 1e-15 * std::max(s, 1e-300))) {
      truncated_ = true;
      break;
    }
    const auto res = dormand_prince_step<1>(rhs, s, y, dy, h, rel_tol_, 0.0);
    if (res.error_norm <= 1.0 && std::isfinite(res.y[0])) {
      s += h;
      y = res.y;
      dy = res.dydx_end;
      s_.push_back(s);
      g_.push_back(y[0]);
      if (y[0] > kOverflowGuard || !std::isfinite(dy[0])) {
        truncated_ = true;
        break;
      }
    }
    h = next_step_size(h, std::isfinite(res.error_norm) ? res.error_norm : 1e10);
  }
}

double GInverse::log_rate(double g) const {
  const double expo = (N_ - 1.0) / (2.0 * N_ - 1.0);
  return expo * (log_ko_const(N_) + log_F(f_, g));
}

double GInverse::operator()(double s) const {
  if (s < 0.0) throw DomainError("g needs s >= 0");
  if (s > s_.back()) {
    if (truncated_) return std::numeric_limits<double>::infinity();
    // beyond the stored range: integrate onwards from the last node
    auto rhs = [this](double, const State<1>& y) { return State<1>{std::exp(log_rate(y[0]))}; };
    double x = s_.back();
    State<1> y{g_.back()};
    State<1> dy = rhs(x, y);
    double h = (s_.size() > 1) ? s_.back() - s_[s_.size() - 2] : 1e-3;
    while (x < s) {
      h = std::min(h, s - x);
      const auto res = dormand_prince_step<1>(rhs, x, y, dy, h, rel_tol_, 0.0);
      if (res.error_norm <= 1.0 && std::isfinite(res.y[0])) {
        x += h;
        y = res.y;
        dy = res.dydx_end;
        if (y[0] > kOverflowGuard) return std::numeric_limits<double>::infinity();
      }
      h = next_step_size(h, std::isfinite(res.error_norm) ? res.error_norm : 1e10);
      if (!(h > 0.0)) return std::numeric_limits<double>::infinity();
    }
    return y[0];
  }
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - s_.begin()) - 1;
  if (s == s_[j]) return g_[j];
  auto rhs = [this](double, const State<1>& y) { return State<1>{std::exp(log_rate(y[0]))}; };
  const State<1> y{g_[j]};
  const auto res = dormand_prince_step<1>(rhs, s_[j], y, rhs(s_[j], y), s - s_[j], rel_tol_, 0.0);
  return res.y[0];
}

double GInverse::first_derivative_at_value(double g) const { return std::exp(log_rate(g)); }

double GInverse::second_derivative_at_value(double g) const {
  // f(g) / ((2N-1)/(N-1) F(g))^{1/(2N-1)}
  return std::exp(f_.log_value(g) - (log_ko_const(N_) + log_F(f_, g)) / (2.0 * N_ - 1.0));
}

double GInverse::first_derivative(double s) const { return first_derivative_at_value((*this)(s)); }

double GInverse::second_derivative(double s) const {
  return second_derivative_at_value((*this)(s));
}

// ---------------------------------------------------------------------------

KOProfile::KOProfile(ScalarFn f, int N, const KOOptions& opts)
    : f_(std::move(f)), N_(N), a_(opts.a) {
  check_dimension(N);
  if (!(a_ > 0.0)) throw DomainError("anchor a must be positive");
  classification_ = classify_ko(f_, N_);
  if (classification_ != KOClass::Diverges) {
    warnings_.push_back("Keller-Osserman condition not established (classification " +
                        to_string(classification_) + ")");
  }
  G_ = std::make_shared<const GTable>(f_, N_, a_, opts.t_max, opts.quad);
  g_ = std::make_shared<const GInverse>(f_, N_, a_, opts.s_max, opts.g_rel_tol);
  if (g_->truncated()) {
    warnings_.push_back("g crosses the overflow guard at s = " + std::to_string(g_->domain_limit()));
  }
  for (int j = 0; j <= opts.H_ladder_rungs; ++j) {
    const double tau = a_ * std::ldexp(1.0, j);
    H_tau_.push_back(tau);
    H_vals_.push_back(H(tau));
  }
  const auto w = static_cast<std::size_t>(std::min<int>(opts.H_window, static_cast<int>(H_vals_.size())));
  auto tail = std::span(H_vals_).last(w);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  const double last = tail.back();
  if (std::isfinite(last) && last != 0.0 && (*hi - *lo) / std::abs(last) < opts.H_stability) {
    H_inf_ = last;
  }
}

double KOProfile::H(double tau) const {
  if (!(tau > 0.0)) throw DomainError("H needs tau > 0");
  if (tau == a_) return 0.0;
  const double G = (*G_)(tau);
  return G * std::exp(f_.log_value(tau) -
                      N_ / (2.0 * N_ - 1.0) * (log_ko_const(N_) + log_F(f_, tau)));
}

GTable build_G(const ScalarFn& f, int N, double a, double t_max) {
  return GTable(f, N, a, t_max);
}

GInverse build_g(const ScalarFn& f, int N, double a, double s_max) {
  return GInverse(f, N, a, s_max);
}

double eval_H(const KOProfile& profile, double tau) { return profile.H(tau); }

std::optional<double> estimate_H_inf(const KOProfile& profile) { return profile.H_inf(); }

}  // namespace nmago
