#include "nmago/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "nmago/error.hpp"
#include "nmago/ode.hpp"
#include "nmago/quadrature.hpp"

namespace nmago {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::ReachedOne:
      return "ReachedOne";
    case SolveStatus::BlewUp:
      return "BlewUp";
    case SolveStatus::Truncated:
      return "Truncated";
  }
  return "Truncated";
}

void RadialSolution::finalize() {
  u_interp_ = MonotoneCubic::with_slopes(r, u, du);
  du_interp_ = MonotoneCubic::with_slopes(r, du, ddu);
  if (dddu.size() == r.size() && r.size() >= 2) {
    ddu_interp_ = MonotoneCubic::hermite(r, ddu, dddu);
  } else {
    ddu_interp_ = MonotoneCubic();
  }
}

double RadialSolution::u_at(double x) const { return u_interp_(x); }
double RadialSolution::du_at(double x) const { return du_interp_(x); }
double RadialSolution::ddu_at(double x) const {
  return ddu_interp_.empty() ? du_interp_.derivative(x) : ddu_interp_(x);
}

double third_derivative(const ProblemSpec& spec, double r, double u, double du, double ddu) {
  const int N = spec.dimension;
  const double K = spec.K(r);
  if (r == 0.0) return 2.0 * (N - 1) * ddu * spec.K.derivative(0.0) / ((N + 1) * K);
  const double f = spec.f(u);
  const double X = std::pow(r / ((N - 1) * du), 1.0 / (N - 1));
  return spec.K.derivative(r) * f * X + K * spec.f.derivative(u) * du * X +
         K * f * X / (N - 1) * (1.0 / r - ddu / du) - (N - 2.0) * (ddu / r - du / (r * r));
}

LocalIntervalPlan plan_local_interval(const ProblemSpec& spec, double u0) {
  spec.check();
  if (!(u0 > 0.0)) throw DomainError("u0 must be positive");
  const int N = spec.dimension;
  LocalIntervalPlan p;
  p.h_star = std::min(0.25, u0 / 2.0);
  p.L = lipschitz_estimate(spec.f, u0 - p.h_star, u0 + p.h_star, 257);
  p.m = spec.f(u0 - p.h_star);
  p.M = p.L * p.h_star + spec.f(u0);
  if (!(p.m > 0.0)) throw AssumptionError("f(u0 - h*) must be positive");

  p.K_low = std::numeric_limits<double>::infinity();
  p.K_high = 0.0;
  for (int i = 0; i <= 1024; ++i) {
    const double k = spec.K(0.5 * i / 1024.0);
    p.K_low = std::min(p.K_low, k);
    p.K_high = std::max(p.K_high, k);
  }
  if (!(p.K_low > 0.0) || !std::isfinite(p.K_high)) {
    throw AssumptionError("K must be positive and finite on [0, 1/2]");
  }

  const double h_growth = 2.0 * (N - 1) * std::pow(p.K_high * p.M, -(N - 1.0) / N);
  const double h_contraction =
      p.L > 0.0 ? std::sqrt(2.0 * N * std::pow(p.K_low * p.m, 1.0 / N) / (p.K_high * p.L))
                : std::numeric_limits<double>::infinity();
  p.h = 0.9 * std::min({p.h_star, h_growth, h_contraction});
  p.contraction_bound =
      p.h * p.h * std::pow(p.K_low * p.m, -1.0 / N) * p.K_high * p.L / (2.0 * N);
  return p;
}

// ---------------------------------------------------------------------------

struct PicardOperator::Weights {
  std::vector<double> xi;  // nodes on [0, 1]
  std::vector<double> Q;   // J(xi_i) = sum_j Q_ij g_j
  std::vector<double> W;   // u(xi_i) - u0 = sum_j W_ij v_j (unit interval)
};

namespace {

std::mutex g_cache_mutex;
std::map<std::pair<int, int>, std::shared_ptr<const void>> g_cache;

// Lagrange basis at x for Chebyshev-Lobatto nodes, in barycentric form.
void lagrange_basis(const std::vector<double>& xi, const std::vector<double>& bw, double x,
                    std::vector<double>& out) {
  const std::size_t n = xi.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (x == xi[j]) {
      std::fill(out.begin(), out.end(), 0.0);
      out[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = bw[j] / (x - xi[j]);
    denom += out[j];
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= denom;
}

}  // namespace

PicardOperator::PicardOperator(int N, int nodes) : N_(N), n_(nodes) {
  if (N < 2) throw DomainError("dimension must be >= 2");
  if (nodes < 3) throw DomainError("Picard grid needs at least 3 nodes");
  std::lock_guard lock(g_cache_mutex);
  auto& slot = g_cache[{N, nodes}];
  if (!slot) {
    const int deg = nodes - 1;
    auto w = std::make_shared<Weights>();
    w->xi.resize(nodes);
    std::vector<double> bw(nodes);
    for (int i = 0; i < nodes; ++i) {
      w->xi[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * i / deg));
      bw[i] = ((i % 2) ? -1.0 : 1.0) * ((i == 0 || i == deg) ? 0.5 : 1.0);
    }
    // exact for polynomial integrands of degree nodes + N - 2
    const GaussLegendreRule gl = gauss_legendre_unit((nodes + N) / 2 + 16);
    const auto n = static_cast<std::size_t>(nodes);
    w->Q.assign(n * n, 0.0);
    w->W.assign(n * n, 0.0);
    std::vector<double> ell(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double s = gl.nodes[q];
        lagrange_basis(w->xi, bw, w->xi[i] * s, ell);
        const double qa = N * gl.weights[q] * std::pow(s, N - 1);
        const double wa = w->xi[i] * gl.weights[q];
        for (std::size_t j = 0; j < n; ++j) {
          w->Q[i * n + j] += qa * ell[j];
          w->W[i * n + j] += wa * ell[j];
        }
      }
    }
    slot = std::shared_ptr<const void>(std::move(w));
  }
  w_ = std::static_pointer_cast<const Weights>(slot);
}

std::vector<double> PicardOperator::nodes(double h) const {
  std::vector<double> out(w_->xi.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h * w_->xi[i];
  out.back() = h;
  return out;
}

PicardOperator::Image PicardOperator::apply(const ProblemSpec& spec, double u0, double h,
                                            std::span<const double> u) const {
  const auto n = static_cast<std::size_t>(n_);
  if (u.size() != n) throw DomainError("Picard state has the wrong size");
  const std::vector<double> x = nodes(h);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = spec.K(x[j]) * spec.f(u[j]);

  const double alpha = (N_ - 1.0) / N_;
  Image img;
  img.u.resize(n);
  img.du.resize(n);
  img.ddu.resize(n);
  std::vector<double> J(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += w_->Q[i * n + j] * g[j];
    if (!(acc > 0.0)) throw AssumptionError("K f(u) must stay positive on the local interval");
    J[i] = acc;
    const double Ja = std::pow(acc, alpha);
    img.du[i] = x[i] * Ja / (N_ - 1);
    img.ddu[i] = g[i] * std::pow(acc, -1.0 / N_) - (N_ - 2.0) * Ja / (N_ - 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += w_->W[i * n + j] * img.du[j];
    img.u[i] = u0 + h * acc;
  }
  return img;
}

// ---------------------------------------------------------------------------

RadialSolution picard_solve_local(const ProblemSpec& spec, double u0, const LocalIntervalPlan& plan,
                                  const SolverOptions& opts) {
  spec.check();
  if (!(u0 > 0.0)) throw DomainError("u0 must be positive");
  const int N = spec.dimension;
  const PicardOperator op(N, opts.picard_nodes);
  const double scale = std::max(1.0, std::abs(u0));
  const double tol = opts.picard_tol * scale;
  const double noise_floor = 1e2 * tol;

  RadialSolution sol;
  sol.N = N;
  sol.u0 = u0;
  sol.plan = plan;
  sol.u2_at_0 = std::pow(spec.K(0.0) * spec.f(u0), (N - 1.0) / N) / (N - 1);

  double h = plan.h;
  for (int attempt = 0; attempt <= opts.max_halvings; ++attempt, h *= 0.5) {
    PicardDiagnostics diag;
    diag.h = h;
    diag.halvings = attempt;
    std::vector<double> u(static_cast<std::size_t>(op.size()), u0);
    PicardOperator::Image img;
    bool escaped = false;
    for (int it = 1; it <= opts.picard_max_iter; ++it) {
      img = op.apply(spec, u0, h, u);
      double diff = 0.0;
      bool outside = false;
      for (std::size_t i = 0; i < u.size(); ++i) {
        diff = std::max(diff, std::abs(img.u[i] - u[i]));
        if (std::abs(img.u[i] - u0) > plan.h_star || !std::isfinite(img.u[i])) outside = true;
      }
      if (outside) {
        escaped = true;
        break;
      }
      if (!diag.differences.empty() && diag.differences.back() > noise_floor) {
        diag.contraction_ratio = std::max(diag.contraction_ratio, diff / diag.differences.back());
      }
      diag.differences.push_back(diff);
      diag.iterations = it;
      diag.final_difference = diff;
      u = img.u;
      if (diff <= tol) {
        diag.converged = true;
        break;
      }
    }
    if (escaped) continue;
    sol.picard = diag;
    sol.r = op.nodes(h);
    sol.u = img.u;
    sol.du = img.du;
    sol.ddu = img.ddu;
    sol.du.front() = 0.0;
    sol.u.front() = u0;
    sol.dddu.resize(sol.r.size());
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
      sol.dddu[i] = third_derivative(spec, sol.r[i], sol.u[i], sol.du[i], sol.ddu[i]);
    }
    sol.status = SolveStatus::Truncated;
    sol.reason = diag.converged ? "local interval" : "picard stall";
    sol.finalize();
    return sol;
  }
  sol.reason = "picard escape";
  sol.picard.halvings = opts.max_halvings;
  sol.r = {0.0};
  sol.u = {u0};
  sol.du = {0.0};
  sol.ddu = {sol.u2_at_0};
  sol.dddu.clear();
  return sol;
}

double extrapolate_blowup(double r1, double r2, double r3) {
  const double d1 = r2 - r1;
  const double d2 = r3 - r2;
  const double denom = d2 - d1;
  if (!(d2 < d1) || !(d2 > 0.0) || denom == 0.0) return r3;
  const double T = r3 - d2 * d2 / denom;
  return T >= r3 ? T : r3;
}

double extrapolate_blowup(std::span<const double> crossings) {
  std::vector<double> seq(crossings.begin(), crossings.end());
  if (seq.empty()) return std::numeric_limits<double>::quiet_NaN();
  while (seq.size() >= 3) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 2 < seq.size(); ++i) {
      next.push_back(extrapolate_blowup(seq[i], seq[i + 1], seq[i + 2]));
    }
    seq = std::move(next);
  }
  return seq.back();
}

namespace {

// Cubic Hermite value on [x0, x1].
double hermite(double x0, double x1, double y0, double y1, double m0, double m1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * m1;
}

double crossing(double x0, double x1, double y0, double y1, double m0, double m1, double level) {
  double lo = x0;
  double hi = x1;
  for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hermite(x0, x1, y0, y1, m0, m1, mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RadialSolution continue_ode(const ProblemSpec& spec, const RadialSolution& seed,
                            const SolverOptions& opts) {
  spec.check();
  if (seed.r.empty()) throw PreconditionError("seed solution is empty");
  RadialSolution sol = seed;
  const int N = spec.dimension;
  double r = seed.r.back();
  if (!(seed.u.back() > 0.0) || !(seed.du.back() > 0.0) || !(r > 0.0)) {
    throw PreconditionError("seed must end with u > 0, u' > 0 at r > 0");
  }

  auto rhs = [&](double x, const State<2>& y) {
    // y = (u, v)
    const double v = y[1];
    const double dv = spec.K(x) * spec.f(y[0]) * std::pow(x / ((N - 1) * v), 1.0 / (N - 1)) -
                      (N - 2.0) * v / x;
    return State<2>{v, dv};
  };

  State<2> y{seed.u.back(), seed.du.back()};
  State<2> dy = rhs(r, y);
  double h = std::min(opts.max_step, std::max(r, 1e-6) * 0.1);
  constexpr int kLevels = 5;
  double levels[kLevels];
  for (int i = 0; i < kLevels; ++i) levels[i] = opts.blowup_threshold * std::pow(10.0, 0.5 * (i - kLevels + 1));
  std::vector<double> cross;
  long steps = 0;
  sol.status = SolveStatus::Truncated;
  sol.reason.clear();

  while (true) {
    if (r >= opts.r_end) {
      sol.status = SolveStatus::ReachedOne;
      break;
    }
    const double ceiling = std::min(opts.max_step, (1.0 - r) / 8.0);
    h = std::min(h, ceiling);
    if (r + h > opts.r_end || opts.r_end - (r + h) < 1e-3 * h) h = opts.r_end - r;
    if (++steps > opts.max_steps) {
      sol.reason = "step budget exhausted";
      break;
    }
    if (!(h > 1e-14 * r)) {
      sol.reason = "step size underflow";
      break;
    }
    const auto res = dormand_prince_step<2>(rhs, r, y, dy, h, opts.rel_tol, opts.abs_tol);
    const bool finite = std::isfinite(res.error_norm) && std::isfinite(res.y[0]) &&
                        std::isfinite(res.y[1]);
    if (!finite || res.error_norm > 1.0) {
      h = next_step_size(h, finite ? res.error_norm : std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double r_new = (h == opts.r_end - r) ? opts.r_end : r + h;
    if (!(res.y[1] > 0.0)) {
      sol.status = SolveStatus::Truncated;
      sol.reason = "convexity lost";
      break;
    }
    while (cross.size() < kLevels && res.y[0] >= levels[cross.size()]) {
      if (y[0] >= levels[cross.size()]) {
        cross.push_back(r);  // started above this level
      } else {
        cross.push_back(crossing(r, r_new, y[0], res.y[0], y[1], res.y[1], levels[cross.size()]));
      }
    }
    sol.r.push_back(r_new);
    sol.u.push_back(res.y[0]);
    sol.du.push_back(res.y[1]);
    sol.ddu.push_back(res.dydx_end[1]);
    if (sol.dddu.size() + 1 == sol.r.size()) {
      sol.dddu.push_back(third_derivative(spec, r_new, res.y[0], res.y[1], res.dydx_end[1]));
    }
    r = r_new;
    y = res.y;
    dy = res.dydx_end;
    if (y[0] > opts.blowup_threshold) {
      sol.status = SolveStatus::BlewUp;
      sol.T = std::min(extrapolate_blowup(cross), opts.r_end);
      sol.reason = "u exceeded the blow-up threshold";
      break;
    }
    h = next_step_size(h, res.error_norm);
  }
  sol.finalize();
  return sol;
}

RadialSolution solve_ivp(const ProblemSpec& spec, double u0, const SolverOptions& opts) {
  const LocalIntervalPlan plan = plan_local_interval(spec, u0);
  RadialSolution local = picard_solve_local(spec, u0, plan, opts);
  if (local.reason != "local interval") return local;
  return continue_ode(spec, local, opts);
}

}  // namespace nmago
