#include "nmago/multiplicity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "nmago/error.hpp"

namespace nmago {

namespace {

std::vector<double> common_radii(const RadialSolution& a, const RadialSolution& b) {
  const double end = std::min(a.end_radius(), b.end_radius());
  std::vector<double> radii;
  for (double r : a.r) {
    if (r <= end) radii.push_back(r);
  }
  for (double r : b.r) {
    if (r <= end) radii.push_back(r);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  return radii;
}

}  // namespace

ComparisonReport compare_solutions(const RadialSolution& a, const RadialSolution& b) {
  ComparisonReport rep;
  rep.u0_low = a.u0;
  rep.u0_high = b.u0;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (double r : common_radii(a, b)) {
    const double gap = b.u_at(r) - a.u_at(r);
    ++rep.compared;
    if (!(gap > 0.0)) ++rep.violations;
    rep.min_gap = std::min(rep.min_gap, gap);
  }
  return rep;
}

ComparisonReport check_comparison(const ProblemSpec& spec, double u0_low, double u0_high,
                                  const SolverOptions& opts) {
  if (!(u0_low > 0.0) || !(u0_low < u0_high)) {
    throw PreconditionError("comparison needs 0 < u0_low < u0_high");
  }
  RadialSolution lo = solve_ivp(spec, u0_low, opts);
  RadialSolution hi = solve_ivp(spec, u0_high, opts);
  ComparisonReport rep = compare_solutions(lo, hi);
  rep.low = std::move(lo);
  rep.high = std::move(hi);
  return rep;
}

ConvexityReport verify_convexity(const RadialSolution& sol, int N) {
  if (sol.r.size() < 3) throw PreconditionError("convexity check needs at least 3 grid points");
  ConvexityReport rep;
  rep.min_radial = std::numeric_limits<double>::infinity();
  rep.min_tangential = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double r = sol.r[i];
    double radial = 0.0;
    double tangential = 0.0;
    if (r == 0.0) {
      radial = tangential = (N - 1) * sol.ddu[i];
    } else {
      radial = (N - 1) * sol.du[i] / r;
      tangential = sol.ddu[i] + (N - 2) * sol.du[i] / r;
    }
    ++rep.checked;
    rep.min_radial = std::min(rep.min_radial, radial);
    rep.min_tangential = std::min(rep.min_tangential, tangential);
    if (!(radial > 0.0 && tangential > 0.0) && rep.ok) {
      rep.ok = false;
      rep.failing_index = i;
      rep.failing_radius = r;
    }
  }
  return rep;
}

int worker_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NMAGO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

SandwichReport check_sandwich(const RadialSolution& sol, const BoundFamily& bounds,
                              const FamilyOptions& opts) {
  SandwichReport rep;
  rep.min_lower_gap = std::numeric_limits<double>::infinity();
  rep.min_upper_gap = std::numeric_limits<double>::infinity();
  std::vector<double> radii = opts.sample_radii;
  if (opts.include_grid_radii) {
    for (double r : sol.r) {
      if (r <= opts.probe_radius) radii.push_back(r);
    }
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  for (double r : radii) {
    if (r > sol.end_radius()) continue;
    const double u = sol.u_at(r);
    const double lo = u - (*bounds.w1)(r);
    const double hi = (*bounds.w2)(r) - u;
    ++rep.checked;
    rep.min_lower_gap = std::min(rep.min_lower_gap, lo);
    rep.min_upper_gap = std::min(rep.min_upper_gap, hi);
    if (!(lo > 0.0 && hi > 0.0)) {
      ++rep.violations;
      rep.failing_radii.push_back(r);
    }
  }
  rep.ok = rep.violations == 0;
  return rep;
}

bool blow_up_proxy(const RadialSolution& sol, const FamilyOptions& opts) {
  if (sol.status == SolveStatus::BlewUp) return true;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    if (sol.u[i] > opts.growth_threshold && sol.r[i] < 1.0) return true;
  }
  return sol.status == SolveStatus::ReachedOne && sol.u_at(opts.probe_radius) > opts.probe_threshold;
}

}  // namespace

FamilyResult solve_family(const ProblemSpec& spec, const BoundFamily& bounds, int count,
                          const FamilyOptions& opts) {
  if (count < 2) throw PreconditionError("family needs count >= 2");
  if (count > 10000) throw PreconditionError("family count must be <= 10000");
  if (!bounds.w1 || !bounds.w2) throw PreconditionError("bounds are not certified");
  const double lo = (*bounds.w1)(0.0);
  const double hi = (*bounds.w2)(0.0);
  const double span = hi - lo;
  const double a = lo + opts.endpoint_margin * span;
  const double b = hi - opts.endpoint_margin * span;

  FamilyResult res;
  res.members.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    res.members[i].index = static_cast<std::size_t>(i);
    res.members[i].u0 = a + (b - a) * i / (count - 1);
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < res.members.size(); i = next++) {
      FamilyMember& m = res.members[i];
      m.solution = solve_ivp(spec, m.u0, opts.solver);
      m.sandwich = check_sandwich(m.solution, bounds, opts);
      if (m.solution.r.size() >= 3) {
        m.convexity = verify_convexity(m.solution, spec.dimension);
      } else {
        m.convexity.ok = false;
      }
      m.blows_up = blow_up_proxy(m.solution, opts);
    }
  };
  const int threads = std::min(worker_threads(opts.threads), count);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < res.members.size(); ++i) {
    for (std::size_t j = i + 1; j < res.members.size(); ++j) {
      const ComparisonReport cmp =
          compare_solutions(res.members[i].solution, res.members[j].solution);
      res.ordering_checks += cmp.compared;
      res.ordering_violations += cmp.violations;
      if (cmp.violations > 0) {
        res.failures.push_back("members " + std::to_string(i) + " and " + std::to_string(j) +
                               " are not ordered");
        if (!res.offending_member) res.offending_member = j;
      }
    }
  }
  for (const FamilyMember& m : res.members) {
    const std::string tag = "member " + std::to_string(m.index) + ": ";
    if (!m.sandwich.ok) res.failures.push_back(tag + "sandwich violated");
    if (!m.convexity.ok) res.failures.push_back(tag + "convexity lost");
    if (!m.blows_up) res.failures.push_back(tag + "no blow-up");
    if (!m.ok() && !res.offending_member) res.offending_member = m.index;
  }
  res.passed = res.failures.empty();
  return res;
}

ScalarFn manufacture_weight(const ScalarFn& target, const ScalarFn& f, int N) {
  if (N < 2) throw DomainError("dimension must be >= 2");
  if (std::abs(target.derivative(0.0)) > 1e-12) throw PreconditionError("target needs u'(0) = 0");
  constexpr int kNodes = 1001;
  std::vector<double> xs(kNodes);
  std::vector<double> ys(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    const double r = 0.999 * i / (kNodes - 1);
    const double u = target(r);
    const double fu = f(u);
    if (!(fu != 0.0) || !std::isfinite(fu)) throw DomainError("f vanishes on the target profile");
    const double d1 = target.derivative(r);
    const double d2 = target.second_derivative(r);
    if (r > 0.0 && !(d1 > 0.0)) throw PreconditionError("target needs u' > 0 on (0, 1)");
    xs[i] = r;
    ys[i] = radial_lhs(N, d1, d2, r) / fu;
  }
  return ScalarFn::tabulated(std::move(xs), std::move(ys));
}

}  // namespace nmago
