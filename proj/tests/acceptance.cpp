// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nmago/bounds.hpp"
#include "nmago/ivp.hpp"
#include "nmago/keller_osserman.hpp"
#include "nmago/multiplicity.hpp"
#include "nmago/problem.hpp"

using namespace nmago;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

struct LocalSolve {
  double L;
  double ratio;
  double bound;
};
std::vector<LocalSolve> local_solves;

void record(const RadialSolution& sol) {
  local_solves.push_back({sol.plan.L, sol.picard.contraction_ratio, sol.plan.contraction_bound});
}

RadialSolution solve(const ProblemSpec& spec, double u0) {
  RadialSolution sol = solve_ivp(spec, u0);
  record(sol);
  return sol;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, const char* name, bool ok, const std::string& detail, double secs) {
  std::printf("[%s] criterion %d: %s | %s | %.2f s\n", ok ? "PASS" : "FAIL", id, name,
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void operator_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(2, 6);
  std::uniform_real_distribution<double> coef(0.1, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  const int cases = 1000;
  for (int c = 0; c < cases; ++c) {
    const int N = dim(rng);
    // zeta' = a r + b r^3 + e r exp(r^2), all coefficients positive
    const double a = coef(rng), b = coef(rng), e = coef(rng);
    auto d1 = [=](double r) { return a * r + b * r * r * r + e * r * std::exp(r * r); };
    auto d2 = [=](double r) {
      return a + 3 * b * r * r + e * std::exp(r * r) * (1 + 2 * r * r);
    };
    std::vector<double> x(N);
    double norm = 0.0;
    for (double& v : x) {
      v = unit(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double r = 0.02 + 0.97 * std::abs(unit(rng));
    for (double& v : x) v *= r / norm;
    const double ref = full_hessian_oracle(N, d1, d2, x);
    const double got = eval_radial_operator(N, d1(r), d2(r), r);
    worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
  }
  const double secs = seconds_since(t0);
  report(1, "operator product formula vs dense determinant", worst <= 1e-10 && secs < 5.0,
         fmt("%.0f cases, max rel err %.2e", cases, worst), secs);
}

void closed_form_solves() {
  const auto t0 = Clock::now();
  double worst_u = 0.0, worst_u2 = 0.0, slowest = 0.0;
  int cases = 0;
  for (int N : {2, 3, 4}) {
    for (double K0 : {1.0, 8.0}) {
      for (double u0 : {1.0, 2.0}) {
        const auto tc = Clock::now();
        const ProblemSpec spec{N, ScalarFn::constant(1.0), ScalarFn::constant(K0)};
        const RadialSolution sol = solve(spec, u0);
        const double c = std::pow(K0, (N - 1.0) / N) / (N - 1);
        for (int i = 0; i <= 990; ++i) {
          const double r = 0.99 * i / 990;
          worst_u = std::max(worst_u, std::abs(sol.u_at(r) - (u0 + c * r * r / 2)));
        }
        for (double r : sol.r) {
          if (r <= 0.99) worst_u = std::max(worst_u, std::abs(sol.u_at(r) - (u0 + c * r * r / 2)));
        }
        worst_u2 = std::max(worst_u2, std::abs(sol.u2_at_0 - c));
        slowest = std::max(slowest, seconds_since(tc));
        ++cases;
      }
    }
  }
  const bool ok = worst_u <= 1e-8 && worst_u2 <= 1e-10 && slowest < 2.0;
  report(2, "closed-form solves, f = 1", ok,
         fmt("%.0f cases, sup err %.2e, u''(0) err %.2e", cases, worst_u, worst_u2) +
             fmt(", slowest case %.3f s", slowest),
         seconds_since(t0));
}

void ko_grid() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (int N = 2; N <= 5; ++N) {
    const double pstar = N / (N - 1.0);
    int inconclusive = 0;
    std::string row = "N=" + std::to_string(N) + ":";
    for (double p : {0.5, pstar - 0.1, pstar + 0.1, 2.0 * N}) {
      const KOClass got = classify_ko(ScalarFn::power(p), N);
      const KOClass expect = p <= pstar ? KOClass::Diverges : KOClass::Converges;
      const bool borderline = std::abs(p - pstar) < 0.11;
      row += " " + to_string(got);
      if (got == expect) continue;
      if (borderline && got == KOClass::Inconclusive) {
        ++inconclusive;
      } else {
        ok = false;
      }
    }
    if (inconclusive > 1) ok = false;
    detail += row + (N < 5 ? "; " : "");
  }
  const double secs = seconds_since(t0);
  report(3, "Keller-Osserman classification grid", ok && secs < 10.0, detail, secs);
}

void ko_fidelity() {
  const auto t0 = Clock::now();
  const KOProfile c1(ScalarFn::constant(1.0), 2);
  const double G8 = c1.G()(8.0);
  double round = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 10.0 * i / 1000;
    round = std::max(round, std::abs(c1.G()(c1.g()(t)) - t));
  }
  const KOProfile lin(ScalarFn::power(1.0), 2);
  const KOProfile quad(ScalarFn::power(2.0), 2);
  const double h1 = c1.H_inf().value_or(NAN);
  const double h2 = lin.H_inf().value_or(NAN);
  const bool ok = std::abs(G8 - 3.1201) <= 1e-3 && round <= 1e-8 && std::abs(h1 - 0.5) <= 0.01 &&
                  std::abs(h2 - 2.0) <= 0.02 && !quad.H_inf().has_value();
  report(4, "G, g and H fidelity", ok,
         fmt("G(8)=%.6f, round trip %.2e, ", G8, round) +
             fmt("H_inf(f=1)=%.5f, H_inf(f=u)=%.5f, ", h1, h2) +
             (quad.H_inf() ? "H_inf(f=u^2) present" : "H_inf(f=u^2) absent"),
         seconds_since(t0));
}

void structural_identities() {
  const auto t0 = Clock::now();
  double g_err = 0.0, phi1 = 0.0, phi2 = 0.0, s_excess = -INFINITY;
  std::size_t nodes = 0;
  for (int N : {2, 3}) {
    for (const ScalarFn& f : {ScalarFn::constant(1.0), ScalarFn::power(1.0)}) {
      const KOProfile ko(f, N);
      const auto gv = ko.g().values();
      for (double g : gv) {
        const double lhs = std::pow(ko.g().first_derivative_at_value(g), 1.0 / (N - 1)) *
                           ko.g().second_derivative_at_value(g);
        g_err = std::max(g_err, std::abs(lhs / f(g) - 1.0));
        ++nodes;
      }
      for (double gamma : {(2.0 * N - 1) / (N - 1), 3.5}) {
        const PhiProfile prof(ScalarFn::power_singular(gamma), N);
        const double bound = (2.0 * N - 1) / (N - 1);
        for (double t : prof.t()) {
          if (t >= 1.0) continue;
          const double d1 = prof.dphi(t);
          const double d2 = prof.ddphi(t);
          phi1 = std::max(phi1, std::abs(std::pow(-d1, 1.0 / (N - 1)) * d2 / prof.p(t) - 1.0));
          const double ratio = -(N / (N - 1.0)) * prof.P(t) / prof.p(t);
          phi2 = std::max(phi2, std::abs((d1 / d2) / ratio - 1.0));
          s_excess = std::max(s_excess, (d1 * d1 / (prof.phi(t) * d2)) / bound - 1.0);
          ++nodes;
        }
      }
    }
  }
  const bool ok = g_err <= 1e-6 && phi1 <= 1e-6 && phi2 <= 1e-6 && s_excess <= 1e-6;
  report(5, "structural identities at grid nodes", ok,
         fmt("%.0f nodes, g: %.2e, ", static_cast<double>(nodes), g_err) +
             fmt("phi first: %.2e, phi second: %.2e, ", phi1, phi2) +
             fmt("S-bound worst rel excess %.2e", s_excess),
         seconds_since(t0));
}

void comparison_pairs() {
  const auto t0 = Clock::now();
  std::vector<ProblemSpec> matrix;
  for (int N : {2, 3}) {
    for (const ScalarFn& f : {ScalarFn::constant(1.0), ScalarFn::power(1.0)}) {
      for (const ScalarFn& K : {ScalarFn::constant(1.0), ScalarFn::power_singular(3.0, 1.0, 1.0)}) {
        matrix.push_back({N, f, K});
      }
    }
  }
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> pick(0, matrix.size() - 1);
  std::uniform_real_distribution<double> u0(0.2, 5.0);
  std::size_t compared = 0, violations = 0;
  int pairs = 0;
  for (; pairs < 50; ++pairs) {
    const ProblemSpec& s = matrix[pick(rng)];
    double a = u0(rng);
    double b = u0(rng);
    if (a > b) std::swap(a, b);
    if (a == b) b = a + 0.1;
    const ComparisonReport rep = check_comparison(s, a, b);
    record(rep.low);
    record(rep.high);
    compared += rep.compared;
    violations += rep.violations;
  }
  report(6, "comparison principle on random pairs", violations == 0 && compared > 0,
         fmt("%.0f pairs, %.0f radii compared, %.0f violations", pairs,
             static_cast<double>(compared), static_cast<double>(violations)),
         seconds_since(t0));
}

const ProblemSpec model{3, ScalarFn::power(1.0), ScalarFn::power_singular(3.0, 1.0, 1.0)};

BoundFamily certification() {
  const auto t0 = Clock::now();
  BoundFamily fam = find_k_bounds(model);
  std::vector<double> fresh;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> inner(0.0, 0.9);
  std::uniform_real_distribution<double> expo(1.0, 6.0);
  for (int i = 0; i < 30; ++i) fresh.push_back(inner(rng));
  for (int i = 0; i < 20; ++i) fresh.push_back(1.0 - std::pow(10.0, -expo(rng)));
  std::sort(fresh.begin(), fresh.end());
  for (double& r : fresh) r = std::max(r, 1e-3);
  const InequalityReport sub = eval_inequality_residual(*fam.w1, model, fresh);
  const InequalityReport sup = eval_inequality_residual(*fam.w2, model, fresh);
  const double cross = std::max({fam.sub_report.max_cross_rel_error,
                                 fam.super_report.max_cross_rel_error, sub.max_cross_rel_error,
                                 sup.max_cross_rel_error});
  const std::size_t radii = fam.sub_report.radii.size() + fam.sub_report.excluded.size();
  const bool ok = fam.k1 < fam.k2 && radii == 200 && fam.sub_report.max_margin() <= 0.0 &&
                  fam.super_report.min_margin() >= 0.0 && sub.max_margin() <= 0.0 &&
                  sup.min_margin() >= 0.0 && fresh.size() == 50 && cross <= 1e-6;
  const double secs = seconds_since(t0);
  report(7, "sub/super-solution certification", ok && secs < 60.0,
         fmt("k1=%.4g k2=%.4g, ", fam.k1, fam.k2) +
             fmt("sub max margin %.3g, super min margin %.3g, ", fam.sub_report.max_margin(),
                 fam.super_report.min_margin()) +
             fmt("fresh: %.3g / %.3g, ", sub.max_margin(), sup.min_margin()) +
             fmt("cross err %.2e", cross),
         secs);
  return fam;
}

void multiplicity(const BoundFamily& fam, double bounds_secs) {
  const auto t0 = Clock::now();
  const FamilyResult res = solve_family(model, fam, 10);
  int sandwiched = 0, convex = 0, blown = 0;
  const double six[] = {0.0, 0.25, 0.5, 0.75, 0.9, 0.99};
  double u0_prev = -INFINITY;
  bool spread = true;
  for (const FamilyMember& m : res.members) {
    record(m.solution);
    bool in = true;
    for (double r : six) {
      const double u = m.solution.u_at(r);
      in = in && r <= m.solution.end_radius() && (*fam.w1)(r) < u && u < (*fam.w2)(r);
    }
    sandwiched += in && m.sandwich.ok;
    convex += m.convexity.ok && verify_convexity(m.solution, model.dimension).ok;
    blown += m.blows_up;
    spread = spread && m.u0 > u0_prev;
    u0_prev = m.u0;
  }
  const int n = static_cast<int>(res.members.size());
  const bool ok = res.passed && n == 10 && sandwiched == n && convex == n && blown == n &&
                  res.ordering_violations == 0 && spread;
  const double secs = seconds_since(t0) + bounds_secs;
  report(8, "multiplicity family of 10", ok && secs < 120.0,
         fmt("sandwiched %.0f, convex %.0f, blow-up proxy %.0f", sandwiched, convex, blown) +
             fmt(", %.0f ordering checks, %.0f violations", static_cast<double>(res.ordering_checks),
                 static_cast<double>(res.ordering_violations)),
         secs);
}

void picard_contraction() {
  const auto t0 = Clock::now();
  int with_L = 0, bad = 0;
  double worst_excess = -INFINITY, worst_ratio = 0.0;
  for (const LocalSolve& s : local_solves) {
    if (!(s.L > 0.0)) continue;
    ++with_L;
    worst_ratio = std::max(worst_ratio, s.ratio);
    worst_excess = std::max(worst_excess, s.ratio - s.bound);
    if (!(s.ratio < 1.0 && s.ratio <= s.bound + 0.05)) ++bad;
  }
  report(9, "Picard contraction in every local solve with L > 0", bad == 0 && with_L > 0,
         fmt("%.0f local solves, max ratio %.3g, max ratio - bound %.3g", with_L, worst_ratio,
             worst_excess),
         seconds_since(t0));
}

void manufactured() {
  const auto t0 = Clock::now();
  struct Target {
    ScalarFn u;
    int N;
  };
  const Target targets[] = {{ScalarFn::polynomial({1.0, 0.0, 0.5}), 2},
                            {ScalarFn::polynomial({1.0, 0.0, 1.0}), 3}};
  double worst = 0.0;
  for (const Target& t : targets) {
    const ProblemSpec spec{t.N, ScalarFn::constant(1.0),
                           manufacture_weight(t.u, ScalarFn::constant(1.0), t.N)};
    const RadialSolution sol = solve(spec, t.u(0.0));
    for (int i = 0; i <= 950; ++i) {
      const double r = 0.95 * i / 950;
      worst = std::max(worst, std::abs(sol.u_at(r) - t.u(r)));
    }
  }
  report(10, "manufactured round trips", worst <= 1e-7, fmt("sup err %.2e", worst),
         seconds_since(t0));
}

}  // namespace

int main() {
  const auto run = [](const char* name, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("[FAIL] %s: exception: %s\n", name, e.what());
      ++failures;
    }
  };
  run("criterion 1", operator_oracle);
  run("criterion 2", closed_form_solves);
  run("criterion 3", ko_grid);
  run("criterion 4", ko_fidelity);
  run("criterion 5", structural_identities);
  run("criterion 6", comparison_pairs);
  run("criteria 7-8", [] {
    const auto t0 = Clock::now();
    const BoundFamily fam = certification();
    multiplicity(fam, seconds_since(t0));
  });
  run("criterion 10", manufactured);
  run("criterion 9", picard_contraction);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
