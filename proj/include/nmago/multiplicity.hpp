#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nmago/bounds.hpp"
#include "nmago/ivp.hpp"

namespace nmago {

struct ComparisonReport {
  double u0_low = 0.0;
  double u0_high = 0.0;
  RadialSolution low;
  RadialSolution high;
  std::size_t compared = 0;
  std::size_t violations = 0;
  double min_gap = 0.0;  // min of u_high - u_low over the common radii
  [[nodiscard]] bool ordered() const { return violations == 0 && compared > 0; }
};

/// Ordering of two solutions on the union of their grids up to the smaller
/// end radius.  Throws PreconditionError unless 0 < u0_low < u0_high.
[[nodiscard]] ComparisonReport check_comparison(const ProblemSpec& spec, double u0_low,
                                                double u0_high, const SolverOptions& opts = {});

/// Pointwise ordering u_a < u_b of two solutions at the union of their grids.
[[nodiscard]] ComparisonReport compare_solutions(const RadialSolution& a, const RadialSolution& b);

struct ConvexityReport {
  bool ok = true;
  std::size_t checked = 0;
  std::optional<std::size_t> failing_index;
  double failing_radius = 0.0;
  double min_radial = 0.0;      // min of (N-1) u' / r
  double min_tangential = 0.0;  // min of u'' + (N-2) u' / r
};

/// Both eigenvalue families of Laplacian(u) I - D^2 u at every grid node,
/// with u'' taken from the stored ODE values.  At r = 0 the test is
/// (N-1) u''(0) > 0.  Throws PreconditionError with fewer than 3 nodes.
[[nodiscard]] ConvexityReport verify_convexity(const RadialSolution& sol, int N);

struct SandwichReport {
  bool ok = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double min_lower_gap = 0.0;  // min u - w1
  double min_upper_gap = 0.0;  // min w2 - u
  std::vector<double> failing_radii;
};

struct FamilyOptions {
  int threads = 0;  // 0: NMAGO_THREADS, else the number of processors
  double growth_threshold = 1e6;
  double probe_threshold = 1e4;
  double probe_radius = 1.0 - 1e-6;
  double endpoint_margin = 0.01;
  bool include_grid_radii = true;
  std::vector<double> sample_radii{0.0, 0.25, 0.5, 0.75, 0.9, 0.99};
  SolverOptions solver{};
};

struct FamilyMember {
  std::size_t index = 0;
  double u0 = 0.0;
  RadialSolution solution;
  SandwichReport sandwich;
  ConvexityReport convexity;
  bool blows_up = false;
  [[nodiscard]] bool ok() const { return sandwich.ok && convexity.ok && blows_up; }
};

struct FamilyResult {
  std::vector<FamilyMember> members;
  std::size_t ordering_checks = 0;
  std::size_t ordering_violations = 0;
  bool passed = false;
  std::optional<std::size_t> offending_member;
  std::vector<std::string> failures;
};

/// Number of worker threads from NMAGO_THREADS, else the processor count.
[[nodiscard]] int worker_threads(int requested = 0);

/// Solves count >= 2 problems with u0 spread uniformly inside (w1(0), w2(0))
/// and checks sandwich, blow-up proxy, pairwise ordering and convexity.
[[nodiscard]] FamilyResult solve_family(const ProblemSpec& spec, const BoundFamily& bounds,
                                        int count, const FamilyOptions& opts = {});

/// K(r) = LHS(target) / f(target(r)) on 1001 nodes of [0, 0.999], as a
/// tabulated monotone cubic.
[[nodiscard]] ScalarFn manufacture_weight(const ScalarFn& target, const ScalarFn& f, int N);

}  // namespace nmago
