#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmago/bounds.hpp"
#include "nmago/ivp.hpp"
#include "nmago/keller_osserman.hpp"
#include "nmago/multiplicity.hpp"
#include "nmago/problem.hpp"

namespace nmago {

using Json = nlohmann::json;

// Keys of a JSON function description:
//   power          exponent, scale
//   exponential    scale, rate
//   affine         slope, intercept
//   constant       value
//   power_singular exponent, scale, center (optional)
//   tabulated      x, y
//   polynomial     coefficients
[[nodiscard]] Json to_json(const ScalarFn& fn);
/// `where` is the key path used in error messages, e.g. "$.f".
[[nodiscard]] ScalarFn scalar_fn_from_json(const Json& j, const std::string& where = "$");

[[nodiscard]] Json to_json(const ProblemSpec& spec);
[[nodiscard]] ProblemSpec problem_from_json(const Json& j, const std::string& where = "$");

/// Every tunable of the command line, initialised from the library defaults.
struct RunConfig {
  ProblemSpec problem;
  ScalarFn p = ScalarFn::power_singular(3.0);
  ScalarFn target = ScalarFn::polynomial({1.0, 0.0, 0.5});
  double a = 1.0;
  std::optional<double> u0;
  int count = 10;
  std::string out;
  SolverOptions solver;
  double envelope_r_lo = 0.5;
  int max_halvings = 40;
  int max_doublings = 40;
  double sub_safety = 0.99;
  double super_safety = 1.01;
  double growth_threshold = 1e6;
  double probe_threshold = 1e4;
  double endpoint_margin = 0.01;
  int threads = 0;
  int validate_samples = 64;

  [[nodiscard]] BoundInputs bound_inputs() const;
  [[nodiscard]] FamilyOptions family_options() const;
  /// Throws ConfigError naming the offending key.
  void check() const;
  friend bool operator==(const RunConfig&, const RunConfig&);
};

[[nodiscard]] Json to_json(const RunConfig& cfg);
/// Applies the keys present in `j` on top of `base`; unknown keys are rejected.
[[nodiscard]] RunConfig config_from_json(const Json& j, RunConfig base = {});
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Numeric table; missing cells are written as empty fields.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

/// "%.17g" numbers, ',' separators, '\n' line endings.
[[nodiscard]] std::string format_csv(const Table& table);
void emit_csv(const Table& table, const std::filesystem::path& path);
/// Two-space indented dump with sorted keys and a trailing newline.
[[nodiscard]] std::string format_json(const Json& value);
void emit_json(const Json& value, const std::filesystem::path& path);
[[nodiscard]] std::string format_number(double v);

[[nodiscard]] Json to_json(const AssumptionReport& rep);
[[nodiscard]] Json to_json(const KOProfile& profile);

/// Columns r, u, du, residual.  The residual uses a three-point difference of
/// u' for u'' and is blank at both ends.
[[nodiscard]] Table solution_table(const RadialSolution& sol, const ProblemSpec& spec);
[[nodiscard]] Json solution_sidecar(const RadialSolution& sol);

[[nodiscard]] Table residual_table(const ResidualReport& rep);
[[nodiscard]] Json to_json(const BoundFamily& fam, int samples = 101);

[[nodiscard]] std::string member_file_name(const FamilyMember& m);
[[nodiscard]] Json family_summary(const FamilyResult& res, const BoundFamily& fam);

}  // namespace nmago
