#include "nmago/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nmago/error.hpp"

namespace nmago {

namespace {

void reject_unknown(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key \"" + key + "\" at " + where);
  }
}

double number_at(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer_at(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::vector<double> numbers_at(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

double optional_number(const Json& j, const std::string& key, const std::string& where,
                       double fallback) {
  return j.contains(key) ? number_at(j, key, where) : fallback;
}

void require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
}

}  // namespace

Json to_json(const ScalarFn& fn) {
  Json j;
  j["kind"] = to_string(fn.kind());
  switch (fn.kind()) {
    case FnKind::Power:
      j["exponent"] = fn.exponent();
      j["scale"] = fn.scale();
      break;
    case FnKind::Exponential:
      j["scale"] = fn.scale();
      j["rate"] = fn.rate();
      break;
    case FnKind::Affine:
      j["slope"] = fn.slope();
      j["intercept"] = fn.intercept();
      break;
    case FnKind::Constant:
      j["value"] = fn.value();
      break;
    case FnKind::PowerSingular:
      j["exponent"] = fn.exponent();
      j["scale"] = fn.scale();
      if (fn.center()) j["center"] = *fn.center();
      break;
    case FnKind::Tabulated:
      j["x"] = fn.table_x();
      j["y"] = fn.table_y();
      break;
    case FnKind::Polynomial:
      j["coefficients"] = fn.coefficients();
      break;
  }
  return j;
}

ScalarFn scalar_fn_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  require(j, "kind", where);
  if (!j.at("kind").is_string()) throw ConfigError(where + ".kind: expected a string");
  FnKind kind;
  try {
    kind = fn_kind_from_string(j.at("kind").get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(where + ".kind: " + e.what());
  }
  try {
    switch (kind) {
      case FnKind::Power:
        reject_unknown(j, where, {"kind", "exponent", "scale"});
        require(j, "exponent", where);
        return ScalarFn::power(number_at(j, "exponent", where),
                               optional_number(j, "scale", where, 1.0));
      case FnKind::Exponential:
        reject_unknown(j, where, {"kind", "scale", "rate"});
        return ScalarFn::exponential(optional_number(j, "scale", where, 1.0),
                                     optional_number(j, "rate", where, 1.0));
      case FnKind::Affine:
        reject_unknown(j, where, {"kind", "slope", "intercept"});
        require(j, "slope", where);
        require(j, "intercept", where);
        return ScalarFn::affine(number_at(j, "slope", where), number_at(j, "intercept", where));
      case FnKind::Constant:
        reject_unknown(j, where, {"kind", "value"});
        require(j, "value", where);
        return ScalarFn::constant(number_at(j, "value", where));
      case FnKind::PowerSingular: {
        reject_unknown(j, where, {"kind", "exponent", "scale", "center"});
        require(j, "exponent", where);
        std::optional<double> center;
        if (j.contains("center") && !j.at("center").is_null()) center = number_at(j, "center", where);
        return ScalarFn::power_singular(number_at(j, "exponent", where),
                                        optional_number(j, "scale", where, 1.0), center);
      }
      case FnKind::Tabulated:
        reject_unknown(j, where, {"kind", "x", "y"});
        require(j, "x", where);
        require(j, "y", where);
        return ScalarFn::tabulated(numbers_at(j, "x", where), numbers_at(j, "y", where));
      case FnKind::Polynomial:
        reject_unknown(j, where, {"kind", "coefficients"});
        require(j, "coefficients", where);
        return ScalarFn::polynomial(numbers_at(j, "coefficients", where));
    }
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unsupported kind");
}

Json to_json(const ProblemSpec& spec) {
  return Json{{"dimension", spec.dimension}, {"f", to_json(spec.f)}, {"K", to_json(spec.K)}};
}

ProblemSpec problem_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where, {"dimension", "f", "K"});
  ProblemSpec spec;
  if (j.contains("dimension")) spec.dimension = integer_at(j, "dimension", where);
  if (spec.dimension < 2) throw ConfigError(where + ".dimension: dimension must be ≥ 2");
  if (j.contains("f")) spec.f = scalar_fn_from_json(j.at("f"), where + ".f");
  if (j.contains("K")) spec.K = scalar_fn_from_json(j.at("K"), where + ".K");
  return spec;
}

// ---------------------------------------------------------------------------

BoundInputs RunConfig::bound_inputs() const {
  BoundInputs in;
  in.p = p;
  in.a = a;
  in.envelope_r_lo = envelope_r_lo;
  in.max_halvings = max_halvings;
  in.max_doublings = max_doublings;
  in.sub_safety = sub_safety;
  in.super_safety = super_safety;
  return in;
}

FamilyOptions RunConfig::family_options() const {
  FamilyOptions fo;
  fo.threads = threads;
  fo.growth_threshold = growth_threshold;
  fo.probe_threshold = probe_threshold;
  fo.endpoint_margin = endpoint_margin;
  fo.solver = solver;
  return fo;
}

void RunConfig::check() const {
  if (problem.dimension < 2) throw ConfigError("$.dimension: dimension must be ≥ 2");
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError(std::string(key) + ": must be positive");
  };
  positive(solver.rel_tol, "$.solver.rel_tol");
  positive(solver.abs_tol, "$.solver.abs_tol");
  positive(solver.picard_tol, "$.solver.picard_tol");
  positive(solver.blowup_threshold, "$.solver.blowup_threshold");
  positive(solver.max_step, "$.solver.max_step");
  positive(a, "$.a");
  positive(sub_safety, "$.bounds.sub_safety");
  positive(super_safety, "$.bounds.super_safety");
  positive(growth_threshold, "$.family.growth_threshold");
  positive(probe_threshold, "$.family.probe_threshold");
  if (!(solver.r_end > 0.0 && solver.r_end < 1.0)) throw ConfigError("$.solver.r_end: must lie in (0, 1)");
  if (!(envelope_r_lo > 0.0 && envelope_r_lo < 1.0)) {
    throw ConfigError("$.bounds.envelope_r_lo: must lie in (0, 1)");
  }
  if (!(endpoint_margin >= 0.0 && endpoint_margin < 0.5)) {
    throw ConfigError("$.family.endpoint_margin: must lie in [0, 0.5)");
  }
  if (solver.picard_nodes < 3) throw ConfigError("$.solver.picard_nodes: must be >= 3");
  if (solver.picard_max_iter < 1) throw ConfigError("$.solver.picard_max_iter: must be >= 1");
  if (validate_samples < 2) throw ConfigError("$.validate.samples: must be >= 2");
}

bool operator==(const RunConfig& x, const RunConfig& y) { return to_json(x) == to_json(y); }

Json to_json(const RunConfig& c) {
  Json j = to_json(c.problem);
  j["p"] = to_json(c.p);
  j["target"] = to_json(c.target);
  j["a"] = c.a;
  j["u0"] = c.u0 ? Json(*c.u0) : Json(nullptr);
  j["count"] = c.count;
  j["out"] = c.out;
  j["solver"] = Json{{"picard_nodes", c.solver.picard_nodes},
                     {"picard_tol", c.solver.picard_tol},
                     {"picard_max_iter", c.solver.picard_max_iter},
                     {"max_halvings", c.solver.max_halvings},
                     {"rel_tol", c.solver.rel_tol},
                     {"abs_tol", c.solver.abs_tol},
                     {"r_end", c.solver.r_end},
                     {"blowup_threshold", c.solver.blowup_threshold},
                     {"max_step", c.solver.max_step},
                     {"max_steps", c.solver.max_steps}};
  j["bounds"] = Json{{"envelope_r_lo", c.envelope_r_lo},
                     {"max_halvings", c.max_halvings},
                     {"max_doublings", c.max_doublings},
                     {"sub_safety", c.sub_safety},
                     {"super_safety", c.super_safety}};
  j["family"] = Json{{"growth_threshold", c.growth_threshold},
                     {"probe_threshold", c.probe_threshold},
                     {"endpoint_margin", c.endpoint_margin},
                     {"threads", c.threads}};
  j["validate"] = Json{{"samples", c.validate_samples}};
  return j;
}

RunConfig config_from_json(const Json& j, RunConfig c) {
  const std::string w = "$";
  reject_unknown(j, w, {"dimension", "f", "K", "p", "target", "a", "u0", "count", "out", "solver",
                        "bounds", "family", "validate"});
  Json problem = Json::object();
  for (const char* key : {"dimension", "f", "K"}) {
    if (j.contains(key)) problem[key] = j.at(key);
  }
  const ProblemSpec parsed = problem_from_json(problem, w);
  if (j.contains("dimension")) c.problem.dimension = parsed.dimension;
  if (j.contains("f")) c.problem.f = parsed.f;
  if (j.contains("K")) c.problem.K = parsed.K;
  if (j.contains("p")) c.p = scalar_fn_from_json(j.at("p"), "$.p");
  if (j.contains("target")) c.target = scalar_fn_from_json(j.at("target"), "$.target");
  if (j.contains("a")) c.a = number_at(j, "a", w);
  if (j.contains("u0")) {
    if (j.at("u0").is_null()) {
      c.u0.reset();
    } else {
      c.u0 = number_at(j, "u0", w);
    }
  }
  if (j.contains("count")) c.count = integer_at(j, "count", w);
  if (j.contains("out")) {
    if (!j.at("out").is_string()) throw ConfigError("$.out: expected a string");
    c.out = j.at("out").get<std::string>();
  }
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    const std::string ws = "$.solver";
    reject_unknown(s, ws, {"picard_nodes", "picard_tol", "picard_max_iter", "max_halvings",
                           "rel_tol", "abs_tol", "r_end", "blowup_threshold", "max_step",
                           "max_steps"});
    if (s.contains("picard_nodes")) c.solver.picard_nodes = integer_at(s, "picard_nodes", ws);
    if (s.contains("picard_tol")) c.solver.picard_tol = number_at(s, "picard_tol", ws);
    if (s.contains("picard_max_iter")) c.solver.picard_max_iter = integer_at(s, "picard_max_iter", ws);
    if (s.contains("max_halvings")) c.solver.max_halvings = integer_at(s, "max_halvings", ws);
    if (s.contains("rel_tol")) c.solver.rel_tol = number_at(s, "rel_tol", ws);
    if (s.contains("abs_tol")) c.solver.abs_tol = number_at(s, "abs_tol", ws);
    if (s.contains("r_end")) c.solver.r_end = number_at(s, "r_end", ws);
    if (s.contains("blowup_threshold")) c.solver.blowup_threshold = number_at(s, "blowup_threshold", ws);
    if (s.contains("max_step")) c.solver.max_step = number_at(s, "max_step", ws);
    if (s.contains("max_steps")) c.solver.max_steps = integer_at(s, "max_steps", ws);
  }
  if (j.contains("bounds")) {
    const Json& b = j.at("bounds");
    const std::string wb = "$.bounds";
    reject_unknown(b, wb, {"envelope_r_lo", "max_halvings", "max_doublings", "sub_safety",
                           "super_safety"});
    if (b.contains("envelope_r_lo")) c.envelope_r_lo = number_at(b, "envelope_r_lo", wb);
    if (b.contains("max_halvings")) c.max_halvings = integer_at(b, "max_halvings", wb);
    if (b.contains("max_doublings")) c.max_doublings = integer_at(b, "max_doublings", wb);
    if (b.contains("sub_safety")) c.sub_safety = number_at(b, "sub_safety", wb);
    if (b.contains("super_safety")) c.super_safety = number_at(b, "super_safety", wb);
  }
  if (j.contains("family")) {
    const Json& f = j.at("family");
    const std::string wf = "$.family";
    reject_unknown(f, wf, {"growth_threshold", "probe_threshold", "endpoint_margin", "threads"});
    if (f.contains("growth_threshold")) c.growth_threshold = number_at(f, "growth_threshold", wf);
    if (f.contains("probe_threshold")) c.probe_threshold = number_at(f, "probe_threshold", wf);
    if (f.contains("endpoint_margin")) c.endpoint_margin = number_at(f, "endpoint_margin", wf);
    if (f.contains("threads")) c.threads = integer_at(f, "threads", wf);
  }
  if (j.contains("validate")) {
    const Json& v = j.at("validate");
    reject_unknown(v, "$.validate", {"samples"});
    if (v.contains("samples")) c.validate_samples = integer_at(v, "samples", "$.validate");
  }
  c.check();
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (row[i]) out += format_number(*row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("cannot write " + path.string());
}

}  // namespace

void emit_csv(const Table& table, const std::filesystem::path& path) {
  write_file(path, format_csv(table));
}

std::string format_json(const Json& value) { return value.dump(2) + "\n"; }

void emit_json(const Json& value, const std::filesystem::path& path) {
  write_file(path, format_json(value));
}

Json to_json(const AssumptionReport& rep) {
  return Json{{"passed", rep.passed()},
              {"f_positive", rep.f_positive},
              {"f_nondecreasing", rep.f_nondecreasing},
              {"f_lipschitz_finite", rep.f_lipschitz_finite},
              {"f_max_local_slope", rep.f_max_local_slope},
              {"f_overflowed_samples", rep.f_overflowed_samples},
              {"K_positive", rep.K_positive},
              {"K_continuous", rep.K_continuous},
              {"K_singular_at_one", rep.K_singular_at_one},
              {"notes", rep.notes}};
}

Json to_json(const KOProfile& profile) {
  Json G = Json::array();
  const auto t = profile.G().t();
  const auto Gv = profile.G().values();
  for (std::size_t i = 0; i < t.size(); ++i) G.push_back({t[i], Gv[i]});
  Json g = Json::array();
  const auto s = profile.g().s();
  const auto gv = profile.g().values();
  const std::size_t stride = std::max<std::size_t>(1, (s.size() + 999) / 1000);
  for (std::size_t i = 0; i < s.size(); i += stride) g.push_back({s[i], gv[i]});
  if ((s.size() - 1) % stride != 0) g.push_back({s.back(), gv.back()});
  Json H = Json::array();
  for (std::size_t i = 0; i < profile.H_tau().size(); ++i) {
    H.push_back({profile.H_tau()[i], profile.H_values()[i]});
  }
  return Json{{"a", profile.anchor()},
              {"classification", to_string(profile.classification())},
              {"H_inf", profile.H_inf() ? Json(*profile.H_inf()) : Json(nullptr)},
              {"G_table", G},
              {"g_table", g},
              {"H_samples", H},
              {"g_truncated", profile.g().truncated()},
              {"warnings", profile.warnings()}};
}

Table solution_table(const RadialSolution& sol, const ProblemSpec& spec) {
  Table t{{"r", "u", "du", "residual"}, {}};
  const std::size_t n = sol.r.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<double> residual;
    if (i > 0 && i + 1 < n && sol.r[i] > 0.0 && sol.r[i] < 1.0 && sol.du[i] > 0.0) {
      const double h0 = sol.r[i] - sol.r[i - 1];
      const double h1 = sol.r[i + 1] - sol.r[i];
      const double ddu = (sol.du[i + 1] - sol.du[i]) * h0 / (h1 * (h0 + h1)) +
                         (sol.du[i] - sol.du[i - 1]) * h1 / (h0 * (h0 + h1));
      residual = eval_pde_residual(spec, sol.u[i], sol.du[i], ddu, sol.r[i]);
    }
    t.rows.push_back({sol.r[i], sol.u[i], sol.du[i], residual});
  }
  return t;
}

Json solution_sidecar(const RadialSolution& sol) {
  return Json{{"u0", sol.u0},
              {"status", to_string(sol.status)},
              {"T", sol.T ? Json(*sol.T) : Json(nullptr)},
              {"u2_at_0", sol.u2_at_0},
              {"reason", sol.reason},
              {"end_radius", sol.end_radius()},
              {"picard", Json{{"h", sol.picard.h},
                              {"iterations", sol.picard.iterations},
                              {"halvings", sol.picard.halvings},
                              {"converged", sol.picard.converged},
                              {"contraction_ratio", sol.picard.contraction_ratio},
                              {"contraction_bound", sol.plan.contraction_bound}}}};
}

Table residual_table(const ResidualReport& rep) {
  Table t{{"r", "lhs", "rhs", "margin"}, {}};
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    t.rows.push_back({rep.radii[i], rep.lhs[i], rep.rhs[i], rep.margins[i]});
  }
  return t;
}

Json to_json(const BoundFamily& fam, int samples) {
  Json w1 = Json::array();
  Json w2 = Json::array();
  for (int i = 0; i < samples; ++i) {
    const double r = (1.0 - 1e-6) * i / (samples - 1);
    w1.push_back({r, (*fam.w1)(r)});
    w2.push_back({r, (*fam.w2)(r)});
  }
  return Json{{"k1", fam.k1},
              {"k2", fam.k2},
              {"C1", fam.C1},
              {"C2", fam.C2},
              {"c", fam.c},
              {"d", fam.d},
              {"eps", fam.eps},
              {"M", fam.M},
              {"p", to_json(fam.p)},
              {"p_sub", to_json(fam.p_sub)},
              {"p_sup", to_json(fam.p_sup)},
              {"H_inf", fam.ko->H_inf() ? Json(*fam.ko->H_inf()) : Json(nullptr)},
              {"sub_max_margin", fam.sub_report.max_margin()},
              {"super_min_margin", fam.super_report.min_margin()},
              {"max_cross_rel_error",
               std::max(fam.sub_report.max_cross_rel_error, fam.super_report.max_cross_rel_error)},
              {"w1_blows_up", fam.w1_blows_up},
              {"w2_blows_up", fam.w2_blows_up},
              {"w1_samples", w1},
              {"w2_samples", w2}};
}

std::string member_file_name(const FamilyMember& m) {
  return "member_" + std::to_string(m.index) + "_u0_" + format_number(m.u0) + ".csv";
}

Json family_summary(const FamilyResult& res, const BoundFamily& fam) {
  Json members = Json::array();
  for (const FamilyMember& m : res.members) {
    members.push_back(Json{{"index", m.index},
                           {"u0", m.u0},
                           {"status", to_string(m.solution.status)},
                           {"T", m.solution.T ? Json(*m.solution.T) : Json(nullptr)},
                           {"sandwich_ok", m.sandwich.ok},
                           {"min_lower_gap", m.sandwich.min_lower_gap},
                           {"min_upper_gap", m.sandwich.min_upper_gap},
                           {"convex", m.convexity.ok},
                           {"blows_up", m.blows_up},
                           {"file", member_file_name(m)}});
  }
  return Json{{"passed", res.passed},
              {"count", res.members.size()},
              {"w1_at_0", (*fam.w1)(0.0)},
              {"w2_at_0", (*fam.w2)(0.0)},
              {"k1", fam.k1},
              {"k2", fam.k2},
              {"ordering_checks", res.ordering_checks},
              {"ordering_violations", res.ordering_violations},
              {"offending_member",
               res.offending_member ? Json(*res.offending_member) : Json(nullptr)},
              {"failures", res.failures},
              {"members", members}};
}

}  // namespace nmago
