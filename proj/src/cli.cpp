#include "nmago/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "nmago/error.hpp"
#include "nmago/io.hpp"

namespace nmago {

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<int> dim;
  std::optional<std::string> f;
  std::optional<std::string> K;
  std::optional<std::string> p;
  std::optional<std::string> target;
  std::optional<double> a;
  std::optional<double> u0;
  std::optional<int> count;
  std::optional<int> threads;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Flags& fl) {
  cmd->add_option("--config", fl.config, "JSON configuration file");
  cmd->add_option("--dim", fl.dim, "dimension N >= 2");
  cmd->add_option("--f", fl.f, "nonlinearity, KIND:PARAMS");
  cmd->add_option("--K", fl.K, "weight K(r), KIND:PARAMS");
  cmd->add_option("--p", fl.p, "class weight p(t), KIND:PARAMS");
  cmd->add_option("--target", fl.target, "manufactured profile u(r), KIND:PARAMS");
  cmd->add_option("--a", fl.a, "anchor of G");
  cmd->add_option("--u0", fl.u0, "initial value u(0)");
  cmd->add_option("--count", fl.count, "number of family members");
  cmd->add_option("--threads", fl.threads, "worker threads for family");
  cmd->add_option("--out", fl.out, "output file or directory");
}

RunConfig resolve(const Flags& fl) {
  RunConfig cfg;
  if (fl.config) cfg = load_config(*fl.config);
  if (fl.dim) cfg.problem.dimension = *fl.dim;
  if (fl.f) cfg.problem.f = parse_scalar_fn(*fl.f);
  if (fl.K) cfg.problem.K = parse_scalar_fn(*fl.K);
  if (fl.p) cfg.p = parse_scalar_fn(*fl.p);
  if (fl.target) cfg.target = parse_scalar_fn(*fl.target);
  if (fl.a) cfg.a = *fl.a;
  if (fl.u0) cfg.u0 = *fl.u0;
  if (fl.count) cfg.count = *fl.count;
  if (fl.threads) cfg.threads = *fl.threads;
  if (fl.out) cfg.out = *fl.out;
  cfg.check();
  if (cfg.u0 && !(*cfg.u0 > 0.0)) throw ConfigError("u0 must be positive");
  return cfg;
}

void print_json_or_write(const Json& j, const std::string& out, std::ostream& os) {
  if (out.empty()) {
    os << format_json(j);
  } else {
    emit_json(j, out);
  }
}

int cmd_validate(const RunConfig& cfg, std::ostream& os) {
  const AssumptionReport rep = validate_assumptions(cfg.problem, cfg.validate_samples);
  const Json j = to_json(rep);
  if (!cfg.out.empty()) emit_json(j, cfg.out);
  for (const char* key : {"f_positive", "f_nondecreasing", "f_lipschitz_finite", "K_positive",
                          "K_continuous", "K_singular_at_one"}) {
    os << key << ": " << (j.at(key).get<bool>() ? "true" : "false") << '\n';
  }
  for (const auto& note : rep.notes) os << "note: " << note << '\n';
  os << (rep.passed() ? "passed" : "failed") << '\n';
  return rep.passed() ? kExitOk : kExitCheckFailed;
}

int cmd_classify(const RunConfig& cfg, std::ostream& os) {
  const LadderOutcome res = classify_ko_detail(cfg.problem.f, cfg.problem.dimension);
  os << to_string(res.verdict) << '\n';
  if (!cfg.out.empty()) {
    emit_json(Json{{"classification", to_string(res.verdict)},
                   {"slopes", res.slopes},
                   {"increments", res.increments}},
              cfg.out);
  }
  return kExitOk;
}

int cmd_ko_profile(const RunConfig& cfg, std::ostream& os) {
  KOOptions opts;
  opts.a = cfg.a;
  const KOProfile profile(cfg.problem.f, cfg.problem.dimension, opts);
  print_json_or_write(to_json(profile), cfg.out, os);
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& os) {
  if (!cfg.u0) throw ConfigError("u0 is required for solve");
  const RadialSolution sol = solve_ivp(cfg.problem, *cfg.u0, cfg.solver);
  const Table table = solution_table(sol, cfg.problem);
  if (cfg.out.empty()) {
    os << format_csv(table);
  } else {
    emit_csv(table, cfg.out);
    std::filesystem::path side(cfg.out);
    side.replace_extension(".json");
    emit_json(solution_sidecar(sol), side);
    os << "status: " << to_string(sol.status) << '\n';
    if (sol.T) os << "T: " << format_number(*sol.T) << '\n';
    os << "end_radius: " << format_number(sol.end_radius()) << '\n';
  }
  return sol.status == SolveStatus::Truncated ? kExitCheckFailed : kExitOk;
}

void write_bounds(const BoundFamily& fam, const std::filesystem::path& dir) {
  emit_json(to_json(fam), dir / "bounds.json");
  emit_csv(residual_table(fam.sub_report), dir / "sub_residual.csv");
  emit_csv(residual_table(fam.super_report), dir / "super_residual.csv");
}

int cmd_bounds(const RunConfig& cfg, std::ostream& os) {
  const BoundFamily fam = find_k_bounds(cfg.problem, cfg.bound_inputs());
  if (cfg.out.empty()) {
    os << format_json(to_json(fam));
  } else {
    write_bounds(fam, cfg.out);
    os << "k1: " << format_number(fam.k1) << "\nk2: " << format_number(fam.k2) << '\n';
  }
  return kExitOk;
}

int cmd_family(const RunConfig& cfg, std::ostream& os) {
  const BoundFamily fam = find_k_bounds(cfg.problem, cfg.bound_inputs());
  const FamilyResult res = solve_family(cfg.problem, fam, cfg.count, cfg.family_options());
  const Json summary = family_summary(res, fam);
  if (cfg.out.empty()) {
    os << format_json(summary);
  } else {
    const std::filesystem::path dir(cfg.out);
    write_bounds(fam, dir);
    emit_json(summary, dir / "family.json");
    for (const FamilyMember& m : res.members) {
      emit_csv(solution_table(m.solution, cfg.problem), dir / member_file_name(m));
    }
    os << (res.passed ? "passed" : "failed") << '\n';
  }
  for (const auto& f : res.failures) os << "failure: " << f << '\n';
  return res.passed ? kExitOk : kExitCheckFailed;
}

int cmd_manufacture(const RunConfig& cfg, std::ostream& os) {
  ProblemSpec spec = cfg.problem;
  spec.K = manufacture_weight(cfg.target, spec.f, spec.dimension);
  const RadialSolution sol = solve_ivp(spec, cfg.target(0.0), cfg.solver);
  double err = 0.0;
  for (int i = 0; i <= 950; ++i) {
    const double r = 0.95 * i / 950.0;
    err = std::max(err, std::abs(sol.u_at(r) - cfg.target(r)));
  }
  if (!cfg.out.empty()) {
    Table t{{"r", "K"}, {}};
    for (std::size_t i = 0; i < spec.K.table_x().size(); ++i) {
      t.rows.push_back({spec.K.table_x()[i], spec.K.table_y()[i]});
    }
    emit_csv(t, cfg.out);
  }
  os << "roundtrip_sup_error: " << format_number(err) << '\n';
  return err <= 1e-7 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial boundary blow-up solutions of the (N-1)-Monge-Ampere equation", "nmago"};
  app.require_subcommand(1);
  Flags fl;
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::ostream&);
  };
  const Entry entries[] = {
      {"validate", "check the standing assumptions on f and K", cmd_validate},
      {"classify-ko", "classify the Keller-Osserman integral of f", cmd_classify},
      {"ko-profile", "tables of G, g and H", cmd_ko_profile},
      {"solve", "solve the radial initial value problem", cmd_solve},
      {"bounds", "certified sub- and super-solutions", cmd_bounds},
      {"family", "sandwiched family of blow-up solutions", cmd_family},
      {"manufacture", "manufactured weight and solver round trip", cmd_manufacture},
  };
  std::vector<CLI::App*> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, fl);
    subs.push_back(sub);
  }
  CLI::App* defaults = app.add_subcommand("defaults", "print the default configuration");

  if (argv.size() > 1 && !argv[1].empty() && argv[1][0] != '-') {
    const bool known = argv[1] == "defaults" ||
                       std::any_of(std::begin(entries), std::end(entries),
                                   [&](const Entry& e) { return argv[1] == e.name; });
    if (!known) {
      err << "error: unknown subcommand \"" << argv[1] << "\"\n" << app.help();
      return kExitUsage;
    }
  }
  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  if (cargv.empty()) cargv.push_back("nmago");
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (defaults->parsed()) {
      out << format_json(to_json(RunConfig{}));
      return kExitOk;
    }
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return entries[i].fn(resolve(fl), out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  err << "error: no subcommand\n" << app.help();
  return kExitUsage;
}

}  // namespace nmago
