#include "fml/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fml/dataset.hpp"
#include "fml/experiments.hpp"
#include "fml/hmin.hpp"
#include "fml/verify.hpp"

namespace fml {

namespace {

using nlohmann::json;

json solver_result_json(const ModelSpace& s, const SolverResult& r) {
  json med = json::array();
  for (Eigen::Index i = 0; i < r.median.coords.size(); ++i) med.push_back(r.median.coords(i));
  return json{{"schema_version", 1},
              {"curvature", s.curvature()},
              {"dim", s.dim()},
              {"median", std::move(med)},
              {"cost", r.cost},
              {"residual", r.residual},
              {"iterations", r.iterations},
              {"cluster_diameter", r.cluster_diameter},
              {"unique", r.unique_flag},
              {"converged", r.converged}};
}

json bound_report_json(const BoundReport& r) {
  json j{{"schema_version", 1},
         {"curvature", r.curvature},
         {"alpha", r.alpha},
         {"rho", r.rho},
         {"r_basic", r.r_basic},
         {"r_star_finite", std::isfinite(r.r_star)},
         {"assumption_ok", r.assumption_ok},
         {"case", to_string(r.case_tag)}};
  j["r_star"] = std::isfinite(r.r_star) ? json(r.r_star) : json(nullptr);
  j["refined_radius"] = r.refined_radius ? json(*r.refined_radius) : json(nullptr);
  j["t_root"] = r.t_root ? json(*r.t_root) : json(nullptr);
  return j;
}

void emit(const json& j, const std::string& out_path) {
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write output file: " + out_path);
    out << j.dump(2) << "\n";
  }
  std::cout << j.dump(2) << "\n";
}

std::vector<int> parse_schedule(const std::string& text) {
  std::vector<int> sched;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      sched.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw InputError("unparsable schedule entry '" + cell + "'");
    }
  }
  return sched;
}

struct SolverFlags {
  double tol = 1e-9;
  int max_iters = 10000;
  int multistarts = 16;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol", tol, "solver stopping tolerance");
    cmd->add_option("--max-iters", max_iters, "iteration cap per start");
    cmd->add_option("--multistarts", multistarts, "number of solver starts");
  }
  SolverConfig config(std::uint64_t seed) const {
    SolverConfig cfg;
    cfg.tol = tol;
    cfg.max_iters = max_iters;
    cfg.multistarts = multistarts;
    cfg.seed = seed;
    return cfg;
  }
};

int run_impl(const std::vector<std::string>& args) {
  CLI::App app{"Frechet medians on constant-curvature model spaces"};
  app.require_subcommand(1);
  app.fallthrough();  // app-level --seed may follow the subcommand

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "master seed")->envname("FML_SEED");

  // solve
  auto* solve = app.add_subcommand("solve", "compute the Frechet median of a dataset");
  std::string in_path, out_path, format = "json";
  double curvature = 0.0;
  int dim = 2;
  SolverFlags sflags;
  solve->add_option("--input", in_path, "dataset file")->required();
  solve->add_option("--format", format, "dataset format: json|csv");
  solve->add_option("--curvature", curvature, "space curvature (csv datasets)");
  solve->add_option("--dim", dim, "space dimension (csv datasets)");
  solve->add_option("--out", out_path, "write result JSON here as well");
  sflags.attach(solve);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "evaluate the containment radii");
  double b_curvature = 0.0, b_alpha = 0.0, b_rho = 0.0;
  int b_dim = 2;
  std::string b_out;
  bounds->add_option("--curvature", b_curvature, "curvature upper bound")->required();
  bounds->add_option("--dim", b_dim, "dimension");
  bounds->add_option("--alpha", b_alpha, "concentrated mass fraction in (1/2, 1]")->required();
  bounds->add_option("--rho", b_rho, "concentration radius")->required();
  bounds->add_option("--out", b_out, "write report JSON here as well");

  // hmin
  auto* hmin_cmd = app.add_subcommand("hmin", "minimum of d(x,.) - d(z,.) over a ball");
  std::string h_geometry = "flat", h_out;
  double h_rho = 1.0, h_t = 0.0, h_u = 0.0;
  int h_brute_grid = 0;
  hmin_cmd->add_option("--geometry", h_geometry, "sphere|flat|hyperbolic")->required();
  hmin_cmd->add_option("--rho", h_rho, "ball radius")->required();
  hmin_cmd->add_option("--t", h_t, "x at distance rho + t from the center")->required();
  hmin_cmd->add_option("--u", h_u, "z at distance u from the center")->required();
  hmin_cmd->add_option("--brute-grid", h_brute_grid, "also run the boundary oracle");
  hmin_cmd->add_option("--out", h_out, "write a one-row CSV here");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the full invariant suite");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a named seeded experiment");
  std::string e_name, e_out, e_csv, e_input, e_schedule = "16,64,256,1024";
  double e_curvature = 1.0, e_alpha = 0.75, e_rho = 1.0, e_eps = 0.05;
  int e_dim = 2, e_trials = 0, e_npoints = 5, e_instances = 500, e_grid = 100000;
  SolverFlags eflags;
  exp->add_option("--name", e_name, "position-bound|consistency|genericity|hmin-verify")
      ->required();
  exp->add_option("--curvature", e_curvature, "space curvature");
  exp->add_option("--dim", e_dim, "space dimension");
  exp->add_option("--alpha", e_alpha, "concentrated mass fraction");
  exp->add_option("--rho", e_rho, "concentration radius");
  exp->add_option("--trials", e_trials, "trial count (0 = experiment default)");
  exp->add_option("--n-points", e_npoints, "points per genericity sample");
  exp->add_option("--instances", e_instances, "hmin instances per geometry");
  exp->add_option("--grid", e_grid, "hmin oracle grid size");
  exp->add_option("--input", e_input, "base dataset (consistency)");
  exp->add_option("--schedule", e_schedule, "comma-separated sample sizes (consistency)");
  exp->add_option("--eps-target", e_eps, "final-n distance target (consistency)");
  exp->add_option("--csv", e_csv, "CSV output path (hmin-verify)");
  exp->add_option("--out", e_out, "write report (with envelope) here");
  eflags.attach(exp);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (solve->parsed()) {
    const DatasetFormat fmt = format == "csv" ? DatasetFormat::csv : DatasetFormat::json;
    std::optional<ModelSpace> space;
    if (fmt == DatasetFormat::csv) space = ModelSpace(curvature, dim);
    const Dataset ds = load_dataset(in_path, fmt, space);
    const SolverResult res = median_solve(ds.measure, sflags.config(seed));
    emit(solver_result_json(ds.measure.space, res), out_path);
    return 0;
  }

  if (bounds->parsed()) {
    const ModelSpace space(b_curvature, b_dim);
    const ConcentrationSpec spec{space.origin(), b_rho, b_alpha};
    const BoundReport rep = refined_bound_radius(space, spec);
    emit(bound_report_json(rep), b_out);
    return 0;
  }

  if (hmin_cmd->parsed()) {
    HminGeometry g;
    if (h_geometry == "sphere") g = HminGeometry::sphere;
    else if (h_geometry == "flat") g = HminGeometry::flat;
    else if (h_geometry == "hyperbolic") g = HminGeometry::hyperbolic;
    else throw InputError("unknown geometry '" + h_geometry + "'");
    const HminInstance inst{g, h_rho, h_t, h_u};
    const double closed = hmin_closed_form(inst);
    std::cout << format_double(closed) << "\n";
    double brute = std::numeric_limits<double>::quiet_NaN();
    if (h_brute_grid > 0) {
      brute = hmin_bruteforce(inst, h_brute_grid);
      std::cout << "bruteforce " << format_double(brute) << " abs_err "
                << format_double(std::abs(closed - brute)) << "\n";
    }
    if (!h_out.empty()) {
      std::ofstream out(h_out);
      if (!out) throw InputError("cannot write output file: " + h_out);
      out << "geometry,rho,t,u,branch,closed_form,bruteforce,abs_err\n";
      out << h_geometry << ',' << format_double(h_rho) << ',' << format_double(h_t)
          << ',' << format_double(h_u) << ',' << hmin_branch(inst) << ','
          << format_double(closed) << ',' << format_double(brute) << ','
          << format_double(std::abs(closed - brute)) << "\n";
    }
    return 0;
  }

  if (verify_cmd->parsed()) {
    const std::vector<VerifyCheck> checks = run_verification(seed);
    bool all = true;
    for (const VerifyCheck& c : checks) {
      std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
      all = all && c.pass;
    }
    std::cout << (all ? "verify: all checks passed" : "verify: FAILURES present") << "\n";
    return all ? 0 : 1;
  }

  if (exp->parsed()) {
    ExperimentReport rep;
    if (e_name == "position-bound") {
      const ModelSpace space(e_curvature, e_dim);
      const ConcentrationSpec spec{space.origin(), e_rho, e_alpha};
      PositionBoundParams p;
      p.trials = e_trials > 0 ? e_trials : 500;
      p.seed = seed;
      p.solver = eflags.config(seed);
      rep = position_bound_experiment(space, spec, p);
    } else if (e_name == "consistency") {
      if (e_input.empty()) throw InputError("consistency experiment needs --input");
      const Dataset ds = load_dataset_json(e_input);
      rep = consistency_experiment(ds.measure, parse_schedule(e_schedule),
                                   e_trials > 0 ? e_trials : 50, seed, e_eps,
                                   eflags.config(seed));
    } else if (e_name == "genericity") {
      const ModelSpace space(e_curvature, e_dim);
      rep = genericity_experiment(space, e_npoints, e_trials > 0 ? e_trials : 200, seed,
                                  eflags.config(seed));
    } else if (e_name == "hmin-verify") {
      rep = hmin_verification_experiment(e_instances, e_grid, seed, e_csv);
    } else {
      throw InputError("unknown experiment '" + e_name + "'");
    }
    if (!e_out.empty()) write_report_with_envelope(rep, e_out);
    std::cout << rep.to_json() << "\n";
    return rep.pass ? 0 : 1;
  }

  return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return run_impl(args);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const SingularityError& e) {
    std::cerr << "singularity: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace fml
