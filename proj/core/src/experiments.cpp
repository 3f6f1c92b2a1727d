#include "fml/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fml/dataset.hpp"
#include "fml/hmin.hpp"
#include "fml/rng.hpp"

namespace fml {

namespace {

using nlohmann::json;

constexpr double kContainmentSlack = 1e-6;
constexpr double kConsistencySlack = 1.2;     // 20% noise allowance per step
constexpr double kConsistencyFloor = 1e-9;    // absolute noise floor
constexpr double kUniqueFractionMin = 0.99;
constexpr double kCounterexampleDiameter = 0.1;
constexpr double kDegeneracyTol = 1e-12;
constexpr double kHminOracleTol = 1e-7;
constexpr double kOrderingSlack = 1e-10;
constexpr double kBranchGapTol = 1e-10;

json report_to_json_obj(const ExperimentReport& r) {
  json j;
  j["schema_version"] = 1;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["params"] = r.params;
  json trials = json::array();
  for (const auto& t : r.trials) trials.push_back(t);
  j["trials"] = std::move(trials);
  j["summary"] = r.summary;
  j["verdict"] = {{"pass", r.pass}, {"tolerances", r.tolerances}, {"checks", r.checks}};
  return j;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Point point_at(const ModelSpace& s, const Point& center,
               const std::vector<TangentVector>& basis, double angle, double radius) {
  TangentVector v{center, std::cos(angle) * basis[0].vec + std::sin(angle) * basis[1].vec};
  v.vec *= radius;  // basis vectors are Riemannian-unit
  return exp_map(s, v);
}

}  // namespace

std::string ExperimentReport::to_json(int indent) const {
  return report_to_json_obj(*this).dump(indent);
}

void write_report_with_envelope(const ExperimentReport& rep, const std::string& path) {
  json j;
  j["envelope"] = {
      {"created_unix",
       std::chrono::duration_cast<std::chrono::seconds>(
           std::chrono::system_clock::now().time_since_epoch())
           .count()}};
  j["report"] = report_to_json_obj(rep);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write report file: " + path);
  out << j.dump(2) << "\n";
}

bool recompute_verdict(const ExperimentReport& rep) {
  if (rep.experiment == "position-bound") {
    const double bound =
        rep.tolerances.at("certified_radius") + rep.tolerances.at("containment_slack");
    for (const auto& t : rep.trials)
      if (t.at("dist_to_center") > bound) return false;
    return true;
  }
  if (rep.experiment == "consistency") {
    std::map<double, std::vector<double>> by_n;
    for (const auto& t : rep.trials) by_n[t.at("n")].push_back(t.at("dist"));
    std::vector<double> medians;
    for (auto& [n, v] : by_n) medians.push_back(median_of(std::move(v)));
    for (std::size_t i = 1; i < medians.size(); ++i)
      if (medians[i] > kConsistencySlack * medians[i - 1] + kConsistencyFloor) return false;
    return !medians.empty() && medians.back() < rep.tolerances.at("eps_target");
  }
  if (rep.experiment == "genericity") {
    double unique = 0.0, counted = 0.0;
    for (const auto& t : rep.trials) {
      if (t.at("degenerate") != 0.0) continue;
      counted += 1.0;
      if (t.at("unique") != 0.0) unique += 1.0;
    }
    const bool fraction_ok = counted > 0.0 && unique / counted >= kUniqueFractionMin;
    return fraction_ok && rep.checks.at("counterexample_nonunique") &&
           rep.checks.at("collinear_probe_detected");
  }
  if (rep.experiment == "hmin-verify") {
    double max_err = 0.0, violations = 0.0, max_gap = 0.0;
    for (const auto& t : rep.trials) {
      if (t.count("abs_err")) max_err = std::max(max_err, t.at("abs_err"));
      if (t.count("ordering_violation")) violations += t.at("ordering_violation");
      if (t.count("branch_gap")) max_gap = std::max(max_gap, t.at("branch_gap"));
    }
    return max_err < kHminOracleTol && violations == 0.0 && max_gap < kBranchGapTol;
  }
  throw InputError("recompute_verdict: unknown experiment " + rep.experiment);
}

ExperimentReport position_bound_experiment(const ModelSpace& space,
                                           const ConcentrationSpec& spec,
                                           const PositionBoundParams& params) {
  spec.validate(space);
  if (!assumption_check(space, spec))
    throw InputError("position_bound_experiment: concentration assumption violated");
  if (params.trials < 1 || params.directions < 1 || params.inside_points < 1)
    throw InputError("position_bound_experiment: counts must be positive");
  if (space.dim() != 2)
    throw InputError("position_bound_experiment: directional sweep is two-dimensional");

  const BoundReport bound = refined_bound_radius(space, spec);
  const bool certified = bound.refined_radius.has_value();
  const double certified_radius = certified ? *bound.refined_radius : bound.r_basic;
  const double refined_value = refined_radius_formula(space, spec.alpha, spec.rho);

  // Adversary distance sweep: geometric schedule between just outside the
  // ball and either 95% of the margin to the cut scale (sphere) or 50 rho.
  // Hyperboloid coordinates grow like e^d, so the sweep is capped where the
  // embedding still resolves pairwise distances (around radius 8).
  const double d_lo = 1.05 * spec.rho;
  double d_hi = space.curvature() > 0.0
                    ? bound.r_basic + 0.95 * (bound.r_star - bound.r_basic)
                    : 50.0 * spec.rho;
  if (space.curvature() < 0.0)
    d_hi = std::min(d_hi, 8.0 / std::sqrt(-space.curvature()));
  d_hi = std::max(d_hi, 1.5 * d_lo);
  const bool has_adversary = spec.alpha < 1.0;
  const std::vector<TangentVector> basis = orthonormal_tangent_basis(space, spec.center);

  ExperimentReport rep;
  rep.experiment = "position-bound";
  rep.seed = params.seed;
  rep.params = {{"curvature", space.curvature()},
                {"dim", static_cast<double>(space.dim())},
                {"alpha", spec.alpha},
                {"rho", spec.rho},
                {"trials", static_cast<double>(params.trials)},
                {"directions", static_cast<double>(params.directions)},
                {"inside_points", static_cast<double>(params.inside_points)},
                {"boundary_every", static_cast<double>(params.boundary_every)},
                {"adv_dist_lo", d_lo},
                {"adv_dist_hi", d_hi}};
  rep.tolerances = {{"containment_slack", kContainmentSlack},
                    {"certified_radius", certified_radius}};
  rep.checks["bound_certified"] = certified;

  const int rows = std::max(1, (params.trials + params.directions - 1) / params.directions);
  double max_dist = 0.0;
  int not_converged = 0;
  bool contained = true;
  bool refined_contained = true;

  for (int trial = 0; trial < params.trials; ++trial) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(trial)));
    const bool boundary_mode = params.boundary_every > 0 && trial % params.boundary_every == 0;

    std::vector<Point> pts;
    std::vector<double> w;
    if (boundary_mode) {
      // Extreme placement: all concentrated mass on one boundary point.
      const double ang = rng.uniform(0.0, 2.0 * ModelSpace::pi());
      pts.push_back(point_at(space, spec.center, basis, ang, spec.rho));
      w.push_back(spec.alpha);
    } else {
      const Ball inside{spec.center, spec.rho};
      for (int i = 0; i < params.inside_points; ++i) {
        pts.push_back(uniform_random_point(space, rng.next_u64(), inside));
        w.push_back(spec.alpha / params.inside_points);
      }
    }

    double adv_distance = 0.0;
    double direction = 0.0;
    if (has_adversary) {
      const int dir_idx = trial % params.directions;
      const int row = trial / params.directions;
      const double frac = rows > 1 ? static_cast<double>(row) / (rows - 1) : 1.0;
      adv_distance = d_lo * std::pow(d_hi / d_lo, frac);
      direction = 2.0 * ModelSpace::pi() * dir_idx / params.directions;
      pts.push_back(point_at(space, spec.center, basis, direction, adv_distance));
      w.push_back(1.0 - spec.alpha);
    }

    DiscreteMeasure mu{space, std::move(pts), std::move(w)};
    SolverConfig cfg = params.solver;
    cfg.seed = derive_seed(params.seed, 100000 + static_cast<std::uint64_t>(trial));
    const SolverResult sol = median_solve(mu, cfg);
    const double d = dist(space, sol.median, spec.center);

    max_dist = std::max(max_dist, d);
    if (!sol.converged) ++not_converged;
    if (d > certified_radius + kContainmentSlack) contained = false;
    if (d > refined_value + kContainmentSlack) refined_contained = false;

    rep.trials.push_back({{"trial", static_cast<double>(trial)},
                          {"mode", boundary_mode ? 1.0 : 0.0},
                          {"direction", direction},
                          {"adv_distance", adv_distance},
                          {"dist_to_center", d},
                          {"cost", sol.cost},
                          {"residual", sol.residual},
                          {"converged", sol.converged ? 1.0 : 0.0}});
  }

  rep.summary = {{"max_dist_to_center", max_dist},
                 {"refined_radius_value", refined_value},
                 {"sharpness_ratio", max_dist / refined_value},
                 {"not_converged", static_cast<double>(not_converged)}};
  rep.checks["containment"] = contained;
  // Observational only when the sphere case is unverified.
  rep.checks["refined_containment_observed"] = refined_contained;
  rep.pass = contained;
  return rep;
}

ExperimentReport consistency_experiment(const DiscreteMeasure& mu,
                                        const std::vector<int>& n_schedule,
                                        int trials, std::uint64_t seed,
                                        double eps_target, const SolverConfig& solver) {
  mu.validate();
  if (n_schedule.empty()) throw InputError("consistency_experiment: empty schedule");
  for (std::size_t i = 0; i < n_schedule.size(); ++i) {
    if (n_schedule[i] < 1 || (i > 0 && n_schedule[i] <= n_schedule[i - 1]))
      throw InputError("consistency_experiment: schedule must be positive and increasing");
  }
  if (trials < 1) throw InputError("consistency_experiment: trials must be >= 1");

  const SolverResult base = median_solve(mu, solver);
  if (!base.unique_flag)
    throw InputError("consistency_experiment: base measure has a non-unique median cluster");
  const Point m = base.median;

  ExperimentReport rep;
  rep.experiment = "consistency";
  rep.seed = seed;
  rep.params = {{"curvature", mu.space.curvature()},
                {"dim", static_cast<double>(mu.space.dim())},
                {"support", static_cast<double>(mu.points.size())},
                {"trials", static_cast<double>(trials)},
                {"schedule_len", static_cast<double>(n_schedule.size())}};
  for (std::size_t i = 0; i < n_schedule.size(); ++i) {
    std::ostringstream key;
    key << "n_" << i;
    rep.params[key.str()] = n_schedule[i];
  }
  rep.tolerances = {{"eps_target", eps_target},
                    {"monotonicity_slack", kConsistencySlack},
                    {"noise_floor", kConsistencyFloor}};

  std::vector<double> cdf(mu.weights.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < mu.weights.size(); ++k) {
    acc += mu.weights[k];
    cdf[k] = acc;
  }

  std::vector<double> medians;
  for (std::size_t ni = 0; ni < n_schedule.size(); ++ni) {
    const int n = n_schedule[ni];
    std::vector<double> dists;
    for (int tr = 0; tr < trials; ++tr) {
      const std::uint64_t idx = ni * static_cast<std::uint64_t>(trials) + tr;
      Rng rng(derive_seed(seed, idx));
      // Empirical draws land on the support; consolidate to counts/n.
      std::vector<int> counts(mu.points.size(), 0);
      for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        const std::size_t k = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        ++counts[std::min(k, counts.size() - 1)];
      }
      std::vector<Point> pts;
      std::vector<double> w;
      for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) continue;
        pts.push_back(mu.points[k]);
        w.push_back(static_cast<double>(counts[k]) / n);
      }
      DiscreteMeasure mun{mu.space, std::move(pts), std::move(w)};
      SolverConfig cfg = solver;
      cfg.seed = derive_seed(seed, 500000 + idx);
      const SolverResult sol = median_solve(mun, cfg);
      const double d = dist(mu.space, sol.median, m);
      dists.push_back(d);
      rep.trials.push_back({{"n", static_cast<double>(n)},
                            {"trial", static_cast<double>(tr)},
                            {"dist", d},
                            {"cost", sol.cost},
                            {"unique", sol.unique_flag ? 1.0 : 0.0}});
    }
    medians.push_back(median_of(dists));
    std::ostringstream key;
    key << "median_dist_n" << n;
    rep.summary[key.str()] = medians.back();
  }

  bool monotone = true;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (medians[i] > kConsistencySlack * medians[i - 1] + kConsistencyFloor) monotone = false;
  const bool final_ok = medians.back() < eps_target;

  rep.summary["final_median_dist"] = medians.back();
  rep.checks["monotone_within_slack"] = monotone;
  rep.checks["final_below_target"] = final_ok;
  rep.pass = monotone && final_ok;
  return rep;
}

ExperimentReport genericity_experiment(const ModelSpace& space, int n_points,
                                       int trials, std::uint64_t seed,
                                       SolverConfig solver) {
  if (space.curvature() <= 0.0)
    throw InputError(
        "genericity_experiment: requires a compact space (kappa > 0); the "
        "almost-everywhere uniqueness statement is for compact manifolds");
  if (n_points < 3) throw InputError("genericity_experiment: needs N >= 3");
  if (trials < 1) throw InputError("genericity_experiment: trials must be >= 1");
  solver.multistarts = std::max(solver.multistarts, 32);

  const auto min_gram_eigenvalue = [&](const std::vector<Point>& pts) {
    const int adim = space.ambient_dim();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(adim, adim);
    for (const Point& p : pts) g += p.coords * p.coords.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    return es.eigenvalues().minCoeff();
  };

  ExperimentReport rep;
  rep.experiment = "genericity";
  rep.seed = seed;
  rep.params = {{"curvature", space.curvature()},
                {"dim", static_cast<double>(space.dim())},
                {"n_points", static_cast<double>(n_points)},
                {"trials", static_cast<double>(trials)},
                {"multistarts", static_cast<double>(solver.multistarts)}};
  rep.tolerances = {{"unique_fraction_min", kUniqueFractionMin},
                    {"counterexample_diameter_min", kCounterexampleDiameter},
                    {"degeneracy_tol", kDegeneracyTol}};

  int unique = 0, counted = 0, degenerate = 0;
  for (int tr = 0; tr < trials; ++tr) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(tr)));
    std::vector<Point> pts;
    for (int i = 0; i < n_points; ++i)
      pts.push_back(uniform_random_point(space, rng.next_u64()));
    const bool degen = min_gram_eigenvalue(pts) < kDegeneracyTol;

    DiscreteMeasure mu = DiscreteMeasure::with_uniform_weights(space, std::move(pts));
    SolverConfig cfg = solver;
    cfg.seed = derive_seed(seed, 700000 + static_cast<std::uint64_t>(tr));
    const SolverResult sol = median_solve(mu, cfg);

    if (degen) {
      ++degenerate;
    } else {
      ++counted;
      if (sol.unique_flag) ++unique;
    }
    rep.trials.push_back({{"trial", static_cast<double>(tr)},
                          {"degenerate", degen ? 1.0 : 0.0},
                          {"unique", sol.unique_flag ? 1.0 : 0.0},
                          {"cluster_diameter", sol.cluster_diameter},
                          {"cost", sol.cost}});
  }

  // Symmetric counterexample: equal two-point measure, every point of the
  // connecting geodesic is a median.
  const Point a = space.origin();
  const std::vector<TangentVector> basis = orthonormal_tangent_basis(space, a);
  TangentVector step = basis[0];
  step.vec *= std::min(1.0, 0.5 * space.cut_distance());  // stay below the cut
  const Point b = exp_map(space, step);
  DiscreteMeasure two{space, {a, b}, {0.5, 0.5}};
  SolverConfig cfg2 = solver;
  cfg2.seed = derive_seed(seed, 900001);
  const SolverResult twosol = median_solve(two, cfg2);
  rep.summary["counterexample_diameter"] = twosol.cluster_diameter;
  rep.checks["counterexample_nonunique"] =
      twosol.cluster_diameter > kCounterexampleDiameter;

  // Forced-degenerate probe: data on one great circle must be detected.
  std::vector<Point> collinear;
  for (int i = 0; i < n_points; ++i) {
    const double ang = 0.3 + 0.4 * i;
    collinear.push_back(point_at(space, a, basis, 0.0, ang));
  }
  rep.checks["collinear_probe_detected"] =
      min_gram_eigenvalue(collinear) < kDegeneracyTol;

  const double fraction = counted > 0 ? static_cast<double>(unique) / counted : 0.0;
  rep.summary["unique_fraction"] = fraction;
  rep.summary["degenerate_trials"] = degenerate;
  rep.checks["unique_fraction_ok"] = fraction >= kUniqueFractionMin;
  rep.pass = rep.checks["unique_fraction_ok"] && rep.checks["counterexample_nonunique"] &&
             rep.checks["collinear_probe_detected"];
  return rep;
}

namespace {

const char* geometry_name(HminGeometry g) {
  switch (g) {
    case HminGeometry::sphere: return "sphere";
    case HminGeometry::flat: return "flat";
    case HminGeometry::hyperbolic: return "hyperbolic";
  }
  return "?";
}

}  // namespace

ExperimentReport hmin_verification_experiment(int instances_per_geometry, int grid,
                                              std::uint64_t seed,
                                              const std::string& csv_path) {
  if (instances_per_geometry < 1)
    throw InputError("hmin_verification_experiment: needs at least one instance");
  constexpr HminGeometry kGeometries[] = {HminGeometry::sphere, HminGeometry::flat,
                                          HminGeometry::hyperbolic};

  ExperimentReport rep;
  rep.experiment = "hmin-verify";
  rep.seed = seed;
  rep.params = {{"instances_per_geometry", static_cast<double>(instances_per_geometry)},
                {"grid", static_cast<double>(grid)}};
  rep.tolerances = {{"oracle_tol", kHminOracleTol},
                    {"ordering_slack", kOrderingSlack},
                    {"branch_gap_tol", kBranchGapTol}};

  std::ostringstream csv;
  csv << "geometry,rho,t,u,branch,closed_form,bruteforce,abs_err\n";

  double max_err = 0.0;
  int ordering_violations = 0;
  for (int i = 0; i < instances_per_geometry; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    // Matched triple, valid in all three geometries (sphere is binding).
    double rho = 0.0, t = 0.0, u = 0.0;
    do {
      rho = rng.uniform(0.1, 1.2);
      t = rng.uniform(0.0, 1.2);
      u = rng.uniform(0.0, 0.995 * (rho + t));
    } while (rho + t + u >= ModelSpace::pi() - 0.05);

    double values[3] = {0.0, 0.0, 0.0};
    for (int g = 0; g < 3; ++g) {
      const HminInstance inst{kGeometries[g], rho, t, u};
      const double closed = hmin_closed_form(inst);
      const double brute = hmin_bruteforce(inst, grid);
      const double err = std::abs(closed - brute);
      values[g] = closed;
      max_err = std::max(max_err, err);
      csv << geometry_name(kGeometries[g]) << ',' << format_double(rho) << ','
          << format_double(t) << ',' << format_double(u) << ',' << hmin_branch(inst)
          << ',' << format_double(closed) << ',' << format_double(brute) << ','
          << format_double(err) << '\n';
      rep.trials.push_back({{"instance", static_cast<double>(i)},
                            {"geometry", static_cast<double>(g)},
                            {"rho", rho},
                            {"t", t},
                            {"u", u},
                            {"branch", static_cast<double>(hmin_branch(inst))},
                            {"closed", closed},
                            {"brute", brute},
                            {"abs_err", err}});
    }
    // Worst-case ordering: sphere <= flat <= hyperbolic.
    const bool violated = values[0] > values[1] + kOrderingSlack ||
                          values[1] > values[2] + kOrderingSlack;
    if (violated) ++ordering_violations;
    rep.trials.push_back({{"instance", static_cast<double>(i)},
                          {"ordering_violation", violated ? 1.0 : 0.0}});
  }

  // Branch-boundary continuity: solve the branch condition for u and compare
  // the two branch expressions there.
  double max_gap = 0.0;
  const int probes = std::max(10, instances_per_geometry / 10);
  for (int i = 0; i < probes; ++i) {
    Rng rng(derive_seed(seed, 40000 + static_cast<std::uint64_t>(i)));
    const double rho = rng.uniform(0.2, 1.0);
    const double t = rng.uniform(0.05, 1.0);
    for (int g = 0; g < 3; ++g) {
      double ustar = 0.0;
      if (kGeometries[g] == HminGeometry::flat) {
        ustar = (rho + t) * rho / (rho + 2.0 * t);
      } else if (kGeometries[g] == HminGeometry::sphere) {
        const double c = 2.0 / std::tan(rho) - 1.0 / std::tan(rho + t);
        if (c <= 0.0) continue;
        ustar = std::atan(1.0 / c);
        if (!(ustar > 0.0 && ustar < rho + t) || rho + t + ustar >= ModelSpace::pi() - 0.05)
          continue;
      } else {
        const double c = 2.0 / std::tanh(rho) - 1.0 / std::tanh(rho + t);
        ustar = std::atanh(1.0 / c);
        if (!(ustar > 0.0 && ustar < rho + t)) continue;
      }
      const HminInstance inst{kGeometries[g], rho, t, ustar};
      const double gap = std::abs((t - rho + ustar) - hmin_branch2_formula(inst));
      max_gap = std::max(max_gap, gap);
      rep.trials.push_back({{"probe", static_cast<double>(i)},
                            {"geometry", static_cast<double>(g)},
                            {"branch_gap", gap}});
    }
  }

  rep.summary = {{"max_abs_err", max_err},
                 {"ordering_violations", static_cast<double>(ordering_violations)},
                 {"max_branch_gap", max_gap}};
  rep.checks["oracle_match"] = max_err < kHminOracleTol;
  rep.checks["ordering_ok"] = ordering_violations == 0;
  rep.checks["branch_continuity"] = max_gap < kBranchGapTol;
  rep.pass = rep.checks["oracle_match"] && rep.checks["ordering_ok"] &&
             rep.checks["branch_continuity"];

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw InputError("cannot write CSV file: " + csv_path);
    out << csv.str();
  }
  return rep;
}

}  // namespace fml
