#include "fml/verify.hpp"

#include <cmath>
#include <sstream>

#include "fml/experiments.hpp"
#include "fml/hmin.hpp"
#include "fml/rng.hpp"

namespace fml {

namespace {

struct Collector {
  std::vector<VerifyCheck> checks;

  void add(const std::string& name, bool pass, double worst, const char* unit) {
    std::ostringstream os;
    os << "worst " << worst << " " << unit;
    checks.push_back({name, pass, os.str()});
  }
};

Point random_point_for(const ModelSpace& s, Rng& rng) {
  if (s.curvature() > 0.0) return uniform_random_point(s, rng.next_u64());
  return uniform_random_point(s, rng.next_u64(), Ball{s.origin(), 2.0});
}

void geometry_checks(Collector& out, std::uint64_t seed) {
  const int n = 300;
  for (double kappa : {1.0, 0.0, -1.0}) {
    const ModelSpace s(kappa, 2);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kappa * 7 + 100)));
    double worst_sym = 0.0, worst_tri = 0.0, worst_inv = 0.0, worst_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      const Point x = random_point_for(s, rng);
      const Point y = random_point_for(s, rng);
      const Point z = random_point_for(s, rng);
      worst_sym = std::max(worst_sym, std::abs(dist(s, x, y) - dist(s, y, x)));
      worst_tri = std::max(worst_tri, dist(s, x, z) - dist(s, x, y) - dist(s, y, z));
      if (dist(s, x, y) < 0.9 * s.cut_distance()) {
        const TangentVector v = log_map(s, x, y);
        worst_inv = std::max(worst_inv, dist(s, exp_map(s, v), y));
        worst_norm = std::max(worst_norm, std::abs(tangent_norm(s, v) - dist(s, x, y)));
      }
    }
    std::ostringstream tag;
    tag << "geometry kappa=" << kappa;
    out.add(tag.str() + " symmetry", worst_sym <= 1e-12, worst_sym, "abs");
    out.add(tag.str() + " triangle", worst_tri <= 1e-10, worst_tri, "violation");
    out.add(tag.str() + " exp/log", worst_inv < 1e-9, worst_inv, "dist");
    out.add(tag.str() + " |log|=dist", worst_norm <= 1e-10, worst_norm, "abs");
  }
}

void hmin_checks(Collector& out, std::uint64_t seed) {
  ExperimentReport rep = hmin_verification_experiment(40, 20000, seed);
  out.add("hmin closed form vs oracle", rep.checks.at("oracle_match"),
          rep.summary.at("max_abs_err"), "abs");
  out.add("hmin worst-case ordering", rep.checks.at("ordering_ok"),
          rep.summary.at("ordering_violations"), "violations");
  out.add("hmin branch continuity", rep.checks.at("branch_continuity"),
          rep.summary.at("max_branch_gap"), "gap");
}

void bounds_checks(Collector& out, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 31));
  double worst_sense = 0.0, worst_order = 0.0;
  bool ok = true;
  int tested = 0;
  while (tested < 300) {
    const double kappa = rng.uniform(-2.0, 2.0);
    const double alpha = rng.uniform(0.501, 1.0);
    const double rho = rng.uniform(0.05, 1.5);
    const ModelSpace s(kappa, 2);
    const ConcentrationSpec spec{s.origin(), rho, alpha};
    if (!assumption_check(s, spec)) continue;
    ++tested;
    const BoundReport rep = refined_bound_radius(s, spec);
    const double refined = refined_radius_formula(s, alpha, rho);
    // Lemma-of-sense inequality at the working scale.
    const double half = kappa > 0.0 ? rep.r_star / 2.0 : rep.r_basic;
    const double lhs = alpha * s_delta(s, rho) / std::sqrt(2.0 * alpha - 1.0);
    worst_sense = std::max(worst_sense, lhs - s_delta(s, half));
    if (!(lhs < s_delta(s, half))) ok = false;
    if (!(refined <= rep.r_basic + 1e-12) || !(refined >= rho - 1e-12)) ok = false;
    if (rep.refined_radius && !(*rep.refined_radius < rep.r_star / 2.0)) ok = false;
    worst_order = std::max(worst_order, refined - rep.r_basic);
  }
  out.add("bounds refined/basic/of-sense", ok, std::max(worst_sense, worst_order), "margin");
}

void solver_checks(Collector& out, std::uint64_t seed) {
  bool stationary = true, dominance = true, lipschitz = true;
  double worst_resid = 0.0, worst_slack = 0.0;
  for (double kappa : {1.0, 0.0, -1.0}) {
    const ModelSpace s(kappa, 2);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kappa + 50)));
    for (int inst = 0; inst < 3; ++inst) {
      std::vector<Point> pts;
      for (int i = 0; i < 5; ++i) pts.push_back(random_point_for(s, rng));
      DiscreteMeasure mu = DiscreteMeasure::with_uniform_weights(s, pts);
      SolverConfig cfg;
      cfg.seed = rng.next_u64();
      const SolverResult sol = median_solve(mu, cfg);
      if (sol.converged) {
        worst_resid = std::max(worst_resid, sol.residual);
        if (sol.residual >= 10.0 * cfg.tol) stationary = false;
      }
      const LipschitzCertificate cert = lipschitz_certificate(mu, sol.median, 50, cfg.seed);
      worst_slack = std::min(worst_slack, cert.min_slack);
      if (!cert.ok) lipschitz = false;

      // One weight above 1/2 forces that exact point.
      std::vector<double> w{0.6, 0.1, 0.1, 0.1, 0.1};
      DiscreteMeasure heavy{s, pts, w};
      const SolverResult hsol = median_solve(heavy, cfg);
      if (dist(s, hsol.median, pts[0]) >= 1e-10) dominance = false;
    }
  }
  out.add("solver stationarity", stationary, worst_resid, "residual");
  out.add("solver point-mass dominance", dominance, 0.0, "");
  out.add("solver lipschitz certificates", lipschitz, worst_slack, "min slack");
}

void report_checks(Collector& out, std::uint64_t seed) {
  const ModelSpace s(1.0, 2);
  ExperimentReport a = genericity_experiment(s, 4, 5, seed);
  ExperimentReport b = genericity_experiment(s, 4, 5, seed);
  const bool deterministic = a.to_json() == b.to_json();
  const bool recomputable = recompute_verdict(a) == a.pass;
  out.add("report determinism", deterministic, 0.0, "");
  out.add("report verdict recompute", recomputable, 0.0, "");
}

}  // namespace

std::vector<VerifyCheck> run_verification(std::uint64_t seed) {
  Collector out;
  geometry_checks(out, seed);
  hmin_checks(out, seed);
  bounds_checks(out, seed);
  solver_checks(out, seed);
  report_checks(out, seed);
  return out.checks;
}

}  // namespace fml
