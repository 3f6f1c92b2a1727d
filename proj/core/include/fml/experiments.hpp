#pragma once

#include <map>
#include <string>
#include <vector>

#include "fml/bounds.hpp"
#include "fml/solver.hpp"

namespace fml {

// Seeded experiment record. Everything needed to recompute the verdict is in
// params/trials/tolerances, and to_json() is byte-deterministic (timestamps
// belong to the envelope, not the report).
struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  std::vector<std::map<std::string, double>> trials;
  std::map<std::string, double> summary;
  std::map<std::string, bool> checks;
  std::map<std::string, double> tolerances;
  bool pass = false;

  std::string to_json(int indent = 2) const;
};

// {"envelope":{"created_unix":...},"report":{...}}
void write_report_with_envelope(const ExperimentReport& rep, const std::string& path);

// Re-derives the verdict from per-trial records; must reproduce rep.pass.
bool recompute_verdict(const ExperimentReport& rep);

struct PositionBoundParams {
  int trials = 500;
  int directions = 16;     // adversary directions on a uniform angular grid
  int inside_points = 8;   // support size of the concentrated mass (random mode)
  int boundary_every = 8;  // every k-th trial puts all inside mass on the boundary
  std::uint64_t seed = 0;
  SolverConfig solver;
};

// Sweeps adversarial measures with mass alpha inside B(a, rho) and mass
// 1 - alpha outside, solves each, and verifies every median stays inside the
// certified radius (refined when certified, basic otherwise).
ExperimentReport position_bound_experiment(const ModelSpace& space,
                                           const ConcentrationSpec& spec,
                                           const PositionBoundParams& params);

// Draws n i.i.d. samples from mu for each n in the schedule and tracks the
// distance from the empirical median to the base median.
ExperimentReport consistency_experiment(const DiscreteMeasure& mu,
                                        const std::vector<int>& n_schedule,
                                        int trials, std::uint64_t seed,
                                        double eps_target,
                                        const SolverConfig& solver = {});

// Uniform N-point samples on a compact space (kappa > 0): the multistart
// cluster should collapse for almost every draw. Also runs the symmetric
// two-point counterexample and a forced-degenerate collinear probe.
ExperimentReport genericity_experiment(const ModelSpace& space, int n_points,
                                       int trials, std::uint64_t seed,
                                       SolverConfig solver = {});

// Closed form vs boundary brute force per geometry on matched (rho, t, u)
// triples, worst-case ordering, and branch-boundary continuity probes.
// Writes the grid as CSV when csv_path is nonempty.
ExperimentReport hmin_verification_experiment(int instances_per_geometry, int grid,
                                              std::uint64_t seed,
                                              const std::string& csv_path = "");

}  // namespace fml
