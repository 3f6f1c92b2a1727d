#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fml/geometry.hpp"

namespace fml {

// Weighted point measure on a model space; weights sum to 1.
struct DiscreteMeasure {
  ModelSpace space;
  std::vector<Point> points;
  std::vector<double> weights;

  void validate() const;  // throws InputError
  static DiscreteMeasure with_uniform_weights(const ModelSpace& s,
                                              std::vector<Point> pts);
};

// f_mu(x) = sum_k w_k d(x, x_k). Summed in a canonical point order so the
// value is independent of storage permutation.
double frechet_cost(const DiscreteMeasure& mu, const Point& x);

enum class StepRule { weiszfeld, fixed_subgradient };

struct SolverConfig {
  double tol = 1e-9;        // gradient-norm and step-size stopping
  int max_iters = 10000;
  int multistarts = 16;     // data points always included as starts
  std::uint64_t seed = 0;
  StepRule step_rule = StepRule::weiszfeld;

  void validate() const;
};

struct SolverResult {
  Point median;
  double cost = 0.0;
  double residual = 0.0;          // first-order residual at the median
  int iterations = 0;             // iterations of the winning start
  double cluster_diameter = 0.0;  // spread of near-optimal multistart outputs
  bool unique_flag = false;       // cluster_diameter < 1e-6
  bool converged = false;
};

// Multistart Riemannian Weiszfeld iteration. Starts at every data point plus
// (multistarts - N)+ seeded uniform draws; outputs are merged by
// (cost, lexicographic coordinates), so results are reproducible and
// permutation invariant.
SolverResult median_solve(const DiscreteMeasure& mu, const SolverConfig& cfg = {});

// First-order stationarity residual at m. Away from the data this is the
// Riemannian norm of sum_k w_k log_m(x_k)/d(m, x_k); at a data point it is
// max(0, |sum over the others| - coincident mass). Zero means the necessary
// median condition holds. Throws SingularityError at cut points.
double first_order_residual(const DiscreteMeasure& mu, const Point& m);

struct LipschitzCertificate {
  bool ok = false;
  double min_slack = 0.0;
};

// Samples `trials` random 1-Lipschitz functions phi(x) = min_j(c_j + d(x,q_j))
// and checks phi(m) <= f_star + sum_k w_k phi(x_k) + 1e-8. A violation shows
// m does not attain the global minimum f_star. When f_star is not supplied,
// f_mu(m) is used.
LipschitzCertificate lipschitz_certificate(const DiscreteMeasure& mu, const Point& m,
                                           int trials, std::uint64_t seed,
                                           std::optional<double> f_star = std::nullopt);

// Replaces x_k by the point a fraction t of the way toward m and checks that
// m is still a global median of the moved measure (within cost slack 1e-8).
bool move_toward_median_check(const DiscreteMeasure& mu, const Point& m,
                              std::size_t k, double t,
                              const SolverConfig& cfg = {});

}  // namespace fml
