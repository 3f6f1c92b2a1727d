#pragma once

#include "fml/errors.hpp"

namespace fml {

// Minimum over the closed ball B(a, rho) of h_{x,z}(p) = d(x,p) - d(z,p) in
// the three two-dimensional unit-|curvature| model geometries, for x at
// distance rho + t from a and z at distance u from a on the geodesic a-x.
// General curvature is handled by hmin_for_curvature below.

enum class HminGeometry { sphere, flat, hyperbolic };

struct HminInstance {
  HminGeometry geometry = HminGeometry::flat;
  double rho = 1.0;  // ball radius
  double t = 0.0;    // x sits at distance rho + t from the center
  double u = 0.0;    // z sits at distance u from the center, toward x

  // u < rho + t, nonnegative t and u, positive rho; on the sphere
  // additionally rho + t + u < pi. Throws InputError.
  void validate() const;
};

// 1 for the linear branch (minimum at the entry point y), 2 otherwise.
int hmin_branch(const HminInstance& inst);

// Exact branch formulas.
double hmin_closed_form(const HminInstance& inst);

// Second-branch expression evaluated unconditionally; defined at and beyond
// the branch boundary, where it meets t - rho + u. Used by continuity probes.
double hmin_branch2_formula(const HminInstance& inst);

// Independent oracle: dense theta-grid over the boundary circle (minima can
// only occur there) plus golden-section refinement of the best brackets.
// grid must be >= 1000.
double hmin_bruteforce(const HminInstance& inst, int grid);

// Boundary angle in [0, pi] attaining the brute-force minimum.
double hmin_bruteforce_argmin(const HminInstance& inst, int grid);

struct ArgminReport {
  bool second_branch = false;  // false: argmin is the entry point, theta = 0
  double argmin_theta = 0.0;
  bool identity_ok = false;       // sine-ratio identity at theta (branch 2)
  double identity_residual = 0.0;
  double cos_theta_formula = 0.0;  // (tan rho / 2)(cot u + cot(rho+t))
};

// Sphere only: checks the stationarity identity
// sin(rho+t)/sin d(x,p) = sin u / sin d(z,p) at the boundary point p(theta).
ArgminReport argmin_condition_check(const HminInstance& inst, double theta);

// Sphere only: brute-force minimum lies strictly in (0, pi) whenever the
// second branch is active.
bool hmin_sign_check(const HminInstance& inst, int grid = 20000);

// Rescales (rho, t, u) by sqrt(|kappa|) and the value by 1/sqrt(|kappa|).
double hmin_for_curvature(double kappa, double rho, double t, double u);

}  // namespace fml
