#pragma once

#include <optional>

#include "fml/geometry.hpp"

namespace fml {

// Concentration hypothesis: more than half the mass inside B(center, rho).
struct ConcentrationSpec {
  Point center;
  double rho = 0.0;
  double alpha = 0.0;  // mass fraction in (1/2, 1]

  void validate(const ModelSpace& s) const;  // throws InputError
};

enum class BoundCase { positive_a, positive_b, positive_unverified, flat, negative };

const char* to_string(BoundCase c);

struct BoundReport {
  double curvature = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double r_basic = 0.0;
  double r_star = 0.0;  // +inf when kappa <= 0
  bool assumption_ok = false;
  BoundCase case_tag = BoundCase::flat;
  std::optional<double> refined_radius;  // absent when positive_unverified
  std::optional<double> t_root;          // absent when alpha = 1
};

// 2*alpha*rho / (2*alpha - 1); diverges as alpha -> 1/2.
double basic_bound_radius(const ConcentrationSpec& spec);

// min{pi/sqrt(kappa), injectivity radius}: pi/sqrt(kappa) for kappa > 0,
// +inf for kappa <= 0.
double r_star(const ModelSpace& s);

// basic radius strictly below r_star.
bool assumption_check(const ModelSpace& s, const ConcentrationSpec& spec);

// Generalized sine: sin(sqrt(k) t), t, or sinh(sqrt(-k) t).
double s_delta(const ModelSpace& s, double t);

// The auxiliary function F_{alpha,rho,kappa} on (0, rho/(2 alpha - 1)].
double F_eval(double alpha, double rho, double kappa, double t);

// Unique zero t_kappa of F in (0, rho/(2 alpha - 1)); requires alpha < 1.
double F_root(double alpha, double rho, double kappa);

// Value of the refined containment radius (requires the assumption; for
// kappa > 0 this is the radius of the conditional containment statement).
double refined_radius_formula(const ModelSpace& s, double alpha, double rho);

// Full report: basic radius, assumption flag, refined radius with its case
// tag. For kappa > 0 the refined radius is emitted only when condition a)
// (basic <= r_star/2) or b) (F(r_star/2 - rho) <= 0) certifies it.
BoundReport refined_bound_radius(const ModelSpace& s, const ConcentrationSpec& spec);

// x is certifiably not a median when the certified minimum of h_{x,z} over
// the concentration ball exceeds (1-alpha)/alpha * d(x,z).
bool exclusion_test(const ModelSpace& s, const ConcentrationSpec& spec,
                    const Point& x, const Point& z, double hmin_value);

}  // namespace fml
