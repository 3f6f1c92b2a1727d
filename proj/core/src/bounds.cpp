#include "fml/bounds.hpp"

#include <cmath>
#include <sstream>

namespace fml {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

double cot(double x) { return std::cos(x) / std::sin(x); }
double coth(double x) { return std::cosh(x) / std::sinh(x); }

void check_alpha_rho(double alpha, double rho, bool allow_alpha_one) {
  std::ostringstream os;
  if (!(alpha > 0.5) || alpha > 1.0 + 1e-15) {
    os << "alpha must lie in (1/2, 1], got " << alpha;
    throw InputError(os.str());
  }
  if (!allow_alpha_one && alpha >= 1.0) {
    throw InputError("alpha = 1 has no root in the open interval");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    os << "rho must be positive and finite, got " << rho;
    throw InputError(os.str());
  }
}

}  // namespace

void ConcentrationSpec::validate(const ModelSpace& s) const {
  check_alpha_rho(alpha, rho, /*allow_alpha_one=*/true);
  validate_point(s, center);
}

const char* to_string(BoundCase c) {
  switch (c) {
    case BoundCase::positive_a: return "positive_a";
    case BoundCase::positive_b: return "positive_b";
    case BoundCase::positive_unverified: return "positive_unverified";
    case BoundCase::flat: return "flat";
    case BoundCase::negative: return "negative";
  }
  return "?";
}

double basic_bound_radius(const ConcentrationSpec& spec) {
  check_alpha_rho(spec.alpha, spec.rho, true);
  return 2.0 * spec.alpha * spec.rho / (2.0 * spec.alpha - 1.0);
}

double r_star(const ModelSpace& s) {
  const double k = s.curvature();
  if (k > 0.0) return kPi / std::sqrt(k);
  return std::numeric_limits<double>::infinity();
}

bool assumption_check(const ModelSpace& s, const ConcentrationSpec& spec) {
  return basic_bound_radius(spec) < r_star(s);
}

double s_delta(const ModelSpace& s, double t) {
  if (t < 0.0) throw InputError("s_delta: t must be nonnegative");
  const double k = s.curvature();
  if (k > 0.0) return std::sin(std::sqrt(k) * t);
  if (k < 0.0) return std::sinh(std::sqrt(-k) * t);
  return t;
}

double F_eval(double alpha, double rho, double kappa, double t) {
  check_alpha_rho(alpha, rho, true);
  if (!(t > 0.0) || t > rho / (2.0 * alpha - 1.0) + 1e-12) {
    std::ostringstream os;
    os << "F_eval: t must lie in (0, rho/(2 alpha - 1)], got " << t;
    throw InputError(os.str());
  }
  if (kappa == 0.0) return (1.0 - alpha) * rho - (2.0 * alpha - 1.0) * t;
  if (kappa > 0.0) {
    const double s = std::sqrt(kappa);
    for (double arg : {s * (2.0 * alpha - 1.0) * t, s * t, s * rho}) {
      if (!(arg > 0.0 && arg < kPi)) {
        std::ostringstream os;
        os << "F_eval: cot argument " << arg << " outside (0, pi)";
        throw InputError(os.str());
      }
    }
    return cot(s * (2.0 * alpha - 1.0) * t) - cot(s * t) - 2.0 * cot(s * rho);
  }
  const double s = std::sqrt(-kappa);
  return coth(s * (2.0 * alpha - 1.0) * t) - coth(s * t) - 2.0 * coth(s * rho);
}

double F_root(double alpha, double rho, double kappa) {
  check_alpha_rho(alpha, rho, /*allow_alpha_one=*/false);
  const double upper = rho / (2.0 * alpha - 1.0);
  if (kappa > 0.0) {
    // All cot arguments must stay in (0, pi): the assumption scale.
    if (!(2.0 * alpha * rho / (2.0 * alpha - 1.0) < kPi / std::sqrt(kappa)))
      throw InputError("F_root: rho incompatible with the concentration assumption");
  }
  if (kappa == 0.0) return (1.0 - alpha) * rho / (2.0 * alpha - 1.0);

  // F(0+) = +inf, F(upper) < 0 with a single sign change; plain bisection.
  const double eps = 1e-12 * rho;
  double lo = eps, hi = upper - eps;
  if (!(F_eval(alpha, rho, kappa, lo) > 0.0) || !(F_eval(alpha, rho, kappa, hi) < 0.0))
    throw InputError("F_root: no sign change bracketing the root");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (F_eval(alpha, rho, kappa, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double refined_radius_formula(const ModelSpace& s, double alpha, double rho) {
  check_alpha_rho(alpha, rho, true);
  const double k = s.curvature();
  const double root = std::sqrt(2.0 * alpha - 1.0);
  if (k == 0.0) return alpha * rho / root;
  if (k > 0.0) {
    const double sk = std::sqrt(k);
    double arg = alpha * std::sin(sk * rho) / root;
    if (arg > 1.0 + 1e-9)
      throw InputError("refined_radius_formula: arcsin argument exceeds 1");
    return std::asin(std::min(1.0, arg)) / sk;
  }
  const double sk = std::sqrt(-k);
  return std::asinh(alpha * std::sinh(sk * rho) / root) / sk;
}

BoundReport refined_bound_radius(const ModelSpace& s, const ConcentrationSpec& spec) {
  spec.validate(s);
  BoundReport rep;
  rep.curvature = s.curvature();
  rep.alpha = spec.alpha;
  rep.rho = spec.rho;
  rep.r_basic = basic_bound_radius(spec);
  rep.r_star = r_star(s);
  rep.assumption_ok = rep.r_basic < rep.r_star;
  if (!rep.assumption_ok)
    throw InputError("refined_bound_radius: concentration assumption violated");

  if (spec.alpha < 1.0) rep.t_root = F_root(spec.alpha, spec.rho, s.curvature());

  const double k = s.curvature();
  if (k == 0.0) {
    rep.case_tag = BoundCase::flat;
    rep.refined_radius = refined_radius_formula(s, spec.alpha, spec.rho);
    return rep;
  }
  if (k < 0.0) {
    rep.case_tag = BoundCase::negative;
    rep.refined_radius = refined_radius_formula(s, spec.alpha, spec.rho);
    return rep;
  }

  // kappa > 0: the refined radius holds when the median set is already known
  // to sit inside B(a, r_star/2), certified by condition a) or b).
  if (rep.r_basic <= rep.r_star / 2.0) {
    rep.case_tag = BoundCase::positive_a;
    rep.refined_radius = refined_radius_formula(s, spec.alpha, spec.rho);
    return rep;
  }
  const double t_probe = rep.r_star / 2.0 - spec.rho;
  if (t_probe > 0.0 && F_eval(spec.alpha, spec.rho, k, t_probe) <= 0.0) {
    rep.case_tag = BoundCase::positive_b;
    rep.refined_radius = refined_radius_formula(s, spec.alpha, spec.rho);
    return rep;
  }
  rep.case_tag = BoundCase::positive_unverified;
  return rep;
}

bool exclusion_test(const ModelSpace& s, const ConcentrationSpec& spec,
                    const Point& x, const Point& z, double hmin_value) {
  spec.validate(s);
  const double threshold = (1.0 - spec.alpha) / spec.alpha * dist(s, x, z);
  return hmin_value > threshold;
}

}  // namespace fml
