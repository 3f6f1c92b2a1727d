#include "fml/hmin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace fml {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kClampGuard = 1e-9;

double cot(double x) { return std::cos(x) / std::sin(x); }
double coth(double x) { return std::cosh(x) / std::sinh(x); }

double clamped_acos(double v) {
  if (v > 1.0 + kClampGuard || v < -1.0 - kClampGuard)
    throw InputError("hmin: arccos argument drifted outside [-1, 1]");
  return std::acos(std::min(1.0, std::max(-1.0, v)));
}

double clamped_acosh(double v) {
  if (v < 1.0 - kClampGuard)
    throw InputError("hmin: arccosh argument drifted below 1");
  return std::acosh(std::max(1.0, v));
}

// h(theta) = d(x, p(theta)) - d(z, p(theta)) on the boundary circle.
double boundary_h(const HminInstance& in, double theta) {
  const double c = std::cos(theta);
  switch (in.geometry) {
    case HminGeometry::sphere: {
      const double dx = clamped_acos(std::sin(in.rho + in.t) * std::sin(in.rho) * c +
                                     std::cos(in.rho + in.t) * std::cos(in.rho));
      const double dz = clamped_acos(std::sin(in.u) * std::sin(in.rho) * c +
                                     std::cos(in.u) * std::cos(in.rho));
      return dx - dz;
    }
    case HminGeometry::flat: {
      const double s = std::sin(theta);
      const double px = in.rho * c, py = in.rho * s;
      const double dx = std::hypot(px - (in.rho + in.t), py);
      const double dz = std::hypot(px - in.u, py);
      return dx - dz;
    }
    case HminGeometry::hyperbolic: {
      const double dx = clamped_acosh(std::cosh(in.rho + in.t) * std::cosh(in.rho) -
                                      std::sinh(in.rho + in.t) * std::sinh(in.rho) * c);
      const double dz = clamped_acosh(std::cosh(in.u) * std::cosh(in.rho) -
                                      std::sinh(in.u) * std::sinh(in.rho) * c);
      return dx - dz;
    }
  }
  throw InputError("hmin: unknown geometry");
}

struct Bracket {
  double lo, mid, hi, value;
};

struct BruteResult {
  double value;
  double theta;
};

BruteResult golden_refine(const HminInstance& in, Bracket b) {
  // Golden-section on [lo, hi]; h is smooth at interior minima.
  constexpr double invphi = 0.6180339887498948482;
  double a = b.lo, d = b.hi;
  double c1 = d - (d - a) * invphi;
  double c2 = a + (d - a) * invphi;
  double f1 = boundary_h(in, c1), f2 = boundary_h(in, c2);
  for (int i = 0; i < 90 && (d - a) > 1e-13; ++i) {
    if (f1 < f2) {
      d = c2;
      c2 = c1;
      f2 = f1;
      c1 = d - (d - a) * invphi;
      f1 = boundary_h(in, c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + (d - a) * invphi;
      f2 = boundary_h(in, c2);
    }
  }
  const double mid = 0.5 * (a + d);
  BruteResult r{boundary_h(in, mid), mid};
  if (f1 < r.value) r = {f1, c1};
  if (f2 < r.value) r = {f2, c2};
  if (b.value < r.value) r = {b.value, b.mid};
  return r;
}

BruteResult bruteforce_impl(const HminInstance& in, int grid) {
  in.validate();
  if (grid < 1000) throw InputError("hmin_bruteforce: grid must be >= 1000");

  const double step = 2.0 * kPi / grid;
  std::vector<double> h(static_cast<size_t>(grid));
  for (int i = 0; i < grid; ++i) h[static_cast<size_t>(i)] = boundary_h(in, i * step);

  // Local minima on the cyclic grid, best three brackets refined.
  std::vector<std::pair<double, int>> minima;
  for (int i = 0; i < grid; ++i) {
    const double prev = h[static_cast<size_t>((i + grid - 1) % grid)];
    const double next = h[static_cast<size_t>((i + 1) % grid)];
    if (h[static_cast<size_t>(i)] <= prev && h[static_cast<size_t>(i)] <= next)
      minima.emplace_back(h[static_cast<size_t>(i)], i);
  }
  std::sort(minima.begin(), minima.end());
  if (minima.size() > 3) minima.resize(3);

  BruteResult best{h[0], 0.0};
  for (const auto& [value, i] : minima) {
    Bracket b{(i - 1) * step, i * step, (i + 1) * step, value};
    const BruteResult refined = golden_refine(in, b);
    if (refined.value < best.value) best = refined;
  }
  // Fold into [0, pi]; the configuration is mirror symmetric about theta = 0.
  if (best.theta > kPi) best.theta = 2.0 * kPi - best.theta;
  if (best.theta < 0.0) best.theta = -best.theta;

  // Value comparisons localize an interior minimizer only to ~sqrt(eps);
  // polish it by bisecting the central-difference slope.
  if (best.theta > 1e-4 && best.theta < kPi - 1e-4) {
    const double fd = 1e-5;
    const auto slope = [&](double th) {
      return boundary_h(in, th + fd) - boundary_h(in, th - fd);
    };
    double lo = best.theta - 1e-4, hi = best.theta + 1e-4;
    if (slope(lo) < 0.0 && slope(hi) > 0.0) {
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
      }
      const double polished = 0.5 * (lo + hi);
      const double pv = boundary_h(in, polished);
      if (pv <= best.value + 1e-12) best.theta = polished;
      if (pv < best.value) best.value = pv;
    }
  }
  return best;
}

}  // namespace

void HminInstance::validate() const {
  std::ostringstream os;
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    os << "hmin: rho must be positive and finite, got " << rho;
    throw InputError(os.str());
  }
  if (t < 0.0 || u < 0.0 || !std::isfinite(t) || !std::isfinite(u))
    throw InputError("hmin: t and u must be nonnegative and finite");
  if (!(u < rho + t)) {
    os << "hmin: requires u < rho + t (" << u << " >= " << rho + t << ")";
    throw InputError(os.str());
  }
  if (geometry == HminGeometry::sphere && !(rho + t + u < kPi)) {
    os << "hmin: sphere requires rho + t + u < pi (" << rho + t + u << ")";
    throw InputError(os.str());
  }
}

int hmin_branch(const HminInstance& in) {
  in.validate();
  if (in.u == 0.0) return 1;  // cot/coth(0+) dominates every bound
  switch (in.geometry) {
    case HminGeometry::sphere:
      return cot(in.u) >= 2.0 * cot(in.rho) - cot(in.rho + in.t) ? 1 : 2;
    case HminGeometry::flat:
      return in.u <= (in.rho + in.t) * in.rho / (in.rho + 2.0 * in.t) ? 1 : 2;
    case HminGeometry::hyperbolic:
      return coth(in.u) >= 2.0 * coth(in.rho) - coth(in.rho + in.t) ? 1 : 2;
  }
  throw InputError("hmin: unknown geometry");
}

double hmin_closed_form(const HminInstance& in) {
  if (hmin_branch(in) == 1) return in.t - in.rho + in.u;
  return hmin_branch2_formula(in);
}

double hmin_branch2_formula(const HminInstance& in) {
  in.validate();
  if (in.u == 0.0) throw InputError("hmin: second branch undefined at u = 0");
  const double d = in.rho + in.t - in.u;
  switch (in.geometry) {
    case HminGeometry::sphere: {
      const double sr = std::sin(in.rho);
      const double arg = std::cos(d) + sr * sr * std::sin(d) * std::sin(d) /
                                           (2.0 * std::sin(in.u) * std::sin(in.rho + in.t));
      return clamped_acos(arg);
    }
    case HminGeometry::flat: {
      const double rad = 1.0 - in.rho * in.rho / (in.u * (in.rho + in.t));
      return d * std::sqrt(std::max(0.0, rad));
    }
    case HminGeometry::hyperbolic: {
      const double sr = std::sinh(in.rho);
      const double arg = std::cosh(d) - sr * sr * std::sinh(d) * std::sinh(d) /
                                            (2.0 * std::sinh(in.u) * std::sinh(in.rho + in.t));
      return clamped_acosh(arg);
    }
  }
  throw InputError("hmin: unknown geometry");
}

double hmin_bruteforce(const HminInstance& in, int grid) {
  return bruteforce_impl(in, grid).value;
}

double hmin_bruteforce_argmin(const HminInstance& in, int grid) {
  return bruteforce_impl(in, grid).theta;
}

ArgminReport argmin_condition_check(const HminInstance& in, double theta) {
  if (in.geometry != HminGeometry::sphere)
    throw InputError("argmin_condition_check: sphere geometry only");
  ArgminReport rep;
  rep.cos_theta_formula =
      std::tan(in.rho) / 2.0 * (cot(in.u) + cot(in.rho + in.t));
  if (hmin_branch(in) == 1) {
    rep.second_branch = false;
    rep.argmin_theta = 0.0;  // the entry point y
    return rep;
  }
  rep.second_branch = true;
  rep.argmin_theta = theta;
  const double c = std::cos(theta);
  const double dx = clamped_acos(std::sin(in.rho + in.t) * std::sin(in.rho) * c +
                                 std::cos(in.rho + in.t) * std::cos(in.rho));
  const double dz = clamped_acos(std::sin(in.u) * std::sin(in.rho) * c +
                                 std::cos(in.u) * std::cos(in.rho));
  rep.identity_residual =
      std::abs(std::sin(in.rho + in.t) / std::sin(dx) - std::sin(in.u) / std::sin(dz));
  rep.identity_ok = rep.identity_residual <= 1e-8;
  return rep;
}

bool hmin_sign_check(const HminInstance& in, int grid) {
  if (in.geometry != HminGeometry::sphere)
    throw InputError("hmin_sign_check: sphere geometry only");
  const double v = hmin_bruteforce(in, grid);
  return v > 0.0 && v < kPi;
}

double hmin_for_curvature(double kappa, double rho, double t, double u) {
  if (!std::isfinite(kappa)) throw InputError("hmin_for_curvature: non-finite curvature");
  if (kappa == 0.0) {
    return hmin_closed_form({HminGeometry::flat, rho, t, u});
  }
  const double s = std::sqrt(std::abs(kappa));
  const HminGeometry g = kappa > 0.0 ? HminGeometry::sphere : HminGeometry::hyperbolic;
  return hmin_closed_form({g, rho * s, t * s, u * s}) / s;
}

}  // namespace fml
