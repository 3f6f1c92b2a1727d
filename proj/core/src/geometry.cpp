#include "fml/geometry.hpp"

#include <cmath>
#include <sstream>

#include "fml/rng.hpp"

namespace fml {

namespace {

constexpr double kDomainGuard = 1e-9;  // tolerated round-off past arccos/arccosh domains
constexpr double kTinyLength = 1e-15;

double clamp_or_throw(double v, double lo, double hi, const char* what) {
  if (v < lo - kDomainGuard || v > hi + kDomainGuard) {
    std::ostringstream os;
    os << what << " argument " << v << " outside [" << lo << ", " << hi << "]";
    throw InputError(os.str());
  }
  return std::min(hi, std::max(lo, v));
}

void check_dim(const ModelSpace& s, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != s.ambient_dim()) {
    std::ostringstream os;
    os << what << ": expected " << s.ambient_dim() << " ambient coordinates, got "
       << v.size();
    throw InputError(os.str());
  }
  if (!v.allFinite()) throw InputError(std::string(what) + ": non-finite coordinates");
}

// Unit-sphere angle from the (clamped) cosine, chord-corrected near the
// endpoints where arccos loses half the digits.
double sphere_angle(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double c) {
  if (c > 0.99) return 2.0 * std::asin(std::min(1.0, 0.5 * (x - y).norm()));
  if (c < -0.99)
    return ModelSpace::pi() - 2.0 * std::asin(std::min(1.0, 0.5 * (x + y).norm()));
  return std::acos(c);
}

// Unit-hyperboloid angle via the chord identity <x-y,x-y>_M = 4 sinh^2(t/2),
// which stays accurate near coincidence (and at large coordinates) where the
// direct -<x,y>_M product cancels badly. Far pairs use arccosh directly.
double hyperboloid_angle(const ModelSpace& s, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y) {
  const Eigen::VectorXd w = x - y;
  const double q = ambient_inner(s, w, w);
  if (q < 1.0) return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, q)));
  const double m = -ambient_inner(s, x, y);
  clamp_or_throw(m, 1.0, std::numeric_limits<double>::infinity(), "arccosh");
  return std::acosh(std::max(1.0, m));
}

}  // namespace

ModelSpace::ModelSpace(double curvature, int dim) : kappa_(curvature), dim_(dim) {
  if (dim < 2) throw InputError("ModelSpace: dim must be >= 2");
  if (!std::isfinite(curvature)) throw InputError("ModelSpace: non-finite curvature");
}

Point ModelSpace::origin() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ambient_dim());
  if (kappa_ > 0.0) {
    c(0) = 1.0;
  } else if (kappa_ < 0.0) {
    c(ambient_dim() - 1) = 1.0;  // time coordinate
  }
  return Point{std::move(c)};
}

double ambient_inner(const ModelSpace& s, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& b) {
  if (s.curvature() >= 0.0) return a.dot(b);
  const int n = static_cast<int>(a.size());
  return a.head(n - 1).dot(b.head(n - 1)) - a(n - 1) * b(n - 1);
}

void validate_point(const ModelSpace& s, const Point& x, double tol) {
  check_dim(s, x.coords, "point");
  const double k = s.curvature();
  if (k > 0.0) {
    if (std::abs(x.coords.squaredNorm() - 1.0) > tol)
      throw InputError("point not on the unit sphere");
  } else if (k < 0.0) {
    // The Minkowski self-product carries O(eps |x|^2) rounding, so the
    // constraint can only be enforced relative to the coordinate scale.
    const double scale = std::max(1.0, x.coords.squaredNorm());
    if (std::abs(ambient_inner(s, x.coords, x.coords) + 1.0) > tol * scale)
      throw InputError("point not on the unit hyperboloid");
    if (x.coords(x.coords.size() - 1) <= 0.0)
      throw InputError("hyperboloid point with nonpositive time coordinate");
  }
}

void validate_tangent(const ModelSpace& s, const TangentVector& v, double tol) {
  validate_point(s, v.base);
  check_dim(s, v.vec, "tangent");
  const double scale =
      (1.0 + v.vec.norm()) * std::max(1.0, v.base.coords.squaredNorm());
  if (s.curvature() != 0.0 &&
      std::abs(ambient_inner(s, v.base.coords, v.vec)) > tol * scale)
    throw InputError("tangent vector not orthogonal to its base point");
}

Point project_to_manifold(const ModelSpace& s, Eigen::VectorXd coords, double tol) {
  check_dim(s, coords, "point");
  const double k = s.curvature();
  if (k > 0.0) {
    const double n = coords.norm();
    if (std::abs(n - 1.0) > tol) throw InputError("point too far from the unit sphere");
    coords /= n;
  } else if (k < 0.0) {
    const double q = -ambient_inner(s, coords, coords);
    if (coords(coords.size() - 1) <= 0.0)
      throw InputError("hyperboloid point with nonpositive time coordinate");
    if (q <= 0.0 ||
        std::abs(std::sqrt(q) - 1.0) > tol * std::max(1.0, coords.squaredNorm()))
      throw InputError("point too far from the unit hyperboloid");
    coords /= std::sqrt(q);
  }
  return Point{std::move(coords)};
}

bool points_equal(const ModelSpace& s, const Point& a, const Point& b, double tol) {
  check_dim(s, a.coords, "point");
  check_dim(s, b.coords, "point");
  return (a.coords - b.coords).lpNorm<Eigen::Infinity>() <= tol;
}

double dist(const ModelSpace& s, const Point& x, const Point& y) {
  check_dim(s, x.coords, "dist x");
  check_dim(s, y.coords, "dist y");
  const double k = s.curvature();
  if (k > 0.0) {
    const double c = clamp_or_throw(x.coords.dot(y.coords), -1.0, 1.0, "arccos");
    return sphere_angle(x.coords, y.coords, c) / std::sqrt(k);
  }
  if (k < 0.0) return hyperboloid_angle(s, x.coords, y.coords) / std::sqrt(-k);
  return (x.coords - y.coords).norm();
}

double tangent_norm(const ModelSpace& s, const TangentVector& v) {
  const double k = s.curvature();
  if (k == 0.0) return v.vec.norm();
  if (k > 0.0) return v.vec.norm() / std::sqrt(k);
  const double q = ambient_inner(s, v.vec, v.vec);
  return std::sqrt(std::max(0.0, q)) / std::sqrt(-k);
}

TangentVector with_length(const ModelSpace& s, const TangentVector& v, double len) {
  const double n = tangent_norm(s, v);
  if (n < kTinyLength) throw InputError("with_length: zero tangent vector");
  return TangentVector{v.base, v.vec * (len / n)};
}

Point exp_map(const ModelSpace& s, const TangentVector& v) {
  validate_tangent(s, v);
  const double k = s.curvature();
  if (k == 0.0) return Point{v.base.coords + v.vec};

  if (k > 0.0) {
    // Ambient angle equals Riemannian length * sqrt(kappa).
    const double theta = v.vec.norm();
    if (theta < kTinyLength) return v.base;
    Eigen::VectorXd c = std::cos(theta) * v.base.coords +
                        std::sin(theta) * (v.vec / theta);
    c /= c.norm();
    return Point{std::move(c)};
  }

  const double eta = std::sqrt(std::max(0.0, ambient_inner(s, v.vec, v.vec)));
  if (eta < kTinyLength) return v.base;
  Eigen::VectorXd c = std::cosh(eta) * v.base.coords +
                      std::sinh(eta) * (v.vec / eta);
  const double q = -ambient_inner(s, c, c);
  if (!(q > 0.0))
    throw InputError("exp_map: hyperboloid coordinates too large for double precision");
  c /= std::sqrt(q);
  return Point{std::move(c)};
}

TangentVector log_map(const ModelSpace& s, const Point& x, const Point& y) {
  check_dim(s, x.coords, "log x");
  check_dim(s, y.coords, "log y");
  const double k = s.curvature();
  const int n = s.ambient_dim();

  if (k == 0.0) return TangentVector{x, y.coords - x.coords};

  if (k > 0.0) {
    const double c = clamp_or_throw(x.coords.dot(y.coords), -1.0, 1.0, "arccos");
    if (c <= -1.0 + 1e-12)
      throw SingularityError("log_map undefined for antipodal points");
    const double theta = sphere_angle(x.coords, y.coords, c);
    if (theta < kTinyLength) return TangentVector{x, Eigen::VectorXd::Zero(n)};
    Eigen::VectorXd w = y.coords - c * x.coords;
    const double wn = w.norm();
    if (wn < kTinyLength)
      throw SingularityError("log_map undefined: degenerate direction");
    return TangentVector{x, (theta / wn) * w};
  }

  const double theta = hyperboloid_angle(s, x.coords, y.coords);
  if (theta < kTinyLength) return TangentVector{x, Eigen::VectorXd::Zero(n)};
  const double m = -ambient_inner(s, x.coords, y.coords);
  if (m < 1.0 - kDomainGuard * std::max(1.0, x.coords.squaredNorm()))
    throw InputError("log_map: points not on a common hyperboloid");
  Eigen::VectorXd w = y.coords - m * x.coords;  // projection: y + <x,y>_M x
  const double wn = std::sqrt(std::max(0.0, ambient_inner(s, w, w)));
  if (wn < kTinyLength)
    throw SingularityError("log_map undefined: degenerate direction");
  return TangentVector{x, (theta / wn) * w};
}

Point geodesic_point(const ModelSpace& s, const Point& x, const Point& y, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("geodesic_point: t outside [0,1]");
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  TangentVector v = log_map(s, x, y);
  v.vec *= t;
  return exp_map(s, v);
}

TangentVector project_to_tangent(const ModelSpace& s, const Point& base,
                                 const Eigen::VectorXd& w) {
  check_dim(s, w, "tangent");
  const double k = s.curvature();
  if (k == 0.0) return TangentVector{base, w};
  if (k > 0.0) return TangentVector{base, w - base.coords.dot(w) * base.coords};
  // <x,x>_M = -1, so the projection is w + <x,w>_M x.
  return TangentVector{base, w + ambient_inner(s, base.coords, w) * base.coords};
}

std::vector<TangentVector> orthonormal_tangent_basis(const ModelSpace& s,
                                                     const Point& at) {
  std::vector<TangentVector> basis;
  for (int i = 0; i < s.ambient_dim() && static_cast<int>(basis.size()) < s.dim(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(s.ambient_dim());
    e(i) = 1.0;
    TangentVector v = project_to_tangent(s, at, e);
    for (const TangentVector& b : basis) {
      const double c = ambient_inner(s, v.vec, b.vec) / ambient_inner(s, b.vec, b.vec);
      v.vec -= c * b.vec;
    }
    const double n = tangent_norm(s, v);
    if (n > 1e-9) {
      v.vec /= n;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

namespace {

// Generalized sine at unit |curvature|; radial volume density is S^(l-1).
double radial_density_s(double kappa, double t) {
  if (kappa > 0.0) return std::sin(t);
  if (kappa < 0.0) return std::sinh(t);
  return t;
}

Point random_sphere_point(const ModelSpace& s, Rng& rng) {
  Eigen::VectorXd g(s.ambient_dim());
  double n = 0.0;
  do {
    for (int i = 0; i < g.size(); ++i) g(i) = rng.normal();
    n = g.norm();
  } while (n < 1e-12);
  return Point{g / n};
}

TangentVector random_unit_tangent(const ModelSpace& s, const Point& at, Rng& rng) {
  while (true) {
    Eigen::VectorXd g(s.ambient_dim());
    for (int i = 0; i < g.size(); ++i) g(i) = rng.normal();
    TangentVector v = project_to_tangent(s, at, g);
    const double n = tangent_norm(s, v);
    if (n > 1e-9) {
      v.vec /= n;
      return v;
    }
  }
}

}  // namespace

Point uniform_random_point(const ModelSpace& s, std::uint64_t seed,
                           const std::optional<Ball>& constraint) {
  Rng rng(seed);
  if (!constraint) {
    if (s.curvature() <= 0.0)
      throw InputError(
          "uniform_random_point: kappa <= 0 model spaces have infinite volume; "
          "a constraint ball is required");
    return random_sphere_point(s, rng);
  }

  const Ball& ball = *constraint;
  validate_point(s, ball.center);
  if (!(ball.radius > 0.0) || !std::isfinite(ball.radius))
    throw InputError("uniform_random_point: constraint radius must be positive and finite");
  if (s.curvature() > 0.0 && ball.radius >= s.cut_distance())
    throw InputError("uniform_random_point: constraint radius must stay below the cut distance");

  const double k = s.curvature();
  const double scale = k == 0.0 ? 1.0 : std::sqrt(std::abs(k));
  const int l = s.dim();
  // Radius rescaled to unit |curvature|; the radial volume density there is
  // proportional to S(r)^(l-1).
  const double rmax = ball.radius * scale;
  const double dens_peak = k > 0.0
      ? radial_density_s(k, std::min(rmax, ModelSpace::pi() / 2.0))
      : radial_density_s(k, rmax);

  double r = 0.0;
  while (true) {
    r = rng.uniform(0.0, rmax);
    const double acc = std::pow(radial_density_s(k, r) / dens_peak, l - 1);
    if (rng.uniform01() <= acc) break;
  }

  TangentVector dir = random_unit_tangent(s, ball.center, rng);
  dir.vec *= r / scale;  // Riemannian length of the step
  return exp_map(s, dir);
}

}  // namespace fml
