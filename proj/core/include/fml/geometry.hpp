#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fml/errors.hpp"

namespace fml {

// Simply connected model space M^l_kappa of constant sectional curvature.
// Points are embedded: unit sphere in R^{l+1} (kappa > 0), R^l (kappa = 0),
// unit hyperboloid in Minkowski R^{l,1} with positive last (time) coordinate
// (kappa < 0). Curvature is folded into the distance formula, so the same
// embedding serves every |kappa|.
class ModelSpace {
 public:
  ModelSpace(double curvature, int dim);

  double curvature() const { return kappa_; }
  int dim() const { return dim_; }
  int ambient_dim() const { return kappa_ == 0.0 ? dim_ : dim_ + 1; }

  // pi/sqrt(kappa) on the sphere, +inf for kappa <= 0.
  double cut_distance() const {
    return kappa_ > 0.0 ? pi() / std::sqrt(kappa_)
                        : std::numeric_limits<double>::infinity();
  }

  struct Point origin() const;

  static constexpr double pi() { return 3.141592653589793238462643383279503; }

 private:
  double kappa_;
  int dim_;
};

struct Point {
  Eigen::VectorXd coords;
};

// Tangent vector attached to a base point, stored in ambient coordinates and
// orthogonal to the base in the ambient (Euclidean or Minkowski) inner product.
struct TangentVector {
  Point base;
  Eigen::VectorXd vec;
};

struct Ball {
  Point center;
  double radius = 0.0;
};

// Euclidean dot for kappa >= 0, Minkowski (+,...,+,-) for kappa < 0.
double ambient_inner(const ModelSpace& s, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& b);

// Throws InputError when x is off the manifold by more than tol.
void validate_point(const ModelSpace& s, const Point& x, double tol = 1e-9);
void validate_tangent(const ModelSpace& s, const TangentVector& v,
                      double tol = 1e-10);

// Renormalizes coords onto the manifold if within tol of it, else throws.
Point project_to_manifold(const ModelSpace& s, Eigen::VectorXd coords,
                          double tol = 1e-6);

bool points_equal(const ModelSpace& s, const Point& a, const Point& b,
                  double tol = 1e-9);

// Geodesic distance. Symmetric, zero iff equal, bounded by cut_distance.
double dist(const ModelSpace& s, const Point& x, const Point& y);

// Riemannian length of a tangent vector (ambient length rescaled by
// 1/sqrt(|kappa|) so that exp/log/dist agree for every curvature).
double tangent_norm(const ModelSpace& s, const TangentVector& v);

// Rescale v to Riemannian length len (v must be nonzero).
TangentVector with_length(const ModelSpace& s, const TangentVector& v,
                          double len);

Point exp_map(const ModelSpace& s, const TangentVector& v);

// Throws SingularityError for antipodal pairs on the sphere.
TangentVector log_map(const ModelSpace& s, const Point& x, const Point& y);

// Point at parameter t in [0,1] on the minimal geodesic from x to y.
Point geodesic_point(const ModelSpace& s, const Point& x, const Point& y,
                     double t);

// Orthogonal projection of an ambient vector onto the tangent space at base.
TangentVector project_to_tangent(const ModelSpace& s, const Point& base,
                                 const Eigen::VectorXd& w);

// Riemannian-orthonormal basis of the tangent space at a point.
std::vector<TangentVector> orthonormal_tangent_basis(const ModelSpace& s,
                                                     const Point& at);

// Uniform draw, deterministic in seed. Without a constraint only the sphere
// is admissible (kappa <= 0 has no uniform distribution); with one, draws are
// uniform in the geodesic ball.
Point uniform_random_point(const ModelSpace& s, std::uint64_t seed,
                           const std::optional<Ball>& constraint = std::nullopt);

}  // namespace fml
