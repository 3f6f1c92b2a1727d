#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fml/geometry.hpp"
#include "fml/rng.hpp"

using namespace fml;

namespace {

Point pt(std::initializer_list<double> v) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) c(i++) = x;
  return Point{std::move(c)};
}

Point random_point(const ModelSpace& s, Rng& rng, double reach = 2.0) {
  if (s.curvature() > 0.0) return uniform_random_point(s, rng.next_u64());
  return uniform_random_point(s, rng.next_u64(), Ball{s.origin(), reach});
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("distance matches the model formulas") {
  const ModelSpace sphere(1.0, 2);
  CHECK(dist(sphere, pt({1, 0, 0}), pt({0, 1, 0})) == doctest::Approx(kPi / 2).epsilon(1e-14));

  const ModelSpace flat(0.0, 2);
  CHECK(dist(flat, pt({0, 0}), pt({3, 4})) == doctest::Approx(5.0).epsilon(1e-15));

  const ModelSpace hyp(-1.0, 2);
  CHECK(dist(hyp, pt({0, 0, 1}), pt({std::sinh(1.0), 0, std::cosh(1.0)})) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // Curvature scaling: same embedding, distances shrink by 1/sqrt(kappa).
  const ModelSpace sphere4(4.0, 2);
  CHECK(dist(sphere4, pt({1, 0, 0}), pt({0, 1, 0})) == doctest::Approx(kPi / 4).epsilon(1e-14));
}

TEST_CASE("distance input errors") {
  const ModelSpace sphere(1.0, 2);
  CHECK_THROWS_AS(dist(sphere, pt({1, 0}), pt({0, 1, 0})), InputError);
  CHECK_THROWS_AS(validate_point(sphere, pt({2, 0, 0})), InputError);
  CHECK_THROWS_AS(ModelSpace(1.0, 1), InputError);
}

TEST_CASE("exp_map on the three spaces") {
  const ModelSpace sphere(1.0, 2);
  const Point base = pt({1, 0, 0});
  SUBCASE("zero vector") {
    const Point r = exp_map(sphere, TangentVector{base, Eigen::Vector3d(0, 0, 0)});
    CHECK(points_equal(sphere, r, base, 1e-15));
  }
  SUBCASE("quarter great circle") {
    const Point r = exp_map(sphere, TangentVector{base, Eigen::Vector3d(0, kPi / 2, 0)});
    CHECK(points_equal(sphere, r, pt({0, 1, 0}), 1e-12));
  }
  SUBCASE("hyperbolic unit step") {
    const ModelSpace hyp(-1.0, 2);
    const Point r = exp_map(hyp, TangentVector{pt({0, 0, 1}), Eigen::Vector3d(1, 0, 0)});
    CHECK(points_equal(hyp, r, pt({std::sinh(1.0), 0, std::cosh(1.0)}), 1e-12));
  }
  SUBCASE("non-finite input") {
    CHECK_THROWS_AS(
        exp_map(sphere, TangentVector{base, Eigen::Vector3d(0, std::nan(""), 0)}),
        InputError);
  }
}

TEST_CASE("log_map inverts exp_map") {
  const ModelSpace sphere(1.0, 2);
  SUBCASE("y = x gives the zero vector") {
    const Point x = pt({0, 0, 1});
    CHECK(tangent_norm(sphere, log_map(sphere, x, x)) == 0.0);
  }
  SUBCASE("flat log is y - x") {
    const ModelSpace flat(0.0, 2);
    const TangentVector v = log_map(flat, pt({1, 2}), pt({4, 6}));
    CHECK(v.vec(0) == doctest::Approx(3.0));
    CHECK(v.vec(1) == doctest::Approx(4.0));
  }
  SUBCASE("inverse of the quarter-circle example") {
    const TangentVector v = log_map(sphere, pt({1, 0, 0}), pt({0, 1, 0}));
    CHECK(v.vec(1) == doctest::Approx(kPi / 2).epsilon(1e-14));
    CHECK(std::abs(v.vec(0)) < 1e-15);
  }
  SUBCASE("antipodal pair is singular") {
    CHECK_THROWS_AS(log_map(sphere, pt({1, 0, 0}), pt({-1, 0, 0})), SingularityError);
  }
}

TEST_CASE("geodesic_point endpoints and interpolation") {
  const ModelSpace flat(0.0, 2);
  const Point x = pt({0, 0}), y = pt({2, 0});
  CHECK(points_equal(flat, geodesic_point(flat, x, y, 0.0), x, 0.0));
  CHECK(points_equal(flat, geodesic_point(flat, x, y, 1.0), y, 0.0));
  CHECK(points_equal(flat, geodesic_point(flat, x, y, 0.25), pt({0.5, 0}), 1e-15));

  const ModelSpace sphere(1.0, 2);
  const Point mid = geodesic_point(sphere, pt({1, 0, 0}), pt({0, 1, 0}), 0.5);
  const double s2 = std::sqrt(2.0) / 2.0;
  CHECK(points_equal(sphere, mid, pt({s2, s2, 0}), 1e-12));

  CHECK_THROWS_AS(geodesic_point(flat, x, y, 1.5), InputError);
}

TEST_CASE("uniform_random_point determinism and support") {
  const ModelSpace sphere(1.0, 2);
  const Point a = uniform_random_point(sphere, 42);
  const Point b = uniform_random_point(sphere, 42);
  CHECK(points_equal(sphere, a, b, 0.0));

  SUBCASE("law of large numbers on S^2") {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int i = 0; i < 10000; ++i)
      mean += uniform_random_point(sphere, derive_seed(7, i)).coords;
    mean /= 10000.0;
    CHECK(mean.norm() < 0.05);
  }
  SUBCASE("constraint ball is honored") {
    const Point center = pt({0, 0, 1});
    for (int i = 0; i < 200; ++i) {
      const Point p = uniform_random_point(sphere, derive_seed(9, i), Ball{center, 0.3});
      CHECK(dist(sphere, center, p) <= 0.3 + 1e-12);
    }
  }
  SUBCASE("degenerate constraint is rejected") {
    CHECK_THROWS_AS(uniform_random_point(sphere, 1, Ball{pt({0, 0, 1}), 0.0}), InputError);
    const ModelSpace flat(0.0, 2);
    CHECK_THROWS_AS(uniform_random_point(flat, 1), InputError);
  }
}

TEST_CASE("metric axioms on seeded triples") {
  for (double kappa : {1.0, 0.0, -1.0, 4.0, -2.0}) {
    for (int dim : {2, 3}) {
      const ModelSpace s(kappa, dim);
      Rng rng(derive_seed(1234, static_cast<std::uint64_t>(kappa * 10 + dim)));
      for (int i = 0; i < 1000; ++i) {
        const Point x = random_point(s, rng);
        const Point y = random_point(s, rng);
        const Point z = random_point(s, rng);
        const double dxy = dist(s, x, y);
        CHECK(std::abs(dxy - dist(s, y, x)) <= 1e-12);
        CHECK(dxy >= 0.0);
        if (kappa > 0.0) CHECK(dxy <= s.cut_distance() + 1e-12);
        CHECK(dist(s, x, z) - dxy - dist(s, y, z) <= 1e-10);
        CHECK(dist(s, x, x) == 0.0);
      }
    }
  }
}

TEST_CASE("exp/log round trip and norm identity") {
  for (double kappa : {1.0, 0.0, -1.0, 4.0, -2.0}) {
    for (int dim : {2, 3}) {
      const ModelSpace s(kappa, dim);
      Rng rng(derive_seed(77, static_cast<std::uint64_t>(kappa * 10 + dim)));
      for (int i = 0; i < 1000; ++i) {
        const Point x = random_point(s, rng);
        const Point y = random_point(s, rng);
        const double d = dist(s, x, y);
        if (d >= 0.9 * s.cut_distance()) continue;
        const TangentVector v = log_map(s, x, y);
        CHECK(std::abs(tangent_norm(s, v) - d) <= 1e-10);
        CHECK(dist(s, exp_map(s, v), y) < 1e-9);
      }
    }
  }
}

TEST_CASE("spherical law of cosines residual") {
  const ModelSpace s(1.0, 2);
  Rng rng(555);
  for (int i = 0; i < 1000; ++i) {
    const Point A = random_point(s, rng);
    const Point B = random_point(s, rng);
    const Point C = random_point(s, rng);
    const double a = dist(s, C, B), b = dist(s, C, A), c = dist(s, A, B);
    if (a < 1e-6 || b < 1e-6 || a > 0.98 * kPi || b > 0.98 * kPi) continue;
    const TangentVector u = log_map(s, C, A);
    const TangentVector v = log_map(s, C, B);
    const double cosC = ambient_inner(s, u.vec, v.vec) /
                        (u.vec.norm() * v.vec.norm());
    const double residual =
        std::cos(c) - (std::cos(a) * std::cos(b) + std::sin(a) * std::sin(b) * cosC);
    CHECK(std::abs(residual) <= 1e-10);
  }
}

TEST_CASE("geodesic arclength additivity") {
  for (double kappa : {1.0, 0.0, -1.0}) {
    const ModelSpace s(kappa, 2);
    Rng rng(derive_seed(31337, static_cast<std::uint64_t>(kappa + 3)));
    for (int i = 0; i < 1000; ++i) {
      const Point x = random_point(s, rng);
      const Point y = random_point(s, rng);
      const double d = dist(s, x, y);
      if (d < 1e-9 || d >= 0.9 * s.cut_distance()) continue;
      const double t1 = rng.uniform01(), t2 = rng.uniform01();
      const Point g1 = geodesic_point(s, x, y, t1);
      const Point g2 = geodesic_point(s, x, y, t2);
      CHECK(std::abs(dist(s, g1, g2) - std::abs(t2 - t1) * d) <= 1e-10);
      CHECK(std::abs(dist(s, x, g1) - t1 * d) <= 1e-10);
    }
  }
}
