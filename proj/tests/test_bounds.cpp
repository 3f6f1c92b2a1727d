#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fml/bounds.hpp"
#include "fml/hmin.hpp"
#include "fml/rng.hpp"
#include "fml/solver.hpp"

using namespace fml;

namespace {

constexpr double kPi = 3.14159265358979323846;

ConcentrationSpec spec_for(const ModelSpace& s, double rho, double alpha) {
  return ConcentrationSpec{s.origin(), rho, alpha};
}

}  // namespace

TEST_CASE("basic bound radius") {
  const ModelSpace flat(0.0, 2);
  CHECK(basic_bound_radius(spec_for(flat, 1.0, 1.0)) == doctest::Approx(2.0));
  CHECK(basic_bound_radius(spec_for(flat, 1.0, 0.75)) == doctest::Approx(3.0));
  CHECK(basic_bound_radius(spec_for(flat, 1.0, 0.51)) == doctest::Approx(51.0));
  CHECK_THROWS_AS(basic_bound_radius(spec_for(flat, 1.0, 0.5)), InputError);
  CHECK_THROWS_AS(basic_bound_radius(spec_for(flat, 1.0, 0.3)), InputError);
}

TEST_CASE("r_star per curvature sign") {
  CHECK(r_star(ModelSpace(1.0, 2)) == doctest::Approx(kPi));
  CHECK(r_star(ModelSpace(4.0, 2)) == doctest::Approx(kPi / 2));
  CHECK(std::isinf(r_star(ModelSpace(0.0, 2))));
  CHECK(std::isinf(r_star(ModelSpace(-1.0, 2))));
}

TEST_CASE("assumption check") {
  CHECK(assumption_check(ModelSpace(0.0, 2), spec_for(ModelSpace(0.0, 2), 5.0, 0.51)));
  CHECK(assumption_check(ModelSpace(-1.0, 2), spec_for(ModelSpace(-1.0, 2), 5.0, 0.51)));
  const ModelSpace sphere(1.0, 2);
  CHECK(assumption_check(sphere, spec_for(sphere, 1.0, 0.75)));   // 3 < pi
  CHECK_FALSE(assumption_check(sphere, spec_for(sphere, 1.0, 0.6)));  // 6 >= pi
}

TEST_CASE("generalized sine") {
  CHECK(s_delta(ModelSpace(0.0, 2), 2.0) == doctest::Approx(2.0));
  CHECK(s_delta(ModelSpace(1.0, 2), kPi / 2) == doctest::Approx(1.0));
  CHECK(s_delta(ModelSpace(-1.0, 2), 1.0) == doctest::Approx(1.1752011936438014));
  CHECK_THROWS_AS(s_delta(ModelSpace(1.0, 2), -0.1), InputError);
}

TEST_CASE("F evaluation") {
  SUBCASE("printed sphere value at the remark parameters") {
    const double alpha = 0.51;
    const double rho = 0.99 * kPi * (1.0 - 1.0 / (2.0 * alpha));
    const double v = F_eval(alpha, rho, 1.0, kPi / 2 - rho);
    CHECK(std::abs(v - 0.2907) < 5e-4);
    CHECK(v == doctest::Approx(0.29067198380022011).epsilon(1e-10));
  }
  SUBCASE("alpha = 1 collapses the flat branch") {
    CHECK(F_eval(1.0, 1.0, 0.0, 0.25) == doctest::Approx(-0.25));
    CHECK(F_eval(1.0, 1.0, 0.0, 0.9) < 0.0);
  }
  SUBCASE("flat linear formula") {
    CHECK(F_eval(0.75, 1.0, 0.0, 0.5) == doctest::Approx(0.0));
  }
  SUBCASE("cot arguments must stay in (0, pi)") {
    CHECK_THROWS_AS(F_eval(0.75, 7.0, 1.0, 1.0), InputError);
  }
}

TEST_CASE("F root") {
  SUBCASE("flat closed form") {
    CHECK(F_root(0.75, 1.0, 0.0) == doctest::Approx(0.5));
  }
  SUBCASE("hyperbolic root vs sign-scan oracle") {
    const double root = F_root(0.75, 1.0, -1.0);
    CHECK(root == doctest::Approx(0.37214738822430211).epsilon(1e-9));
    // 1e-6 grid sign scan.
    const double upper = 1.0 / 0.5;
    double scan = 0.0;
    for (double t = 1e-6; t < upper; t += 1e-6) {
      if (F_eval(0.75, 1.0, -1.0, t) < 0.0) {
        scan = t;
        break;
      }
    }
    CHECK(std::abs(root - scan) < 2e-6);  // scan resolution
  }
  SUBCASE("sphere remark parameters put the root above pi/2 - rho") {
    const double alpha = 0.51;
    const double rho = 0.99 * kPi * (1.0 - 1.0 / (2.0 * alpha));
    CHECK(F_root(alpha, rho, 1.0) > kPi / 2 - rho);
  }
  SUBCASE("bracketing property") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
      const double alpha = rng.uniform(0.55, 0.95);
      const double rho = rng.uniform(0.1, 1.0);
      const double kappa = rng.uniform(-2.0, 2.0);
      if (kappa > 0.0 && !(2.0 * alpha * rho / (2.0 * alpha - 1.0) < kPi / std::sqrt(kappa)))
        continue;
      const double root = F_root(alpha, rho, kappa);
      const double eps = 1e-6 * rho;
      CHECK(F_eval(alpha, rho, kappa, root - eps) > 0.0);
      CHECK(F_eval(alpha, rho, kappa, root + eps) < 0.0);
    }
  }
  SUBCASE("alpha = 1 is rejected") {
    CHECK_THROWS_AS(F_root(1.0, 1.0, 0.0), InputError);
  }
}

TEST_CASE("refined radius values") {
  SUBCASE("flat direct substitution") {
    const ModelSpace flat(0.0, 2);
    const BoundReport rep = refined_bound_radius(flat, spec_for(flat, 1.0, 0.75));
    REQUIRE(rep.refined_radius.has_value());
    CHECK(*rep.refined_radius == doctest::Approx(1.0606601717798212).epsilon(1e-12));
    CHECK(rep.case_tag == BoundCase::flat);
    CHECK(rep.t_root.has_value());
  }
  SUBCASE("hyperbolic printed formula, high-precision frozen value") {
    const ModelSpace hyp(-1.0, 2);
    const BoundReport rep = refined_bound_radius(hyp, spec_for(hyp, 0.5, 0.6));
    REQUIRE(rep.refined_radius.has_value());
    CHECK(*rep.refined_radius == doctest::Approx(0.65194771851578965).epsilon(1e-12));
    CHECK(rep.case_tag == BoundCase::negative);
  }
  SUBCASE("sphere condition a)") {
    const ModelSpace sphere(1.0, 2);
    const BoundReport rep = refined_bound_radius(sphere, spec_for(sphere, 0.3, 0.75));
    CHECK(rep.case_tag == BoundCase::positive_a);
    REQUIRE(rep.refined_radius.has_value());
    CHECK(*rep.refined_radius == doctest::Approx(0.31882028335999241).epsilon(1e-12));
  }
  SUBCASE("paper remark parameters stay unverified") {
    const ModelSpace sphere(1.0, 2);
    const double alpha = 0.51;
    const double rho = 0.99 * kPi * (1.0 - 1.0 / (2.0 * alpha));
    const BoundReport rep = refined_bound_radius(sphere, spec_for(sphere, rho, alpha));
    CHECK(rep.assumption_ok);
    CHECK(rep.case_tag == BoundCase::positive_unverified);
    CHECK_FALSE(rep.refined_radius.has_value());
    // Condition a) fails: basic radius above r_star / 2.
    CHECK(rep.r_basic > rep.r_star / 2.0);
  }
  SUBCASE("assumption violation is an input error") {
    const ModelSpace sphere(1.0, 2);
    CHECK_THROWS_AS(refined_bound_radius(sphere, spec_for(sphere, 1.0, 0.6)), InputError);
  }
}

TEST_CASE("report invariants over a parameter grid") {
  int tested = 0;
  for (int ik = 0; ik < 10; ++ik) {
    const double kappa = -2.0 + 4.0 * ik / 9.0;
    for (int ia = 0; ia < 25; ++ia) {
      const double alpha = ia == 24 ? 1.0 : 0.505 + 0.02 * ia;
      for (int ir = 0; ir < 10; ++ir) {
        const double rho = 0.05 + 0.15 * ir;
        const ModelSpace s(kappa, 2);
        const ConcentrationSpec spec = spec_for(s, rho, alpha);
        if (!assumption_check(s, spec)) continue;
        ++tested;
        const BoundReport rep = refined_bound_radius(s, spec);
        const double refined = refined_radius_formula(s, alpha, rho);
        CHECK(refined <= rep.r_basic + 1e-12);
        if (alpha < 1.0) CHECK(refined < rep.r_basic);
        CHECK(refined >= rho - 1e-12);
        if (alpha == 1.0) CHECK(refined == doctest::Approx(rho).epsilon(1e-12));
        if (alpha < 1.0) CHECK(refined > rho);
        if (rep.refined_radius) {
          CHECK(*rep.refined_radius < rep.r_star / 2.0);
          CHECK(*rep.refined_radius == doctest::Approx(refined));
        }
        if (rep.t_root) {
          CHECK(*rep.t_root > 0.0);
          CHECK(*rep.t_root < rho / (2.0 * alpha - 1.0));
        }
      }
    }
  }
  CHECK(tested > 800);
}

TEST_CASE("lemma-of-sense inequality on seeded triples") {
  Rng rng(2718);
  int tested = 0;
  while (tested < 2000) {
    const double kappa = rng.uniform(-2.0, 2.0);
    const double alpha = rng.uniform(0.5005, 1.0);
    const double rho = rng.uniform(0.02, 1.5);
    const ModelSpace s(kappa, 2);
    const ConcentrationSpec spec = spec_for(s, rho, alpha);
    if (!assumption_check(s, spec)) continue;
    ++tested;
    const double lhs = alpha * s_delta(s, rho) / std::sqrt(2.0 * alpha - 1.0);
    // kappa > 0 compares at r_star/2 exactly; kappa <= 0 at the working-ball
    // proxy radius r = 2 r_basic (so r/2 = r_basic).
    const double half = kappa > 0.0 ? r_star(s) / 2.0 : basic_bound_radius(spec);
    CHECK(lhs < s_delta(s, half));
  }
}

TEST_CASE("monotonicity of the refined radius") {
  for (double kappa : {1.0, 0.0, -1.0}) {
    const ModelSpace s(kappa, 2);
    // Nondecreasing in rho at fixed alpha.
    for (int ia = 0; ia < 50; ++ia) {
      const double alpha = 0.51 + 0.0098 * ia;
      double prev = -1.0;
      for (int ir = 0; ir < 50; ++ir) {
        const double rho = 0.02 + 0.01 * ir;
        if (!assumption_check(s, spec_for(s, rho, alpha))) break;
        const double v = refined_radius_formula(s, alpha, rho);
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
    // Nonincreasing in alpha at fixed rho.
    for (int ir = 0; ir < 50; ++ir) {
      const double rho = 0.02 + 0.008 * ir;
      double prev = 1e300;
      for (int ia = 0; ia < 50; ++ia) {
        const double alpha = 0.51 + 0.0098 * ia;
        if (!assumption_check(s, spec_for(s, rho, alpha))) continue;
        const double v = refined_radius_formula(s, alpha, rho);
        CHECK(v <= prev + 1e-12);
        prev = v;
      }
    }
  }
}

TEST_CASE("kappa -> 0 continuity") {
  const ModelSpace flat(0.0, 2);
  for (double alpha : {0.6, 0.75, 0.9}) {
    for (double rho : {0.3, 0.8, 1.2}) {
      const double v0 = refined_radius_formula(flat, alpha, rho);
      const double vp = refined_radius_formula(ModelSpace(1e-6, 2), alpha, rho);
      const double vm = refined_radius_formula(ModelSpace(-1e-6, 2), alpha, rho);
      CHECK(std::abs(vp - v0) / v0 < 1e-5);
      CHECK(std::abs(vm - v0) / v0 < 1e-5);
    }
  }
}

TEST_CASE("exclusion test") {
  const ModelSpace flat(0.0, 2);
  SUBCASE("alpha = 1: any positive hmin excludes") {
    const ConcentrationSpec spec = spec_for(flat, 1.0, 1.0);
    Point x{Eigen::Vector2d(2.0, 0.0)}, z{Eigen::Vector2d(0.5, 0.0)};
    CHECK(exclusion_test(flat, spec, x, z, 0.01));
    CHECK_FALSE(exclusion_test(flat, spec, x, z, 0.0));
  }
  SUBCASE("z = a recovers the basic estimation threshold") {
    // hmin >= D - 2 rho excludes iff D > 2 alpha rho / (2 alpha - 1).
    const double alpha = 0.75, rho = 1.0;
    const ConcentrationSpec spec = spec_for(flat, rho, alpha);
    const Point a = flat.origin();
    for (double D : {2.5, 2.9, 3.1, 3.5}) {
      Point x{Eigen::Vector2d(D, 0.0)};
      const bool excluded = exclusion_test(flat, spec, x, a, D - 2.0 * rho);
      CHECK(excluded == (D - 2.0 * rho > (1.0 - alpha) / alpha * D));
      CHECK(excluded == (D > 2.0 * alpha * rho / (2.0 * alpha - 1.0)));
    }
  }
  SUBCASE("flat instance matches an explicit adversarial cost comparison") {
    // x at 1.2 from the center, z on the segment [x, a] at u = 0.95.
    const double alpha = 0.75, rho = 1.0, t = 0.2, u = 0.95;
    const ConcentrationSpec spec = spec_for(flat, rho, alpha);
    const HminInstance inst{HminGeometry::flat, rho, t, u};
    const double hv = hmin_closed_form(inst);
    Point x{Eigen::Vector2d(rho + t, 0.0)}, z{Eigen::Vector2d(u, 0.0)};
    CHECK(exclusion_test(flat, spec, x, z, hv));

    // Worst-case measure: mass alpha at the hmin argmin boundary point, mass
    // 1 - alpha beyond x on the ray z -> x, where d(x,q) - d(z,q) = -d(x,z).
    const double theta = hmin_bruteforce_argmin(inst, 100000);
    Point p{Eigen::Vector2d(rho * std::cos(theta), rho * std::sin(theta))};
    Point q{Eigen::Vector2d(rho + t + 1.0, 0.0)};
    DiscreteMeasure mu{flat, {p, q}, {alpha, 1.0 - alpha}};
    const double fx = frechet_cost(mu, x);
    const double fz = frechet_cost(mu, z);
    CHECK(fx > fz);
    // The gap equals alpha*hmin - (1-alpha) d(x,z) for this measure.
    CHECK(fx - fz ==
          doctest::Approx(alpha * hv - (1.0 - alpha) * dist(flat, x, z)).epsilon(1e-9));
  }
}
