#include "fml/solver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fml/rng.hpp"

namespace fml {

namespace {

constexpr double kCoincidenceTol = 1e-8;   // iterate-vs-data-point switch
constexpr double kUniquenessTol = 1e-6;    // cluster diameter threshold

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

// Storage-permutation-invariant processing order.
std::vector<std::size_t> canonical_order(const DiscreteMeasure& mu) {
  std::vector<std::size_t> idx(mu.points.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (lex_less(mu.points[a].coords, mu.points[b].coords)) return true;
    if (lex_less(mu.points[b].coords, mu.points[a].coords)) return false;
    return mu.weights[a] < mu.weights[b];
  });
  return idx;
}

double cost_in_order(const DiscreteMeasure& mu, const std::vector<std::size_t>& order,
                     const Point& x) {
  double c = 0.0;
  for (std::size_t k : order) c += mu.weights[k] * dist(mu.space, x, mu.points[k]);
  return c;
}

struct Pull {
  Eigen::VectorXd direction_sum;  // sum of w_k * unit log vectors (ambient coords)
  double inv_dist_sum = 0.0;      // sum of w_k / d_k over non-coincident points
  double coincident_mass = 0.0;
  std::ptrdiff_t nearest = -1;    // index of a coincident data point, if any
};

Pull compute_pull(const DiscreteMeasure& mu, const std::vector<std::size_t>& order,
                  const Point& x) {
  Pull p;
  p.direction_sum = Eigen::VectorXd::Zero(mu.space.ambient_dim());
  for (std::size_t k : order) {
    const double d = dist(mu.space, x, mu.points[k]);
    if (d <= kCoincidenceTol) {
      p.coincident_mass += mu.weights[k];
      p.nearest = static_cast<std::ptrdiff_t>(k);
      continue;
    }
    const TangentVector lg = log_map(mu.space, x, mu.points[k]);
    p.direction_sum += (mu.weights[k] / d) * lg.vec;
    p.inv_dist_sum += mu.weights[k] / d;
  }
  return p;
}

double riem_norm(const ModelSpace& s, const Point& base, const Eigen::VectorXd& vec) {
  return tangent_norm(s, TangentVector{base, vec});
}

// Radial-tangential curvature factor of the distance Hessian: Hess d(.,p)
// vanishes along the geodesic to p and equals ct_kappa(d) on its complement.
double hessian_factor(const ModelSpace& s, double d) {
  const double k = s.curvature();
  if (k > 0.0) {
    const double sk = std::sqrt(k);
    return sk * std::cos(sk * d) / std::sin(sk * d);
  }
  if (k < 0.0) {
    const double sk = std::sqrt(-k);
    return sk * std::cosh(sk * d) / std::sinh(sk * d);
  }
  return 1.0 / d;
}

// One Newton step on the smooth part of the cost in tangent coordinates.
// Returns false when the Hessian is not safely positive definite.
bool newton_step(const DiscreteMeasure& mu, const std::vector<std::size_t>& order,
                 const Point& x, Point& out) {
  const ModelSpace& s = mu.space;
  const std::vector<TangentVector> basis = orthonormal_tangent_basis(s, x);
  const int l = static_cast<int>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(l, l);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(l);
  const double abs_k = std::abs(s.curvature());
  const double metric = abs_k == 0.0 ? 1.0 : abs_k;  // <e_i, e_j>_amb = |k| d_ij

  for (std::size_t k : order) {
    const double d = dist(s, x, mu.points[k]);
    if (d <= kCoincidenceTol) return false;
    const TangentVector lg = log_map(s, x, mu.points[k]);
    Eigen::VectorXd u(l);
    for (int i = 0; i < l; ++i)
      u(i) = ambient_inner(s, lg.vec, basis[i].vec) / (d * metric);
    const double ct = hessian_factor(s, d);
    g += mu.weights[k] * u;
    h += mu.weights[k] * ct * (Eigen::MatrixXd::Identity(l, l) - u * u.transpose());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 1e-12 * std::max(1.0, lmax))) return false;

  const Eigen::VectorXd step = es.eigenvectors() *
                               (es.eigenvectors().transpose() * g).cwiseQuotient(
                                   es.eigenvalues());
  if (step.norm() > 0.5) return false;
  Eigen::VectorXd ambient = Eigen::VectorXd::Zero(s.ambient_dim());
  for (int i = 0; i < l; ++i) ambient += step(i) * basis[i].vec;
  out = exp_map(s, project_to_tangent(s, x, ambient));
  return true;
}

struct StartOutcome {
  Point x;
  double cost = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

StartOutcome run_one_start(const DiscreteMeasure& mu,
                           const std::vector<std::size_t>& order, Point x,
                           const SolverConfig& cfg) {
  const ModelSpace& s = mu.space;
  // Sphere: stay below the cut. Hyperboloid: long exp jumps cancel
  // catastrophically in the embedding, so march in bounded steps.
  double step_cap = std::numeric_limits<double>::infinity();
  if (s.curvature() > 0.0) step_cap = 0.45 * s.cut_distance();
  if (s.curvature() < 0.0) step_cap = 8.0 / std::sqrt(-s.curvature());
  double cost = cost_in_order(mu, order, x);

  StartOutcome best;  // subgradient mode is not monotone; track the best iterate
  best.x = x;
  best.cost = cost;
  int polish_budget = 40;

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    Pull p = compute_pull(mu, order, x);

    if (p.nearest >= 0) {
      // Snap to the data point and re-evaluate the subgradient condition there.
      x = mu.points[static_cast<std::size_t>(p.nearest)];
      cost = cost_in_order(mu, order, x);
      p = compute_pull(mu, order, x);
      const double n = riem_norm(s, x, p.direction_sum);
      if (n <= p.coincident_mass) {
        StartOutcome out{x, cost, 0.0, iter + 1, true};
        return out;
      }
      // Escape step of length (|R| - w0) / L away from the data point.
      const double len = (n - p.coincident_mass) / std::max(p.inv_dist_sum, 1e-300);
      Eigen::VectorXd v = p.direction_sum * (len / n);
      const double riem_len = riem_norm(s, x, v);
      if (riem_len > step_cap) v *= step_cap / riem_len;
      Point cand = exp_map(s, project_to_tangent(s, x, v));
      const double cand_cost = cost_in_order(mu, order, cand);
      if (cand_cost <= cost + 1e-15 * (1.0 + std::abs(cost))) {
        x = std::move(cand);
        cost = cand_cost;
      } else {
        // No descent available: the data point is a numerical dead end.
        StartOutcome out;
        out.x = x;
        out.cost = cost;
        out.residual = std::max(0.0, n - p.coincident_mass);
        out.iterations = iter + 1;
        out.converged = false;
        return out;
      }
      if (cost < best.cost) {
        best.x = x;
        best.cost = cost;
      }
      continue;
    }

    const double grad_norm = riem_norm(s, x, p.direction_sum);
    if (grad_norm < cfg.tol) {
      StartOutcome out{x, cost, grad_norm, iter, true};
      return out;
    }

    // Close to a data point the inverse-distance weights make Weiszfeld
    // creep; test the vertex subgradient condition directly and settle
    // there when it certifies a minimum.
    {
      std::size_t nearest = order[0];
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t k : order) {
        const double d = dist(s, x, mu.points[k]);
        if (d < dmin) {
          dmin = d;
          nearest = k;
        }
      }
      if (dmin <= 1e-3) {
        const Point& v = mu.points[nearest];
        const Pull pv = compute_pull(mu, order, v);
        const double nv = riem_norm(s, v, pv.direction_sum);
        const double vcost = cost_in_order(mu, order, v);
        if (nv <= pv.coincident_mass && vcost <= cost + 1e-15 * (1.0 + std::abs(cost))) {
          StartOutcome out{v, vcost, 0.0, iter + 1, true};
          return out;
        }
      }
      if (cfg.step_rule == StepRule::weiszfeld && grad_norm < 1e-4 &&
          polish_budget > 0) {
        // Terminal Newton polish: Weiszfeld contracts arbitrarily slowly on
        // ill-conditioned instances, while the smooth Hessian is explicit.
        --polish_budget;
        Point polished;
        if (newton_step(mu, order, x, polished)) {
          const Pull pp = compute_pull(mu, order, polished);
          if (pp.nearest < 0 &&
              riem_norm(s, polished, pp.direction_sum) < 0.5 * grad_norm) {
            x = std::move(polished);
            cost = cost_in_order(mu, order, x);
            if (cost < best.cost) {
              best.x = x;
              best.cost = cost;
            }
            continue;
          }
        }
      }
    }

    Eigen::VectorXd v;
    if (cfg.step_rule == StepRule::weiszfeld) {
      v = p.direction_sum / p.inv_dist_sum;
    } else {
      // Diminishing-step subgradient along the unit pull direction.
      const double step0 = 0.5 * cost + cfg.tol;
      v = p.direction_sum * (step0 / (grad_norm * std::sqrt(iter + 1.0)));
    }
    double riem_len = riem_norm(s, x, v);
    if (riem_len > step_cap) {
      v *= step_cap / riem_len;
      riem_len = step_cap;
    }
    if (riem_len < 0.1 * cfg.tol) {
      // Stalled with a nonzero pull: the iterate is pinned next to a data
      // point (inverse-distance weights dwarf the step). Resolve the vertex
      // itself; the coincidence branch either certifies it or escapes.
      std::size_t nearest = order[0];
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t k : order) {
        const double d = dist(s, x, mu.points[k]);
        if (d < dmin) {
          dmin = d;
          nearest = k;
        }
      }
      x = mu.points[nearest];
      cost = cost_in_order(mu, order, x);
      continue;
    }

    if (cfg.step_rule == StepRule::weiszfeld) {
      // Monotone safeguard for large steps only. Near convergence the cost
      // differences drown in rounding, and rejecting ulp-level "increases"
      // traps the iteration in a limit cycle; tiny steps pass unchecked.
      Point cand = exp_map(s, project_to_tangent(s, x, v));
      double cand_cost = cost_in_order(mu, order, cand);
      if (riem_len > 1e-5) {
        double scale = 1.0;
        int halvings = 0;
        while (cand_cost > cost + 1e-15 * (1.0 + std::abs(cost)) && halvings < 50) {
          scale *= 0.5;
          cand = exp_map(s, project_to_tangent(s, x, scale * v));
          cand_cost = cost_in_order(mu, order, cand);
          ++halvings;
        }
        if (halvings == 50) {
          StartOutcome out{x, cost, grad_norm, iter + 1, false};
          return out;
        }
      }
      x = std::move(cand);
      cost = cand_cost;
    } else {
      x = exp_map(s, project_to_tangent(s, x, v));
      cost = cost_in_order(mu, order, x);
    }
    if (cost < best.cost) {
      best.x = x;
      best.cost = cost;
    }
  }

  // Out of iterations: flagged, not an exception.
  Pull p = compute_pull(mu, order, best.x);
  const double n = riem_norm(s, best.x, p.direction_sum);
  best.residual = p.nearest >= 0 ? std::max(0.0, n - p.coincident_mass) : n;
  best.iterations = iter;
  best.converged = false;
  return best;
}

}  // namespace

void DiscreteMeasure::validate() const {
  if (points.empty()) throw InputError("DiscreteMeasure: needs at least one point");
  if (points.size() != weights.size())
    throw InputError("DiscreteMeasure: points/weights size mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InputError("DiscreteMeasure: weights must be nonnegative and finite");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "DiscreteMeasure: weights sum to " << sum << ", expected 1";
    throw InputError(os.str());
  }
  for (const Point& p : points) validate_point(space, p);
}

DiscreteMeasure DiscreteMeasure::with_uniform_weights(const ModelSpace& s,
                                                      std::vector<Point> pts) {
  const std::size_t n = pts.size();
  if (n == 0) throw InputError("DiscreteMeasure: needs at least one point");
  DiscreteMeasure mu{s, std::move(pts), std::vector<double>(n, 1.0 / static_cast<double>(n))};
  return mu;
}

double frechet_cost(const DiscreteMeasure& mu, const Point& x) {
  mu.validate();
  validate_point(mu.space, x);
  return cost_in_order(mu, canonical_order(mu), x);
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw InputError("SolverConfig: tol must be positive");
  if (max_iters < 1) throw InputError("SolverConfig: max_iters must be >= 1");
  if (multistarts < 1) throw InputError("SolverConfig: multistarts must be >= 1");
}

SolverResult median_solve(const DiscreteMeasure& mu, const SolverConfig& cfg) {
  mu.validate();
  cfg.validate();
  const ModelSpace& s = mu.space;
  const std::vector<std::size_t> order = canonical_order(mu);
  const std::size_t n = mu.points.size();

  // Starts: every data point, then seeded uniform draws. On kappa <= 0 the
  // draws stay inside a ball around the cheapest data point, which contains
  // the (convex-hull) median set.
  std::vector<Point> starts;
  for (std::size_t k : order) starts.push_back(mu.points[k]);

  const std::size_t extra = cfg.multistarts > static_cast<int>(n)
                                ? static_cast<std::size_t>(cfg.multistarts) - n
                                : 0;
  if (extra > 0) {
    std::optional<Ball> region;
    if (s.curvature() <= 0.0) {
      std::size_t best_k = order[0];
      double best_c = std::numeric_limits<double>::infinity();
      for (std::size_t k : order) {
        const double c = cost_in_order(mu, order, mu.points[k]);
        if (c < best_c) {
          best_c = c;
          best_k = k;
        }
      }
      double radius = 0.0;
      for (std::size_t k : order)
        radius = std::max(radius, dist(s, mu.points[best_k], mu.points[k]));
      if (radius > 0.0) region = Ball{mu.points[best_k], 1.2 * radius};
    }
    for (std::size_t j = 0; j < extra; ++j) {
      if (s.curvature() > 0.0) {
        starts.push_back(uniform_random_point(s, derive_seed(cfg.seed, j)));
      } else if (region) {
        starts.push_back(uniform_random_point(s, derive_seed(cfg.seed, j), region));
      }
    }
  }

  std::vector<StartOutcome> outcomes;
  outcomes.reserve(starts.size());
  for (const Point& x0 : starts) outcomes.push_back(run_one_start(mu, order, x0, cfg));

  // Deterministic merge: best cost, ties by lexicographic coordinates.
  const auto better = [](const StartOutcome& a, const StartOutcome& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return lex_less(a.x.coords, b.x.coords);
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i)
    if (better(outcomes[i], outcomes[best])) best = i;

  const double cluster_tol = 1e-7 * (1.0 + std::abs(outcomes[best].cost));
  double diameter = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].cost > outcomes[best].cost + cluster_tol) continue;
    for (std::size_t j = i + 1; j < outcomes.size(); ++j) {
      if (outcomes[j].cost > outcomes[best].cost + cluster_tol) continue;
      diameter = std::max(diameter, dist(s, outcomes[i].x, outcomes[j].x));
    }
  }

  SolverResult res;
  res.median = outcomes[best].x;
  res.cost = outcomes[best].cost;
  res.iterations = outcomes[best].iterations;
  res.converged = outcomes[best].converged;
  res.cluster_diameter = diameter;
  res.unique_flag = diameter < kUniquenessTol;
  try {
    res.residual = first_order_residual(mu, res.median);
  } catch (const SingularityError&) {
    res.residual = outcomes[best].residual;
  }
  return res;
}

double first_order_residual(const DiscreteMeasure& mu, const Point& m) {
  mu.validate();
  validate_point(mu.space, m);
  const std::vector<std::size_t> order = canonical_order(mu);
  // log_map throws SingularityError at cut points, as required.
  const Pull p = compute_pull(mu, order, m);
  const double n = riem_norm(mu.space, m, p.direction_sum);
  if (p.nearest >= 0) return std::max(0.0, n - p.coincident_mass);
  return n;
}

LipschitzCertificate lipschitz_certificate(const DiscreteMeasure& mu, const Point& m,
                                           int trials, std::uint64_t seed,
                                           std::optional<double> f_star) {
  mu.validate();
  validate_point(mu.space, m);
  if (trials < 1) throw InputError("lipschitz_certificate: trials must be >= 1");
  const ModelSpace& s = mu.space;
  const std::vector<std::size_t> order = canonical_order(mu);
  const double fstar = f_star ? *f_star : cost_in_order(mu, order, m);

  double reach = 0.0;
  for (std::size_t k : order) reach = std::max(reach, dist(s, m, mu.points[k]));
  const double scale = 1.0 + reach;
  std::optional<Ball> region;
  if (s.curvature() <= 0.0) region = Ball{m, 2.0 * reach + 1.0};
  const double jitter =
      s.curvature() > 0.0 ? std::min(0.05 * scale, 0.4 * s.cut_distance()) : 0.05 * scale;

  LipschitzCertificate cert;
  cert.ok = true;
  cert.min_slack = std::numeric_limits<double>::infinity();

  for (int tr = 0; tr < trials; ++tr) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(tr)));
    const int anchors = 1 + static_cast<int>(rng.below(6));
    const bool grounded = tr % 2 == 1;  // offsets c_j = -d(m, q_j): phi(m) = 0

    std::vector<Point> q;
    std::vector<double> c;
    for (int j = 0; j < anchors; ++j) {
      Point qj;
      if (rng.uniform01() < 0.5) {
        // Anchor near a data point: these make the certificate tight.
        const std::size_t k = order[rng.below(order.size())];
        qj = uniform_random_point(s, rng.next_u64(), Ball{mu.points[k], jitter});
      } else if (s.curvature() > 0.0) {
        qj = uniform_random_point(s, rng.next_u64());
      } else {
        qj = uniform_random_point(s, rng.next_u64(), region);
      }
      c.push_back(grounded ? -dist(s, m, qj) : rng.uniform(-scale, scale));
      q.push_back(std::move(qj));
    }

    const auto phi = [&](const Point& x) {
      double v = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < q.size(); ++j)
        v = std::min(v, c[j] + dist(s, x, q[j]));
      return v;
    };

    double integral = 0.0;
    for (std::size_t k : order) integral += mu.weights[k] * phi(mu.points[k]);
    const double slack = fstar + integral - phi(m);
    cert.min_slack = std::min(cert.min_slack, slack);
    if (slack < -1e-8) cert.ok = false;
  }
  return cert;
}

bool move_toward_median_check(const DiscreteMeasure& mu, const Point& m,
                              std::size_t k, double t, const SolverConfig& cfg) {
  mu.validate();
  validate_point(mu.space, m);
  if (k >= mu.points.size()) throw InputError("move_toward_median_check: index out of range");
  if (!(t > 0.0 && t < 1.0)) throw InputError("move_toward_median_check: t must lie in (0,1)");
  if (points_equal(mu.space, mu.points[k], m))
    throw InputError("move_toward_median_check: x_k coincides with m");

  DiscreteMeasure moved = mu;
  moved.points[k] = geodesic_point(mu.space, mu.points[k], m, t);
  const double cost_m = frechet_cost(moved, m);
  const SolverResult sol = median_solve(moved, cfg);
  return cost_m <= sol.cost + 1e-8;
}

}  // namespace fml
