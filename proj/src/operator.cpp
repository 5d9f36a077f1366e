#include "qso/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

namespace qso {

HeredityTensor::HeredityTensor(std::size_t n) : n_(n), p_(n * n * n, 0.0) {
  if (n < 2) throw OperatorError(fmt::format("heredity tensor needs n >= 2, got {}", n));
}

HeredityTensor HeredityTensor::from_entries(std::size_t n, const std::vector<Coefficient>& entries) {
  HeredityTensor t(n);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> given;
  for (const auto& e : entries) {
    if (e.i >= n || e.j >= n || e.k >= n) {
      throw OperatorError(fmt::format("coefficient ({},{},{}) out of range for n = {}", e.i + 1, e.j + 1,
                                      e.k + 1, n));
    }
    auto [it, inserted] = given.emplace(std::tuple{e.i, e.j, e.k}, e.p);
    if (!inserted) {
      throw OperatorError(fmt::format("coefficient ({},{},{}) listed twice", e.i + 1, e.j + 1, e.k + 1));
    }
  }
  for (const auto& [key, p] : given) {
    const auto [i, j, k] = key;
    t(i, j, k) = p;
    if (!given.contains({j, i, k})) t(j, i, k) = p;
  }
  return t;
}

std::vector<Coefficient> HeredityTensor::canonical_entries() const {
  std::vector<Coefficient> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j)
      for (std::size_t k = 0; k < n_; ++k)
        if ((*this)(i, j, k) != 0.0) out.push_back({i, j, k, (*this)(i, j, k)});
  return out;
}

QsoOperator make_operator(HeredityTensor t, bool symmetrize, double eps_coef) {
  const std::size_t n = t.n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double v = t(i, j, k);
        if (!std::isfinite(v)) {
          throw OperatorError(fmt::format("P({},{},{}) is not finite", i + 1, j + 1, k + 1));
        }
        if (v < 0.0) {
          throw OperatorError(fmt::format("P({},{},{}) = {:.17g} is negative", i + 1, j + 1, k + 1, v));
        }
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (symmetrize) {
          const double m = 0.5 * (t(i, j, k) + t(j, i, k));
          t(i, j, k) = m;
          t(j, i, k) = m;
        } else if (std::abs(t(i, j, k) - t(j, i, k)) > eps_coef) {
          throw OperatorError(fmt::format("P({},{},{}) = {:.17g} differs from P({},{},{}) = {:.17g}", i + 1,
                                          j + 1, k + 1, t(i, j, k), j + 1, i + 1, k + 1, t(j, i, k)));
        }
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += t(i, j, k);
      if (std::abs(s - 1.0) > eps_coef) {
        throw OperatorError(
            fmt::format("coefficients of pair ({},{}) sum to {:.17g}, expected 1", i + 1, j + 1, s));
      }
    }
  return QsoOperator(std::move(t));
}

std::vector<double> evaluate_raw(const QsoOperator& V, std::span<const double> x) {
  const std::size_t n = V.n();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = x[i] * x[j];
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) y[k] += V.p(i, j, k) * w;
    }
  }
  return y;
}

SimplexPoint evaluate(const QsoOperator& V, const SimplexPoint& x) {
  if (x.dim() != V.n()) {
    throw OperatorError(fmt::format("point has dimension {}, operator has {}", x.dim(), V.n()));
  }
  return SimplexPoint::normalized(evaluate_raw(V, x.coords()));
}

SimplexPoint evaluate_canonical(const QsoOperator& V, const SimplexPoint& x, double eps_coef) {
  const std::size_t n = V.n();
  if (x.dim() != n) {
    throw OperatorError(fmt::format("point has dimension {}, operator has {}", x.dim(), n));
  }
  if (std::abs(V.p(n - 1, n - 1, n - 1) - 1.0) > eps_coef) {
    throw OperatorError("reduced form needs P(n,n,n) = 1");
  }
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        if (V.p(i, j, k) > eps_coef) {
          throw OperatorError(fmt::format("reduced form needs P({},{},{}) = 0", i + 1, j + 1, k + 1));
        }

  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double v = 0.0;
    for (std::size_t l = 0; l <= k; ++l) {
      v += V.p(l, l, k) * x[l] * x[l];
      for (std::size_t j = l + 1; j < n; ++j) v += 2.0 * V.p(l, j, k) * x[l] * x[j];
    }
    y[k] = v;
  }
  double last = x[n - 1] * x[n - 1];
  for (std::size_t l = 0; l + 1 < n; ++l) {
    last += V.p(l, l, n - 1) * x[l] * x[l];
    for (std::size_t j = l + 1; j < n; ++j) last += 2.0 * V.p(l, j, n - 1) * x[l] * x[j];
  }
  y[n - 1] = last;
  return SimplexPoint::normalized(std::move(y));
}

SimplexPoint iterate(const QsoOperator& V, const SimplexPoint& x, std::size_t m) {
  SimplexPoint cur = x;
  for (std::size_t s = 0; s < m; ++s) cur = evaluate(V, cur);
  return cur;
}

TrajectoryResult trajectory(const QsoOperator& V, const SimplexPoint& x, const TrajectoryOptions& opts) {
  TrajectoryResult r{x, 0, 0.0, false, {}};
  if (opts.record_path) r.path.push_back(x);
  SimplexPoint cur = x;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    SimplexPoint next = evaluate(V, cur);
    const double step = l1_distance(next, cur);
    if (opts.record_path) r.path.push_back(next);
    cur = std::move(next);
    r.iterations_used = it;
    r.final_step_l1 = step;
    if (step <= opts.tol) {
      r.converged = true;
      break;
    }
  }
  r.limit = std::move(cur);
  return r;
}

double fixed_point_residual(const QsoOperator& V, const SimplexPoint& x) {
  return l1_distance(evaluate(V, x), x);
}

Eigen::MatrixXd reduced_jacobian(const QsoOperator& V, std::span<const double> x) {
  const std::size_t n = V.n();
  if (x.size() != n) {
    throw OperatorError(fmt::format("point has dimension {}, operator has {}", x.size(), n));
  }
  const auto m = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd J(m, m);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double tail = 0.0;  // d V_k / d x_n
    for (std::size_t j = 0; j < n; ++j) tail += V.p(n - 1, j, k) * x[j];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < n; ++j) d += V.p(i, j, k) * x[j];
      J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = 2.0 * (d - tail);
    }
  }
  return J;
}

std::vector<double> vertex_eigenvalues(const QsoOperator& V) {
  const std::size_t n = V.n();
  std::vector<double> ev(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) ev[k] = 2.0 * V.p(k, n - 1, k);
  return ev;
}

namespace {

std::vector<double> full_from_reduced(const Eigen::VectorXd& y) {
  std::vector<double> x(static_cast<std::size_t>(y.size()) + 1);
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    x[static_cast<std::size_t>(i)] = y(i);
    s += y(i);
  }
  x.back() = 1.0 - s;
  return x;
}

bool feasible(const Eigen::VectorXd& y, double eps) {
  return y.minCoeff() >= -eps && y.sum() <= 1.0 + eps;
}

// Damped Newton on F(y) - y in the reduced chart. Steps leaving the simplex
// are halved; the best point seen (by full residual) is returned.
FixedPoint newton_polish(const QsoOperator& V, const SimplexPoint& start, const FixedPointOptions& opts) {
  const std::size_t n = V.n();
  const auto m = static_cast<Eigen::Index>(n - 1);
  constexpr double kFeasEps = 1e-13;

  FixedPoint best{start, fixed_point_residual(V, start)};
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) y(i) = start[static_cast<std::size_t>(i)];

  for (std::size_t it = 0; it < opts.newton_max_iter && best.residual > 0.0; ++it) {
    const std::vector<double> x = full_from_reduced(y);
    const std::vector<double> vx = evaluate_raw(V, x);
    Eigen::VectorXd g(m);
    for (Eigen::Index k = 0; k < m; ++k) g(k) = vx[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)];
    Eigen::MatrixXd jg = reduced_jacobian(V, x) - Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd step = jg.colPivHouseholderQr().solve(-g);
    if (!step.allFinite()) break;

    double t = 1.0;
    std::size_t halvings = 0;
    while (!feasible(y + t * step, kFeasEps) && halvings < opts.max_halvings) {
      t *= 0.5;
      ++halvings;
    }
    if (!feasible(y + t * step, kFeasEps)) break;
    const Eigen::VectorXd delta = t * step;
    y += delta;

    SimplexPoint p = SimplexPoint::normalized(full_from_reduced(y));
    for (Eigen::Index i = 0; i < m; ++i) y(i) = p[static_cast<std::size_t>(i)];
    const double res = fixed_point_residual(V, p);
    if (res < best.residual) best = FixedPoint{std::move(p), res};
    if (delta.lpNorm<1>() <= 1e-16) break;
  }
  return best;
}

}  // namespace

FixedPointSet find_fixed_points(const QsoOperator& V, const FixedPointOptions& opts,
                                const std::vector<SimplexPoint>& extra_seeds) {
  const std::size_t n = V.n();
  std::vector<SimplexPoint> seeds;
  for (std::size_t i = 0; i < n; ++i) seeds.push_back(SimplexPoint::vertex(n, i));
  seeds.push_back(SimplexPoint::barycenter(n));
  for (auto& g : grid_simplex(n, opts.grid_resolution)) seeds.push_back(std::move(g));
  for (const auto& s : extra_seeds) {
    if (s.dim() != n) throw OperatorError("extra seed has wrong dimension");
    seeds.push_back(s);
  }

  TrajectoryOptions topts;
  topts.tol = opts.trajectory_tol;
  topts.max_iter = opts.trajectory_max_iter;

  FixedPointSet out;
  out.dedup_radius = opts.dedup_radius;
  auto consider = [&](FixedPoint fp) {
    if (!(fp.residual <= opts.tol)) return;
    for (auto& existing : out.points) {
      if (l1_distance(existing.point, fp.point) <= opts.dedup_radius) {
        if (fp.residual < existing.residual) existing = std::move(fp);
        return;
      }
    }
    out.points.push_back(std::move(fp));
  };

  for (const auto& seed : seeds) {
    const TrajectoryResult tr = trajectory(V, seed, topts);
    consider(newton_polish(V, tr.limit, opts));
    consider(newton_polish(V, seed, opts));
  }

  std::sort(out.points.begin(), out.points.end(),
            [](const FixedPoint& a, const FixedPoint& b) { return a.point.vec() > b.point.vec(); });
  return out;
}

}  // namespace qso
