#include "qso/classify.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace qso {

std::string to_string(Check c) {
  switch (c) {
    case Check::pass: return "pass";
    case Check::fail: return "fail";
    case Check::boundary: return "boundary";
  }
  return "unknown";
}

Check strictly_below(double value, double bound, double eps) {
  if (std::abs(value - bound) <= eps) return Check::boundary;
  return value < bound ? Check::pass : Check::fail;
}

NecessaryConditions check_necessary_bbistochastic(const QsoOperator& V, double eps) {
  const std::size_t n = V.n();
  NecessaryConditions r;

  double cumulative = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cumulative += V.p(i, j, k);
    const double bound = static_cast<double>((k + 1) * n);
    if (r.cumulative_mass.passed && cumulative > bound + eps) {
      r.cumulative_mass = {false, std::vector<std::size_t>{k + 1}, cumulative};
    }
  }

  for (std::size_t k = 0; k + 1 < n && r.upper_zero.passed; ++k)
    for (std::size_t i = k + 1; i < n && r.upper_zero.passed; ++i)
      for (std::size_t j = k + 1; j < n && r.upper_zero.passed; ++j)
        if (V.p(i, j, k) > eps) r.upper_zero = {false, std::vector<std::size_t>{i + 1, j + 1, k + 1}, V.p(i, j, k)};

  const double pnnn = V.p(n - 1, n - 1, n - 1);
  if (std::abs(pnnn - 1.0) > eps) r.last_absorbing = {false, std::vector<std::size_t>{n, n, n}, pnnn};

  for (std::size_t l = 0; l + 1 < n && r.half_bound.passed; ++l)
    for (std::size_t j = l + 1; j < n && r.half_bound.passed; ++j)
      if (V.p(l, j, l) > 0.5 + eps) r.half_bound = {false, std::vector<std::size_t>{l + 1, j + 1, l + 1}, V.p(l, j, l)};

  return r;
}

std::size_t default_grid_resolution(std::size_t n) {
  if (n <= 3) return 40;
  if (n == 4) return 12;
  return 6;
}

BVerdict verify_bbistochastic_numeric(const QsoOperator& V, std::size_t resolution, std::size_t samples,
                                      std::uint64_t seed, double eps_order) {
  BVerdict v;
  v.resolution = resolution;
  v.sample_count = samples;
  v.seed = seed;
  auto probe = [&](const SimplexPoint& x) {
    const OrderVerdict o = b_leq(evaluate(V, x), x, eps_order);
    if (!o.holds) v.violation = BViolation{x, *o.first_violating_index, o.gap};
    return !o.holds;
  };
  for (const auto& x : grid_simplex(V.n(), resolution)) {
    if (probe(x)) return v;
  }
  for (const auto& x : sample_simplex(V.n(), samples, seed)) {
    if (probe(x)) return v;
  }
  return v;
}

UniquenessReport check_uniqueness_conditions(const QsoOperator& V, double eps) {
  const std::size_t n = V.n();
  UniquenessReport r;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double diag = V.p(k, k, k);
    if (const Check c = strictly_below(diag, 1.0, eps); c != Check::pass) {
      r.violations.push_back({k + 1, k + 1, diag, c});
    }
    for (std::size_t j = k + 1; j < n; ++j) {
      const double off = V.p(k, j, k);
      if (const Check c = strictly_below(off, 0.5, eps); c != Check::pass) {
        r.violations.push_back({k + 1, j + 1, off, c});
      }
    }
  }
  r.met = r.violations.empty();
  return r;
}

QsoOperator check_convex_combination(const QsoOperator& V1, const QsoOperator& V2, double lambda) {
  if (V1.n() != V2.n()) throw OperatorError("convex combination of operators with different n");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw OperatorError(fmt::format("convex weight {} outside [0, 1]", lambda));
  }
  if (!check_uniqueness_conditions(V1).met || !check_uniqueness_conditions(V2).met) {
    throw OperatorError("convex combination requires both operators to meet the uniqueness conditions");
  }
  const std::size_t n = V1.n();
  HeredityTensor t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        t(i, j, k) = lambda * V1.p(i, j, k) + (1.0 - lambda) * V2.p(i, j, k);
  QsoOperator out = make_operator(std::move(t));
  if (!check_uniqueness_conditions(out).met) {
    throw OperatorError("convex combination left the uniqueness class");
  }
  return out;
}

std::string to_string(VertexStability s) {
  switch (s) {
    case VertexStability::attracting: return "attracting";
    case VertexStability::non_hyperbolic: return "non_hyperbolic";
    case VertexStability::mixed: return "mixed";
    case VertexStability::not_repelling_only: return "not_repelling_only";
  }
  return "unknown";
}

VertexStabilityReport classify_vertex_stability(const QsoOperator& V, double eps) {
  VertexStabilityReport r;
  r.eigenvalues = vertex_eigenvalues(V);
  const auto& ev = r.eigenvalues;
  if (std::any_of(ev.begin(), ev.end(), [eps](double l) { return std::abs(std::abs(l) - 1.0) <= eps; })) {
    r.verdict = VertexStability::non_hyperbolic;
  } else if (std::all_of(ev.begin(), ev.end(), [](double l) { return std::abs(l) < 1.0; })) {
    r.verdict = VertexStability::attracting;
  } else if (std::all_of(ev.begin(), ev.end(), [](double l) { return std::abs(l) > 1.0; })) {
    r.verdict = VertexStability::not_repelling_only;
  } else {
    r.verdict = VertexStability::mixed;
  }
  return r;
}

ContractionReport strict_contraction_general(const QsoOperator& V, double eps) {
  const std::size_t n = V.n();
  ContractionReport r;
  r.modulus = -1.0;
  for (std::size_t i1 = 0; i1 < n; ++i1)
    for (std::size_t i2 = 0; i2 < n; ++i2)
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::abs(V.p(i1, k, j) - V.p(i2, k, j));
        if (s > r.modulus) {
          r.modulus = s;
          r.argmax_triple = {i1 + 1, i2 + 1, k + 1};
        }
      }
  r.strict = strictly_below(r.modulus, 1.0, eps);
  return r;
}

Contraction1d strict_contraction_1d(const QsoOperator& V, double eps) {
  if (V.n() != 2) throw OperatorError(fmt::format("one-dimensional criterion needs n = 2, got {}", V.n()));
  if (V.p(1, 1, 0) > eps || std::abs(V.p(1, 1, 1) - 1.0) > eps) {
    throw OperatorError("one-dimensional criterion needs P(2,2,1) = 0 and P(2,2,2) = 1");
  }
  Contraction1d r;
  const double p111 = V.p(0, 0, 0);
  const double p121 = V.p(0, 1, 0);
  r.max_quantity = std::max(p121, std::abs(p111 - p121));
  r.strict = strictly_below(r.max_quantity, 0.5, eps);
  return r;
}

Contraction2d strict_contraction_2d(const QsoOperator& V, double eps) {
  if (V.n() != 3) throw OperatorError(fmt::format("two-dimensional criterion needs n = 3, got {}", V.n()));
  // A = P_{11,.}, B = P_{12,.}, C = P_{13,.}, D = P_{22,.}, E = P_{23,.}, F = P_{33,.}
  const double A1 = V.p(0, 0, 0), A2 = V.p(0, 0, 1);
  const double B1 = V.p(0, 1, 0), B2 = V.p(0, 1, 1);
  const double C1 = V.p(0, 2, 0), C2 = V.p(0, 2, 1);
  const double D1 = V.p(1, 1, 0), D2 = V.p(1, 1, 1);
  const double E1 = V.p(1, 2, 0), E2 = V.p(1, 2, 1);
  const double F1 = V.p(2, 2, 0), F2 = V.p(2, 2, 1);
  if (D1 > eps || E1 > eps || F1 > eps || F2 > eps) {
    throw OperatorError("two-dimensional criterion needs P(2,2,1) = P(2,3,1) = P(3,3,1) = P(3,3,2) = 0");
  }
  Contraction2d r;
  auto& q = r.quantities;
  q[0] = std::abs(A1 - B1) + std::abs(A2 - B2) + std::abs(A1 + A2 - B1 - B2);
  q[1] = B1 + std::abs(B2 - D2) + std::abs(B1 + B2 - D2);
  q[2] = C1 + std::abs(C2 - E2) + std::abs(C1 + C2 - E2);
  q[3] = std::abs(A1 - C1) + std::abs(A2 - C2) + std::abs(A1 + A2 - C1 - C2);
  q[4] = B1 + std::abs(B2 - E2) + std::abs(B1 + B2 - E2);
  q[5] = 2.0 * C1 + 2.0 * C2;
  q[6] = std::abs(B1 - C1) + std::abs(B2 - C2) + std::abs(B1 + B2 - C1 - C2);
  q[7] = 2.0 * std::abs(D2 - E2);
  q[8] = 2.0 * E2;
  const auto it = std::max_element(q.begin(), q.end());
  r.max_quantity = *it;
  r.which = static_cast<char>('a' + (it - q.begin()));
  r.strict = strictly_below(r.max_quantity, 1.0, eps);
  return r;
}

bool linear_form_nonpositive(std::span<const double> A, double C, bool strict) {
  auto ok = [strict](double v) { return strict ? v < 0.0 : v <= 0.0; };
  if (!ok(C)) return false;
  return std::all_of(A.begin(), A.end(), [&](double a) { return ok(a + C); });
}

ClassificationReport classify(const QsoOperator& V, const ClassifyOptions& opts) {
  ClassificationReport r;
  r.necessary = check_necessary_bbistochastic(V, opts.eps_coef);
  r.numeric_b = verify_bbistochastic_numeric(V, opts.resolution.value_or(default_grid_resolution(V.n())),
                                             opts.samples, opts.seed, opts.eps_order);
  r.uniqueness = check_uniqueness_conditions(V, opts.eps_coef);
  r.vertex = classify_vertex_stability(V);
  r.contraction = strict_contraction_general(V);
  if (r.necessary.structural()) {
    if (V.n() == 2) r.contraction_1d = strict_contraction_1d(V, opts.eps_coef);
    if (V.n() == 3) r.contraction_2d = strict_contraction_2d(V, opts.eps_coef);
  }
  return r;
}

}  // namespace qso
