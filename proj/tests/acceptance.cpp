// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "qso/abscont.hpp"
#include "qso/classify.hpp"
#include "qso/markov.hpp"
#include "qso/operator.hpp"
#include "qso/spec_file.hpp"
#include "support/random_tensors.hpp"

using namespace qso;
using namespace qso::testing;

namespace {

const std::filesystem::path kFixtures = QSO_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(std::string why) {
    if (pass) detail = std::move(why);
    pass = false;
  }
};

QsoOperator fixture(const char* name) { return build_operator(load_spec(kFixtures / name)); }

bool is_point(const SimplexPoint& x, const std::vector<double>& y, double tol) {
  return l1_distance(x.coords(), y) <= tol;
}

// A verified b-bistochastic operator: generated with the band structure, then
// re-checked by the necessary conditions and the numeric search.
QsoOperator verified_bbistochastic(Rng& rng, std::size_t n, double p_absorb, std::uint64_t seed) {
  for (;;) {
    auto V = random_bbistochastic(rng, n, p_absorb);
    if (check_necessary_bbistochastic(V).all_passed() &&
        !verify_bbistochastic_numeric(V, default_grid_resolution(n), 2000, seed).violated())
      return V;
  }
}

Outcome criterion1() {
  Outcome o;
  const auto V = fixture("attracting_not_unique.json");
  const auto fp = find_fixed_points(V);
  const std::vector<std::vector<double>> want{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  if (fp.points.size() != 3) o.fail(fmt::format("{} fixed points instead of 3", fp.points.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(3, fp.points.size()); ++i) {
    if (!is_point(fp.points[i].point, want[i], 1e-9)) o.fail(fmt::format("fixed point {} misplaced", i + 1));
    if (fp.points[i].residual > 1e-9) o.fail(fmt::format("residual {:.3g}", fp.points[i].residual));
  }
  ClassifyOptions opts;
  opts.seed = 1;
  const auto r = classify(V, opts);
  if (r.vertex.verdict != VertexStability::attracting) o.fail("vertex not attracting");
  if (r.uniqueness.met) o.fail("uniqueness conditions unexpectedly met");
  if (r.numeric_b.violated()) o.fail("numeric b-order violation");
  if (o.pass)
    o.detail = fmt::format("3 vertex fixed points, eigenvalues {:.3g} {:.3g}, uniqueness conditions fail",
                           r.vertex.eigenvalues[0], r.vertex.eigenvalues[1]);
  return o;
}

Outcome criterion2() {
  Outcome o;
  Rng rng(2002);
  std::size_t tested = 0;
  while (tested < 500) {
    const std::size_t n = 2 + tested % 3;
    const auto V = verified_bbistochastic(rng, n, 0.0, tested);
    if (!check_uniqueness_conditions(V).met) continue;
    ++tested;
    const auto fp = find_fixed_points(V);
    if (fp.points.size() != 1 || !is_point(fp.points[0].point, SimplexPoint::vertex_last(n).vec(), 1e-9))
      o.fail(fmt::format("operator #{} (n={}) has {} fixed points", tested, n, fp.points.size()));
  }
  if (o.pass) o.detail = fmt::format("{} operators, each with the vertex as its only fixed point", tested);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto V = fixture("sufficiency_only.json");
  if (check_uniqueness_conditions(V).met) o.fail("uniqueness conditions met");
  const auto fp = find_fixed_points(V);
  if (fp.points.size() != 1 || !is_point(fp.points[0].point, {0, 0, 1}, 1e-9))
    o.fail(fmt::format("{} fixed points", fp.points.size()));
  if (o.pass) o.detail = "conditions fail, single fixed point (0,0,1)";
  return o;
}

Outcome criterion4() {
  Outcome o;
  Rng rng(4004);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto V = t % 2 ? random_structured3(rng) : random_bbistochastic(rng, 3);
    const auto g = strict_contraction_general(V);
    const auto d = strict_contraction_2d(V);
    worst = std::max(worst, std::abs(g.modulus - d.max_quantity));
    if (d.is_strict() != g.is_strict()) o.fail(fmt::format("2D verdict differs on tensor #{}", t));
  }
  if (worst > 1e-12) o.fail(fmt::format("2D max differs from modulus by {:.3g}", worst));
  for (int t = 0; t < 1000; ++t) {
    const auto V = random_structured2(rng);
    if (strict_contraction_1d(V).is_strict() != strict_contraction_general(V).is_strict())
      o.fail(fmt::format("1D verdict differs on tensor #{}", t));
  }
  for (const char* name : {"va_two_thirds.json", "unique_not_contraction.json"}) {
    const auto V = fixture(name);
    if (strict_contraction_general(V).is_strict()) o.fail(fmt::format("{} is a strict contraction", name));
    if (find_fixed_points(V).points.size() != 1) o.fail(fmt::format("{} has several fixed points", name));
  }
  if (o.pass) o.detail = fmt::format("max |2D - general| = {:.3g}; both fixtures unique but not strict", worst);
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(5005);
  std::size_t pairs = 0, operators = 0;
  double worst_ratio = 0.0;
  while (pairs < 10000) {
    const std::size_t n = 2 + operators % 4;
    const auto V = random_near_constant(rng, n, uniform(rng, 0.05, 0.6));
    const double alpha = strict_contraction_general(V).modulus;
    if (alpha >= 1.0) continue;
    ++operators;
    const auto xs = sample_simplex(n, 100, 2 * operators), ys = sample_simplex(n, 100, 2 * operators + 1);
    for (std::size_t s = 0; s < xs.size(); ++s, ++pairs) {
      const double dx = l1_distance(xs[s], ys[s]);
      const double dv = l1_distance(evaluate(V, xs[s]), evaluate(V, ys[s]));
      if (dv > (alpha + 1e-9) * dx) o.fail(fmt::format("operator #{} expands a pair", operators));
      if (alpha > 0) worst_ratio = std::max(worst_ratio, dv / (alpha * dx));
    }
  }
  if (o.pass)
    o.detail = fmt::format("{} pairs over {} operators; largest ||Vx-Vy|| / (alpha ||x-y||) = {:.4f}", pairs,
                           operators, worst_ratio);
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng(6006);
  double rows = 0, ck = 0, kc = 0;
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + t % 3;
    const auto V = verified_bbistochastic(rng, n, 0.2, t);
    TransitionFamily f(V, sample_simplex(n, 1, 600 + t)[0]);
    for (std::size_t k = 0; k < 15; ++k)
      for (std::size_t m = k + 1; m <= 15; ++m) {
        const Eigen::MatrixXd C = compose_transitions(f, k, m);
        rows = std::max(rows, (C.rowwise().sum().array() - 1.0).abs().maxCoeff());
        for (std::size_t j = k + 1; j < m; ++j)
          ck = std::max(ck, (C - compose_transitions(f, k, j) * compose_transitions(f, j, m)).cwiseAbs().maxCoeff());
      }
    for (int r = 0; r < 50; ++r) {
      const std::size_t start = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
      const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 15 - start)(rng);
      std::vector<std::size_t> states(len);
      for (auto& s : states) s = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      double parts = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        auto ext = states;
        ext.push_back(i);
        parts += cylinder_measure(f, make_cylinder(start, ext, n));
      }
      kc = std::max(kc, std::abs(cylinder_measure(f, make_cylinder(start, states, n)) - parts));
    }
  }
  if (rows > 1e-13) o.fail(fmt::format("row sums off by {:.3g}", rows));
  if (ck > 1e-13) o.fail(fmt::format("Chapman-Kolmogorov off by {:.3g}", ck));
  if (kc > 1e-13) o.fail(fmt::format("consistency off by {:.3g}", kc));
  if (o.pass) o.detail = fmt::format("max errors: rows {:.2g}, CK {:.2g}, consistency {:.2g}", rows, ck, kc);
  return o;
}

Outcome criterion7() {
  Outcome o;
  double lin = 0.0;
  for (int ai = 1; ai <= 9; ++ai)
    for (int xi = 1; xi <= 9; ++xi) {
      const auto p = make_va_params(ai / 10.0, xi / 10.0);
      TransitionFamily f(va_operator(p.a), p.x);
      for (std::size_t k = 0; k <= 20; ++k) {
        const auto c = va_transition_closed_form(p, k);
        const Eigen::MatrixXd H = f.transition_matrix(k);
        const Eigen::MatrixXd L = f.log_transition_matrix(k);
        if (k <= 10) lin = std::max(lin, (c.H - H).cwiseAbs().maxCoeff());
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            if (!prob_close(c.logH(i, j), L(i, j)))
              o.fail(fmt::format("log mismatch at a={}, x1={}, k={}", p.a, p.x[0], k));
      }
    }
  if (lin > 1e-12) o.fail(fmt::format("linear mismatch {:.3g}", lin));
  if (o.pass) o.detail = fmt::format("81 parameter pairs, max linear error {:.2g} (k <= 10), log agreement to k = 20", lin);
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto A = make_cylinder(0, {0}, 2);
  auto check = [&](double a, double x1, const std::string& tag) {
    TransitionFamily f(va_operator(a), make_point({x1, 1 - x1}));
    const auto s = mixing_series(f, A, A, 30);
    for (const auto& t : s.terms) {
      if (t.tau > t.bound + 1e-12) o.fail(fmt::format("{}: tau_{} above its bound", tag, t.m));
      if (t.m >= 10 && !(t.tau < 1e-8)) o.fail(fmt::format("{}: tau_{} = {:.3g}", tag, t.m, t.tau));
    }
  };
  check(0.9, 0.9, "a=0.9, x1=0.9");
  Rng rng(8008);
  for (int t = 0; t < 20; ++t) {
    const double a = uniform(rng, 0.05, 0.95), x1 = uniform(rng, 0.05, 0.95);
    check(a, x1, fmt::format("pair {} (a={:.3f}, x1={:.3f})", t, a, x1));
  }
  if (o.pass) o.detail = "tau_m < 1e-8 for m >= 10 and tau_m <= bound_m, reference plus 20 random pairs";
  return o;
}

// Exponent of a from the cylinder product, and as printed; equal iff no discrepancy is expected.
std::pair<double, double> exponents(const CylinderClass& c) {
  const double half = std::ldexp(1.0, static_cast<int>(c.l) - 1);
  switch (c.kind) {
    case CylinderClass::Kind::all_ones: return {std::ldexp(1.0, static_cast<int>(c.m)) - 1, std::ldexp(1.0, static_cast<int>(c.m)) - half};
    case CylinderClass::Kind::all_twos: return {std::ldexp(1.0, static_cast<int>(c.l)) - 1, half};
    case CylinderClass::Kind::ones_then_twos: return {std::ldexp(1.0, static_cast<int>(c.k)) - 1, std::ldexp(1.0, static_cast<int>(c.k)) - half};
    case CylinderClass::Kind::two_one: return {0, 0};
  }
  return {0, 0};
}

Outcome criterion9() {
  Outcome o;
  Rng rng(9009);
  double worst_tail = 0.0;
  for (int t = 0; t < 50; ++t) {
    const double a = uniform(rng, 0.05, 0.95);
    const auto x = make_va_params(a, uniform(rng, 0.05, 0.95));
    const auto y = make_va_params(a, uniform(rng, 0.05, 0.95));
    for (const auto& r : {rn_series(x, y, 12), rn_series(y, x, 12)}) {
      if (r.classification != RNClass::equivalent_evidence)
        o.fail(fmt::format("sample {} (a={:.3f}, x1={:.3f}, y1={:.3f}) is {}", t, a, r.num.x[0], r.den.x[0],
                           to_string(r.classification)));
      if (!(r.tail_term < 1e-12)) o.fail(fmt::format("sample {} tail {:.3g}", t, r.tail_term));
      worst_tail = std::max(worst_tail, r.tail_term);
    }
    const auto diag = rn_series(x, x, 12);
    for (const auto& term : diag.terms)
      if (term.K_term != 0.0 || term.K_hat_term != 0.0) o.fail(fmt::format("diagonal sample {} has a nonzero term", t));
    if (diag.classification != RNClass::equivalent_evidence) o.fail("diagonal not equivalent");

    std::size_t logged = 0;
    for (std::size_t l = 0; l <= 4; ++l) {
      std::vector<CylinderClass> cs{CylinderClass::two_one(l)};
      for (std::size_t m = l; m <= l + 3; ++m) {
        cs.push_back(CylinderClass::all_ones(l, m));
        cs.push_back(CylinderClass::all_twos(l, m));
        for (std::size_t k = l; k < m; ++k) cs.push_back(CylinderClass::ones_then_twos(l, m, k));
      }
      for (const auto& c : cs) {
        const auto [ec, ep] = exponents(c);
        const auto v = va_cylinder_closed_form(x, c);
        if (v.discrepancies.empty() != (ec == ep)) o.fail(fmt::format("discrepancy log wrong for {}", c.label()));
        logged += v.discrepancies.size();
      }
    }
    if (logged == 0) o.fail("empty discrepancy log");
  }
  if (o.pass)
    o.detail = fmt::format("50 samples equivalent both ways (largest tail {:.2g}); diagonal zero; discrepancy log exact",
                           worst_tail);
  return o;
}

Outcome criterion10() {
  Outcome o;
  Rng rng(10010);
  std::size_t worst_iters = 0;
  double worst_residual = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 4;
    const auto V = verified_bbistochastic(rng, n, 0.2, t);
    for (const auto& x0 : sample_simplex(n, 10, 1000 + t)) {
      const auto tr = trajectory(V, x0, {1e-12, 10000, true});
      if (!tr.converged) {
        o.fail(fmt::format("operator #{} (n={}) not Cauchy after 1e4 steps (last step {:.3g}, vertex eigenvalues {})",
                           t, n, tr.final_step_l1, fmt::join(vertex_eigenvalues(V), ", ")));
        continue;
      }
      worst_iters = std::max(worst_iters, tr.iterations_used);
      const double res = fixed_point_residual(V, tr.limit);
      worst_residual = std::max(worst_residual, res);
      if (res > 1e-10) o.fail(fmt::format("operator #{} limit residual {:.3g}", t, res));
      for (std::size_t s = 1; s < tr.path.size(); ++s)
        for (std::size_t k = 1; k < n; ++k)
          if (partial_sum(tr.path[s], k) > partial_sum(tr.path[s - 1], k) + 1e-12)
            o.fail(fmt::format("operator #{}: U_{} increased at step {}", t, k, s));
    }
  }
  if (o.pass)
    o.detail = fmt::format("2000 trajectories; slowest took {} steps; max limit residual {:.2g}", worst_iters,
                           worst_residual);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(fmt::format("exception: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("criterion {:>2}: {} ({:.1f}s) {}\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
