#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "qso/simplex.hpp"

using namespace qso;
using doctest::Approx;

TEST_CASE("make_point validates and normalizes") {
  const auto x = make_point({0.2, 0.3, 0.5});
  CHECK(x.dim() == 3);
  CHECK(x[0] + x[1] + x[2] == Approx(1.0).epsilon(1e-15));
  CHECK(make_point({0.0, 0.0, 1.0}) == SimplexPoint::vertex_last(3));
  CHECK_THROWS_AS(make_point({0.5, 0.6}), SimplexError);
  CHECK_THROWS_AS(make_point({1.0}), SimplexError);
  CHECK_THROWS_AS(make_point({1.1, -0.1}), SimplexError);

  // tiny negatives are clamped
  const auto y = make_point({-1e-13, 1.0 + 1e-13});
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 1.0);
}

TEST_CASE("partial_sum") {
  const auto x = make_point({0.2, 0.3, 0.5});
  CHECK(partial_sum(x, 1) == Approx(0.2));
  CHECK(partial_sum(x, 2) == Approx(0.5));
  CHECK(partial_sum(SimplexPoint::vertex_last(3), 1) == 0.0);
  CHECK(partial_sum(SimplexPoint::vertex_last(3), 2) == 0.0);
  CHECK_THROWS(partial_sum(x, 0));
  CHECK_THROWS(partial_sum(x, 3));
}

TEST_CASE("b_leq") {
  const auto y = make_point({0.2, 0.3, 0.5});
  CHECK(b_leq(SimplexPoint::vertex_last(3), y).holds);
  const auto v = b_leq(make_point({0.5, 0.5, 0.0}), y);
  CHECK_FALSE(v.holds);
  REQUIRE(v.first_violating_index);
  CHECK(*v.first_violating_index == 1);
  CHECK(v.gap == Approx(-0.3));
  CHECK(b_leq(y, y).holds);
  CHECK_FALSE(b_leq(y, y).first_violating_index);
  CHECK_THROWS(b_leq(y, make_point({0.5, 0.5})));
}

TEST_CASE("majorization and rearrangement") {
  CHECK(majorizes(make_point({0.5, 0.5}), make_point({1.0, 0.0})).holds);
  CHECK_FALSE(majorizes(make_point({1.0, 0.0}), make_point({0.5, 0.5})).holds);
  const auto x = make_point({0.2, 0.5, 0.3});
  CHECK(majorizes(x, x).holds);
  CHECK(rearrange_desc(x).vec() == std::vector<double>{0.5, 0.3, 0.2});
  CHECK(rearrange_desc(make_point({0.5, 0.5})).vec() == std::vector<double>{0.5, 0.5});
  CHECK(rearrange_desc(SimplexPoint::vertex_last(3)) == SimplexPoint::vertex(3, 0));
}

TEST_CASE("distance, support, interior") {
  CHECK(l1_distance(make_point({1, 0}), make_point({0, 1})) == 2.0);
  CHECK(support(make_point({0.3, 0.0, 0.7})) == std::vector<std::size_t>{1, 3});
  CHECK_FALSE(in_relative_interior(SimplexPoint::vertex_last(3)));
  CHECK(in_relative_interior(SimplexPoint::barycenter(4)));
}

TEST_CASE("grids and samples") {
  const auto g = grid_simplex(2, 2);
  REQUIRE(g.size() == 3);
  CHECK(g[0].vec() == std::vector<double>{1.0, 0.0});
  CHECK(g[1].vec() == std::vector<double>{0.5, 0.5});
  CHECK(g[2].vec() == std::vector<double>{0.0, 1.0});
  const auto v = grid_simplex(3, 1);
  CHECK(v.size() == 3);
  CHECK(sample_simplex(3, 5, 7) == sample_simplex(3, 5, 7));
  CHECK_FALSE(sample_simplex(3, 5, 7) == sample_simplex(3, 5, 8));
  CHECK(binomial(5, 2) == 10);
}

TEST_CASE("property: grid size and validity") {
  for (std::size_t n = 2; n <= 5; ++n)
    for (std::size_t r = 1; r <= 8; ++r) {
      const auto g = grid_simplex(n, r);
      CHECK(g.size() == binomial(r + n - 1, n - 1));
      for (const auto& x : g) {
        double s = 0.0;
        for (double c : x.coords()) {
          CHECK(c >= 0.0);
          s += c;
        }
        CHECK(s == Approx(1.0).epsilon(1e-12));
      }
    }
}

TEST_CASE("property: partial order axioms on sampled triples") {
  constexpr double eps = 1e-12;
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto xs = sample_simplex(n, 60, 100 + n);
    // Grid points hit the antisymmetric and transitive cases far more often than samples.
    auto pool = xs;
    for (const auto& g : grid_simplex(n, 3)) pool.push_back(g);
    for (const auto& x : pool) {
      CHECK(b_leq(x, x).holds);
      CHECK(b_leq(SimplexPoint::vertex_last(n), x).holds);
    }
    for (const auto& x : pool)
      for (const auto& y : pool) {
        const bool xy = b_leq(x, y, eps).holds;
        if (xy && b_leq(y, x, eps).holds) CHECK(l1_distance(x, y) <= 2 * eps * n);
        if (!xy) continue;
        for (const auto& z : pool) {
          if (b_leq(y, z, eps).holds) CHECK(b_leq(x, z, 2 * eps).holds);
        }
      }
  }
}

TEST_CASE("property: rearrangement is a sorted permutation") {
  for (const auto& x : sample_simplex(6, 200, 3)) {
    const auto r = rearrange_desc(x);
    CHECK(std::is_sorted(r.vec().begin(), r.vec().end(), std::greater<>()));
    auto a = x.vec();
    auto b = r.vec();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}
