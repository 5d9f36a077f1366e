#include "qso/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace qso {

namespace {

std::vector<double> clamp_and_renormalize(std::vector<double> c) {
  for (double& v : c) {
    if (v < 0.0) v = 0.0;
  }
  const double s = std::accumulate(c.begin(), c.end(), 0.0);
  if (s > 0.0 && s != 1.0) {
    for (double& v : c) v /= s;
  }
  return c;
}

void require_same_dim(const SimplexPoint& x, const SimplexPoint& y) {
  if (x.dim() != y.dim()) {
    throw SimplexError(fmt::format("dimension mismatch: {} vs {}", x.dim(), y.dim()));
  }
}

}  // namespace

SimplexPoint SimplexPoint::make(std::vector<double> coords, const Tolerances& tol) {
  if (coords.size() < 2) {
    throw SimplexError(fmt::format("simplex point needs at least 2 coordinates, got {}", coords.size()));
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i])) {
      throw SimplexError(fmt::format("coordinate {} is not finite", i + 1));
    }
    if (coords[i] < -tol.simplex) {
      throw SimplexError(fmt::format("coordinate {} = {:.17g} is negative", i + 1, coords[i]));
    }
  }
  const double s = std::accumulate(coords.begin(), coords.end(), 0.0);
  if (std::abs(s - 1.0) > tol.simplex) {
    throw SimplexError(fmt::format("coordinates sum to {:.17g}, expected 1", s));
  }
  return SimplexPoint(clamp_and_renormalize(std::move(coords)));
}

SimplexPoint SimplexPoint::normalized(std::vector<double> coords) {
  return SimplexPoint(clamp_and_renormalize(std::move(coords)));
}

SimplexPoint SimplexPoint::vertex(std::size_t n, std::size_t index) {
  std::vector<double> c(n, 0.0);
  c.at(index) = 1.0;
  return SimplexPoint(std::move(c));
}

SimplexPoint SimplexPoint::vertex_last(std::size_t n) { return vertex(n, n - 1); }

SimplexPoint SimplexPoint::barycenter(std::size_t n) {
  return SimplexPoint(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double partial_sum(const SimplexPoint& x, std::size_t k) {
  if (k < 1 || k >= x.dim()) {
    throw SimplexError(fmt::format("prefix length {} outside 1..{}", k, x.dim() - 1));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += x[i];
  return s;
}

OrderVerdict b_leq(const SimplexPoint& x, const SimplexPoint& y, double eps_order) {
  require_same_dim(x, y);
  double ux = 0.0;
  double uy = 0.0;
  for (std::size_t k = 1; k < x.dim(); ++k) {
    ux += x[k - 1];
    uy += y[k - 1];
    if (ux > uy + eps_order) {
      return OrderVerdict{false, k, uy - ux};
    }
  }
  return OrderVerdict{};
}

SimplexPoint rearrange_desc(const SimplexPoint& x) {
  std::vector<double> c = x.vec();
  std::stable_sort(c.begin(), c.end(), std::greater<>());
  return SimplexPoint(std::move(c));  // a permutation: no renormalization
}

OrderVerdict majorizes(const SimplexPoint& x, const SimplexPoint& y, double eps_order) {
  require_same_dim(x, y);
  return b_leq(rearrange_desc(x), rearrange_desc(y), eps_order);
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw SimplexError(fmt::format("dimension mismatch: {} vs {}", x.size(), y.size()));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += std::abs(x[i] - y[i]);
  return d;
}

double l1_distance(const SimplexPoint& x, const SimplexPoint& y) {
  return l1_distance(x.coords(), y.coords());
}

std::vector<std::size_t> support(const SimplexPoint& x) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (x[i] != 0.0) s.push_back(i + 1);
  }
  return s;
}

bool in_relative_interior(const SimplexPoint& x, double eps_simplex) {
  return std::all_of(x.coords().begin(), x.coords().end(),
                     [eps_simplex](double v) { return v > eps_simplex; });
}

std::vector<SimplexPoint> sample_simplex(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n < 2) throw SimplexError("sample_simplex needs n >= 2");
  std::mt19937_64 rng(seed);
  std::vector<SimplexPoint> out;
  out.reserve(count);
  std::vector<double> e(n);
  for (std::size_t c = 0; c < count; ++c) {
    double total = 0.0;
    for (auto& v : e) {
      // u in (0, 1]: 53 random bits, shifted away from zero.
      const double u = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
      v = -std::log(u);
      total += v;
    }
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = e[i] / total;
    out.push_back(SimplexPoint::normalized(std::move(p)));
  }
  return out;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<SimplexPoint> grid_simplex(std::size_t n, std::size_t resolution) {
  if (n < 2) throw SimplexError("grid_simplex needs n >= 2");
  if (resolution < 1) throw SimplexError("grid_simplex needs resolution >= 1");
  std::vector<SimplexPoint> out;
  out.reserve(binomial(resolution + n - 1, n - 1));
  const double r = static_cast<double>(resolution);
  std::vector<std::size_t> k(n, 0);

  // Depth-first over k_1 = r..0, then k_2 = (r - k_1)..0, ...
  auto rec = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == n) {
      k[pos] = remaining;
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(k[i]) / r;
      out.push_back(SimplexPoint::normalized(std::move(p)));
      return;
    }
    for (std::size_t v = remaining + 1; v-- > 0;) {
      k[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, resolution);
  return out;
}

}  // namespace qso
