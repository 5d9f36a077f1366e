#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qso {

/// Tolerances shared by the simplex and order routines.
struct Tolerances {
  double simplex = 1e-12;  // membership / normalization
  double order = 1e-12;    // prefix-sum comparisons
};

class SimplexError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A probability vector on the (n-1)-simplex. Always valid once constructed:
/// coordinates are non-negative and sum to one in working precision.
class SimplexPoint {
 public:
  /// Validates against `tol`, clamps small negatives to zero and renormalizes.
  /// Throws SimplexError naming the offending index or the sum.
  static SimplexPoint make(std::vector<double> coords, const Tolerances& tol = {});

  /// For values produced by the library itself (operator outputs, grids):
  /// clamps and renormalizes without tolerance checks.
  static SimplexPoint normalized(std::vector<double> coords);

  /// The vertex (0,...,0,1).
  static SimplexPoint vertex_last(std::size_t n);
  static SimplexPoint vertex(std::size_t n, std::size_t index);
  static SimplexPoint barycenter(std::size_t n);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vec() const { return coords_; }

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;
  friend SimplexPoint rearrange_desc(const SimplexPoint& x);

 private:
  explicit SimplexPoint(std::vector<double> c) : coords_(std::move(c)) {}
  std::vector<double> coords_;
};

inline SimplexPoint make_point(std::vector<double> coords, const Tolerances& tol = {}) {
  return SimplexPoint::make(std::move(coords), tol);
}

/// Result of a prefix-sum comparison. `first_violating_index` is the smallest
/// k (1-based, the length of the prefix) at which the relation breaks, and
/// `gap` is U_k(y) - U_k(x) there (negative on failure).
struct OrderVerdict {
  bool holds = true;
  std::optional<std::size_t> first_violating_index;
  double gap = 0.0;
};

/// U_k(x) = x_1 + ... + x_k for 1 <= k <= n-1.
double partial_sum(const SimplexPoint& x, std::size_t k);

/// x <=^b y: every proper prefix sum of x is at most that of y.
OrderVerdict b_leq(const SimplexPoint& x, const SimplexPoint& y, double eps_order = 1e-12);

/// Classical majorization x < y, i.e. b_leq on the non-increasing rearrangements.
OrderVerdict majorizes(const SimplexPoint& x, const SimplexPoint& y, double eps_order = 1e-12);

/// Stable non-increasing rearrangement.
SimplexPoint rearrange_desc(const SimplexPoint& x);

double l1_distance(const SimplexPoint& x, const SimplexPoint& y);
double l1_distance(std::span<const double> x, std::span<const double> y);

/// 1-based indices of the non-zero coordinates.
std::vector<std::size_t> support(const SimplexPoint& x);

bool in_relative_interior(const SimplexPoint& x, double eps_simplex = 1e-12);

/// `count` points drawn uniformly from the simplex by normalizing i.i.d.
/// unit exponentials. The generator is a seeded mt19937_64 and the uniform
/// variates are built from its raw 64-bit output, so the stream does not
/// depend on the standard library's distribution implementations.
std::vector<SimplexPoint> sample_simplex(std::size_t n, std::size_t count, std::uint64_t seed);

/// All lattice points (k_1/r, ..., k_n/r) with sum k_i = r, in lexicographic
/// order of (k_1, ..., k_n) descending.
std::vector<SimplexPoint> grid_simplex(std::size_t n, std::size_t resolution);

/// Binomial coefficient, used for grid sizes.
std::size_t binomial(std::size_t n, std::size_t k);

}  // namespace qso
