#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qso/simplex.hpp"

namespace qso {

class OperatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One heredity coefficient P_{ij,k}, indices 0-based.
struct Coefficient {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  double p = 0.0;
};

/// Dense cubic array of heredity coefficients P_{ij,k} (0-based indices).
/// Holds raw values; validity is established by make_operator.
class HeredityTensor {
 public:
  explicit HeredityTensor(std::size_t n);

  /// Builds a tensor from sparse entries. An entry (i,j,k) whose mirror
  /// (j,i,k) is not listed is mirrored; listing both keeps both values so
  /// that make_operator can report asymmetry.
  static HeredityTensor from_entries(std::size_t n, const std::vector<Coefficient>& entries);

  std::size_t n() const { return n_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const { return p_[index(i, j, k)]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return p_[index(i, j, k)]; }

  /// Non-zero entries with i <= j, in (i,j,k) order.
  std::vector<Coefficient> canonical_entries() const;

  friend bool operator==(const HeredityTensor&, const HeredityTensor&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n_ + j) * n_ + k; }
  std::size_t n_;
  std::vector<double> p_;
};

/// A validated quadratic stochastic operator V(x)_k = sum_{i,j} P_{ij,k} x_i x_j.
class QsoOperator {
 public:
  const HeredityTensor& tensor() const { return tensor_; }
  std::size_t n() const { return tensor_.n(); }
  double p(std::size_t i, std::size_t j, std::size_t k) const { return tensor_(i, j, k); }

 private:
  friend QsoOperator make_operator(HeredityTensor, bool, double);
  explicit QsoOperator(HeredityTensor t) : tensor_(std::move(t)) {}
  HeredityTensor tensor_;
};

/// Validates non-negativity, symmetry in (i,j) and unit row sums over k,
/// each within `eps_coef`. With `symmetrize`, P_{ij,k} and P_{ji,k} are first
/// replaced by their mean.
QsoOperator make_operator(HeredityTensor tensor, bool symmetrize = false, double eps_coef = 1e-12);

SimplexPoint evaluate(const QsoOperator& V, const SimplexPoint& x);

/// Raw quadratic form without renormalization; used by the Jacobian and the
/// Newton polish where the argument may sit slightly off the simplex.
std::vector<double> evaluate_raw(const QsoOperator& V, std::span<const double> x);

/// Reduced evaluation for operators satisfying the structural conditions
/// P_{ij,k} = 0 for i,j > k (k < n) and P_{nn,n} = 1. Throws OperatorError
/// if those conditions fail.
SimplexPoint evaluate_canonical(const QsoOperator& V, const SimplexPoint& x, double eps_coef = 1e-12);

/// V^(m)(x); m = 0 returns x.
SimplexPoint iterate(const QsoOperator& V, const SimplexPoint& x, std::size_t m);

struct TrajectoryResult {
  SimplexPoint limit;
  std::size_t iterations_used = 0;
  double final_step_l1 = 0.0;
  bool converged = false;
  std::vector<SimplexPoint> path;  // x^(0), x^(1), ... when requested
};

struct TrajectoryOptions {
  double tol = 1e-12;
  std::size_t max_iter = 10000;
  bool record_path = false;
};

/// Iterates until two consecutive points are within `tol` in l1, or max_iter.
TrajectoryResult trajectory(const QsoOperator& V, const SimplexPoint& x, const TrajectoryOptions& opts = {});

/// ||V(x) - x||_1
double fixed_point_residual(const QsoOperator& V, const SimplexPoint& x);

/// Jacobian of the map (x_1..x_{n-1}) -> (V(x)_1..V(x)_{n-1}) with
/// x_n = 1 - (x_1 + ... + x_{n-1}) substituted.
Eigen::MatrixXd reduced_jacobian(const QsoOperator& V, std::span<const double> x);
inline Eigen::MatrixXd reduced_jacobian(const QsoOperator& V, const SimplexPoint& x) {
  return reduced_jacobian(V, x.coords());
}

/// {2 P_{kn,k}}_{k=1..n-1}: the spectrum of the reduced Jacobian at (0,...,0,1)
/// for operators with P_{in,k} = 0 whenever i > k.
std::vector<double> vertex_eigenvalues(const QsoOperator& V);

struct FixedPoint {
  SimplexPoint point;
  double residual = 0.0;
};

struct FixedPointSet {
  std::vector<FixedPoint> points;
  double dedup_radius = 1e-6;
};

struct FixedPointOptions {
  double tol = 1e-9;
  double dedup_radius = 1e-6;
  std::size_t grid_resolution = 6;
  std::size_t trajectory_max_iter = 2000;
  double trajectory_tol = 1e-12;
  std::size_t newton_max_iter = 200;
  std::size_t max_halvings = 40;
};

/// Multistart fixed-point search: every vertex, the barycenter, the lattice
/// grid_simplex(n, grid_resolution) and `extra_seeds` are each iterated and
/// polished by damped Newton in the reduced chart; raw seeds are also polished
/// directly so that non-attracting fixed points are reachable. Points within
/// dedup_radius (l1) are merged; the result is sorted lexicographically
/// descending by coordinates.
FixedPointSet find_fixed_points(const QsoOperator& V, const FixedPointOptions& opts = {},
                                const std::vector<SimplexPoint>& extra_seeds = {});

}  // namespace qso
