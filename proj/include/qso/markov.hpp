#pragma once

#include <cstddef>
#include <iosfwd>
#include <shared_mutex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qso/operator.hpp"
#include "qso/simplex.hpp"

namespace qso {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Nonhomogeneous chain generated by (V, x): state law x^(k) = V^k(x) and
/// one-step matrices H^[k,k+1]_{ij} = sum_l P_{il,j} x^(k)_l.
///
/// The trajectory is kept twice, in linear and in log form; the log form is
/// advanced on its own (logsumexp of log P + L_i + L_j), so doubly exponential
/// decay stays representable after the linear values have flushed to zero.
/// Memoization is append-only; readers share a lock, extension is exclusive.
class TransitionFamily {
 public:
  TransitionFamily(QsoOperator V, SimplexPoint start);
  TransitionFamily(const TransitionFamily&) = delete;
  TransitionFamily& operator=(const TransitionFamily&) = delete;

  const QsoOperator& op() const { return V_; }
  std::size_t n() const { return V_.n(); }

  SimplexPoint state(std::size_t k) const;
  std::vector<double> log_state(std::size_t k) const;

  Eigen::MatrixXd transition_matrix(std::size_t k) const;
  Eigen::MatrixXd log_transition_matrix(std::size_t k) const;

  /// Largest k for which x^(k) is cached.
  std::size_t horizon() const;

 private:
  void ensure(std::size_t k) const;

  QsoOperator V_;
  Eigen::MatrixXd logP_;  // row i*n+j, column k
  mutable std::shared_mutex mu_;
  mutable std::vector<SimplexPoint> x_;
  mutable std::vector<std::vector<double>> logx_;
};

inline Eigen::MatrixXd transition_matrix(const TransitionFamily& f, std::size_t k) { return f.transition_matrix(k); }

/// H^[k,m] = H^[k,k+1] ... H^[m-1,m]; requires k < m.
Eigen::MatrixXd compose_transitions(const TransitionFamily& f, std::size_t k, std::size_t m);

/// Thin cylinder A^[l,m](i_l..i_m): states are 0-based and occupy times start..end().
struct CylinderSet {
  std::size_t start = 0;
  std::vector<std::size_t> states;
  std::size_t end() const { return start + states.size() - 1; }
  friend bool operator==(const CylinderSet&, const CylinderSet&) = default;
};

/// Validates a non-empty state list with every state < n.
CylinderSet make_cylinder(std::size_t start, std::vector<std::size_t> states, std::size_t n);

double cylinder_measure(const TransitionFamily& f, const CylinderSet& c);
double log_cylinder_measure(const TransitionFamily& f, const CylinderSet& c);

/// x^(k)_i H^[k,m]_{ij}; i, j 0-based; requires k < m.
double two_point_measure(const TransitionFamily& f, std::size_t k, std::size_t i, std::size_t m, std::size_t j);

CylinderSet shift_cylinder(const CylinderSet& c, std::size_t m);

struct MixingGap {
  double tau = 0.0;
  double bound = 0.0;  // |H^[l,s+m]_{i_l j_s} - x^(s+m)_{j_s}|
};

/// tau_m = |mu(A ∩ shift^m B) - mu(A) mu(shift^m B)| for thin cylinders; requires
/// A to end strictly before the shifted B starts.
MixingGap mixing_gap(const TransitionFamily& f, const CylinderSet& A, const CylinderSet& B, std::size_t m);

struct MixingTerm {
  std::size_t m = 0;
  double tau = 0.0;
  double bound = 0.0;
};

struct MixingSeries {
  CylinderSet A;
  CylinderSet B;
  std::vector<MixingTerm> terms;
  bool numerically_mixing = false;  // last three tau below 1e-10
};

/// Terms for m = 1..m_max; values of m for which the windows overlap are skipped.
MixingSeries mixing_series(const TransitionFamily& f, const CylinderSet& A, const CylinderSet& B, std::size_t m_max);

void write_mixing_csv(std::ostream& os, const MixingSeries& s);

/// Probability comparison given log values: absolute on the linear scale when
/// either value is representable (>= 1e-300), relative on the log scale below.
bool prob_close(double log_a, double log_b, double abs_tol = 1e-12, double rel_log_tol = 1e-12);

}  // namespace qso
