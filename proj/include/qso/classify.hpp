#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qso/operator.hpp"
#include "qso/simplex.hpp"

namespace qso {

/// Outcome of a single inequality test evaluated with a safety margin.
/// Values inside the margin of a strict bound are `boundary`.
enum class Check { pass, fail, boundary };

std::string to_string(Check c);

/// Strict test value < bound with margin eps.
Check strictly_below(double value, double bound, double eps);

// ---------------------------------------------------------------------------
// Necessary conditions for V(x) <=^b x on the whole simplex.

struct ConditionResult {
  bool passed = true;
  std::optional<std::vector<std::size_t>> witness;  // 1-based index tuple
  double value = 0.0;                               // offending value
};

struct NecessaryConditions {
  ConditionResult cumulative_mass;  // sum_{m<=k} sum_{i,j} P_{ij,m} <= k n, k = 1..n
  ConditionResult upper_zero;       // P_{ij,k} = 0 for i,j in {k+1..n}, k <= n-1
  ConditionResult last_absorbing;   // P_{nn,n} = 1
  ConditionResult half_bound;       // P_{lj,l} <= 1/2 for j >= l+1
  bool all_passed() const {
    return cumulative_mass.passed && upper_zero.passed && last_absorbing.passed && half_bound.passed;
  }
  bool structural() const { return upper_zero.passed && last_absorbing.passed; }
};

NecessaryConditions check_necessary_bbistochastic(const QsoOperator& V, double eps_coef = 1e-12);

// ---------------------------------------------------------------------------
// Falsification search for V(x) <=^b x.

struct BViolation {
  SimplexPoint point;
  std::size_t k = 0;  // 1-based prefix length
  double gap = 0.0;   // U_k(x) - U_k(V(x)) < 0
};

struct BVerdict {
  std::optional<BViolation> violation;  // empty: no violation found
  std::size_t resolution = 0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  bool violated() const { return violation.has_value(); }
};

/// Grid resolution used when none is given: 40 for n <= 3, 12 for n = 4, 6 beyond.
std::size_t default_grid_resolution(std::size_t n);

/// Checks b_leq(V(x), x) on grid_simplex(n, resolution) followed by
/// sample_simplex(n, samples, seed); the first witness in that order wins.
/// Absence of a witness is evidence, not proof.
BVerdict verify_bbistochastic_numeric(const QsoOperator& V, std::size_t resolution, std::size_t samples,
                                      std::uint64_t seed, double eps_order = 1e-12);

// ---------------------------------------------------------------------------
// Sufficient conditions for uniqueness of the vertex fixed point.

struct UniquenessViolation {
  std::size_t k = 0;  // 1-based
  std::size_t j = 0;  // 1-based; j == k marks the P_{kk,k} < 1 test
  double value = 0.0;
  Check status = Check::fail;
};

struct UniquenessReport {
  bool met = true;
  std::vector<UniquenessViolation> violations;
};

/// For every k in 1..n-1 and j in k+1..n: P_{kk,k} < 1 and P_{kj,k} < 1/2.
UniquenessReport check_uniqueness_conditions(const QsoOperator& V, double eps_coef = 1e-12);

/// Coefficient-wise lambda V1 + (1 - lambda) V2. Both inputs must meet the
/// uniqueness conditions; the result is checked to meet them too.
QsoOperator check_convex_combination(const QsoOperator& V1, const QsoOperator& V2, double lambda);

// ---------------------------------------------------------------------------

enum class VertexStability { attracting, non_hyperbolic, mixed, not_repelling_only };
std::string to_string(VertexStability s);

struct VertexStabilityReport {
  VertexStability verdict = VertexStability::attracting;
  std::vector<double> eigenvalues;
};

/// Spectral class of (0,...,0,1) from the eigenvalues 2 P_{kn,k}: attracting
/// when all are below 1, non_hyperbolic when any is within 1e-10 of 1.
/// A spectrum entirely above 1 is reported as not_repelling_only, since the
/// vertex of a b-bistochastic operator cannot be repelling; any other mix is
/// `mixed`.
VertexStabilityReport classify_vertex_stability(const QsoOperator& V, double eps_hyperbolic = 1e-10);

// ---------------------------------------------------------------------------
// Strict contraction in the l1 norm.

struct ContractionReport {
  double modulus = 0.0;
  Check strict = Check::pass;
  std::array<std::size_t, 3> argmax_triple{1, 1, 1};  // (i1, i2, k), 1-based
  bool is_strict() const { return strict == Check::pass; }
};

/// modulus = max_{i1,i2,k} sum_j |P_{i1 k,j} - P_{i2 k,j}|; strict iff modulus < 1.
ContractionReport strict_contraction_general(const QsoOperator& V, double eps_contr = 1e-12);

struct Contraction1d {
  double max_quantity = 0.0;  // max{P_{12,1}, |P_{11,1} - P_{12,1}|}
  Check strict = Check::pass;
  bool is_strict() const { return strict == Check::pass; }
};

/// n = 2 criterion; requires P_{22,1} = 0 and P_{22,2} = 1.
Contraction1d strict_contraction_1d(const QsoOperator& V, double eps = 1e-12);

struct Contraction2d {
  std::array<double, 9> quantities{};  // (a) .. (i)
  double max_quantity = 0.0;
  char which = 'a';
  Check strict = Check::pass;
  bool is_strict() const { return strict == Check::pass; }
};

/// n = 3 criterion from the nine coefficient quantities (a)..(i); requires
/// the structural zeros P_{22,1} = P_{23,1} = P_{33,1} = P_{33,2} = 0.
Contraction2d strict_contraction_2d(const QsoOperator& V, double eps = 1e-12);

/// Sign test for A_1 x_1 + ... + A_n x_n + C <= 0 (or < 0 when `strict`) over
/// x >= 0, x_1 + ... + x_n <= 1: holds iff C and every A_k + C satisfy it.
bool linear_form_nonpositive(std::span<const double> A, double C, bool strict);

// ---------------------------------------------------------------------------

struct ClassificationReport {
  NecessaryConditions necessary;
  BVerdict numeric_b;
  UniquenessReport uniqueness;
  VertexStabilityReport vertex;
  ContractionReport contraction;
  std::optional<Contraction1d> contraction_1d;
  std::optional<Contraction2d> contraction_2d;
};

struct ClassifyOptions {
  std::optional<std::size_t> resolution;  // default_grid_resolution(n) when empty
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double eps_coef = 1e-12;
  double eps_order = 1e-12;
};

ClassificationReport classify(const QsoOperator& V, const ClassifyOptions& opts = {});

}  // namespace qso
