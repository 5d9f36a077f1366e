#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qso/markov.hpp"
#include "qso/operator.hpp"
#include "qso/simplex.hpp"

namespace qso {

/// V_a on S^1: P_{11,1} = a, P_{11,2} = 1 - a, P_{12,2} = P_{22,2} = 1.
struct VaParams {
  double a = 0.0;
  SimplexPoint x = SimplexPoint::vertex_last(2);
};

VaParams make_va_params(double a, double x1);
QsoOperator va_operator(double a);

struct VaTransition {
  Eigen::Matrix2d H;
  Eigen::Matrix2d logH;
};

/// H^[k,k+1] from the closed form H_11 = (a x_1)^(2^k).
VaTransition va_transition_closed_form(const VaParams& p, std::size_t k);

/// log x_1^(k) = (2^k - 1) log a + 2^k log x_1.
double va_log_x1(const VaParams& p, std::size_t k);

struct CylinderClass {
  enum class Kind { all_ones, all_twos, ones_then_twos, two_one };
  Kind kind = Kind::all_ones;
  std::size_t l = 0;  // window start
  std::size_t m = 0;  // window end
  std::size_t k = 0;  // last time in state 1 for ones_then_twos

  static CylinderClass all_ones(std::size_t l, std::size_t m);
  static CylinderClass all_twos(std::size_t l, std::size_t m);
  /// State 1 on l..k, state 2 on k+1..m; needs l <= k < m.
  static CylinderClass ones_then_twos(std::size_t l, std::size_t m, std::size_t k);
  /// A^[k,k+1](2,1).
  static CylinderClass two_one(std::size_t k);

  CylinderSet cylinder() const;
  std::string label() const;
};

std::string to_string(CylinderClass::Kind k);

struct CylinderValue {
  double value = 0.0;       // constructive, from x^(l) and the closed-form transitions
  double log_value = 0.0;
  double printed = 0.0;     // the closed formula as printed for the class
  double log_printed = 0.0;
  std::vector<std::string> discrepancies;  // one line per disagreeing exponent
};

CylinderValue va_cylinder_closed_form(const VaParams& p, const CylinderClass& c);

struct RatioZ {
  double value = 1.0;  // +inf for a singular witness
  double log_value = 0.0;
  bool singular_witness = false;
};

/// mu_num(c) / mu_den(c) with 0/0 := 1. Different values of a need `cross_parameter`.
RatioZ rn_ratio_z(const VaParams& num, const VaParams& den, const CylinderClass& c, bool cross_parameter = false);

struct ExpectationTerms {
  double K = 0.0;      // transition 1 -> 2 at step m
  double K_hat = 0.0;  // transition 1 -> 1 at step m
};

/// The two non-zero values of E((1 - alpha_m)^2 | F_{m-1}); both sit on paths that are in
/// state 1 at time m-1. Requires m >= 1.
ExpectationTerms conditional_expectation_term(const VaParams& num, const VaParams& den, std::size_t m);

enum class RNClass { equivalent_evidence, singular_evidence, undecided };
std::string to_string(RNClass c);

struct RNTerm {
  std::size_t m = 0;
  double K_term = 0.0;
  double K_hat_term = 0.0;
  double partial_sum = 0.0;
  double occupation = 0.0;  // numerator probability of state 1 at time m-1
};

/// Per-state outcome of the numeric convergence rule.
struct RNStateVerdict {
  std::size_t state = 0;  // 1-based
  RNClass classification = RNClass::undecided;
  std::string deciding;   // "terms", "occupation" or "none"
  double tail = 0.0;      // last value of the deciding sequence
};

struct RNSeriesReport {
  VaParams num;
  VaParams den;
  std::vector<RNTerm> terms;
  RNClass classification = RNClass::undecided;
  double tail_term = 0.0;
  std::vector<RNStateVerdict> states;
  double log_alpha_min = 0.0;  // over transitions with positive numerator probability
  double log_alpha_max = 0.0;
  std::string exceptional_set_note;
};

/// Partial sums of K + K_hat for m = 1..m_max (m_max >= 2) and the evidence label.
RNSeriesReport rn_series(const VaParams& num, const VaParams& den, std::size_t m_max,
                         bool cross_parameter = false);

void write_rn_csv(std::ostream& os, const RNSeriesReport& r);

// ---------------------------------------------------------------------------
// Heuristic version for arbitrary operators (exploratory only).

struct HeuristicTerm {
  std::size_t m = 0;
  std::vector<double> g;          // per state i: sum_j H_num(1 - H_num/H_den)^2 at step m
  std::vector<double> occupation; // numerator law at time m-1
  double partial_sum = 0.0;       // running sum over m and states
};

struct HeuristicRNReport {
  std::vector<HeuristicTerm> terms;
  std::vector<RNStateVerdict> states;
  RNClass classification = RNClass::undecided;
  double tail_term = 0.0;
};

HeuristicRNReport rn_series_heuristic(const TransitionFamily& num, const TransitionFamily& den, std::size_t m_max);

}  // namespace qso
