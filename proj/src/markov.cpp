#include "qso/markov.hpp"

#include <cmath>
#include <mutex>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qso/logmath.hpp"

namespace qso {

TransitionFamily::TransitionFamily(QsoOperator V, SimplexPoint start)
    : V_(std::move(V)), logP_(V_.n() * V_.n(), V_.n()) {
  const std::size_t n = V_.n();
  if (start.dim() != n) {
    throw PreconditionError(fmt::format("start point has dimension {}, operator has {}", start.dim(), n));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) logP_(i * n + j, k) = safe_log(V_.p(i, j, k));
  std::vector<double> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = safe_log(start[i]);
  x_.push_back(std::move(start));
  logx_.push_back(std::move(l));
}

std::size_t TransitionFamily::horizon() const {
  std::shared_lock lock(mu_);
  return x_.size() - 1;
}

void TransitionFamily::ensure(std::size_t k) const {
  {
    std::shared_lock lock(mu_);
    if (k < x_.size()) return;
  }
  std::unique_lock lock(mu_);
  const std::size_t n = V_.n();
  std::vector<double> buf(n * n);
  while (x_.size() <= k) {
    x_.push_back(evaluate(V_, x_.back()));
    const auto& L = logx_.back();
    std::vector<double> next(n);
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) buf[i * n + j] = logP_(i * n + j, m) + L[i] + L[j];
      next[m] = logsumexp(buf);
    }
    // Keep the log law normalized; the drift is rounding only.
    const double z = logsumexp(next);
    for (double& v : next) v -= z;
    logx_.push_back(std::move(next));
  }
}

SimplexPoint TransitionFamily::state(std::size_t k) const {
  ensure(k);
  std::shared_lock lock(mu_);
  return x_[k];
}

std::vector<double> TransitionFamily::log_state(std::size_t k) const {
  ensure(k);
  std::shared_lock lock(mu_);
  return logx_[k];
}

Eigen::MatrixXd TransitionFamily::transition_matrix(std::size_t k) const {
  const SimplexPoint x = state(k);
  const std::size_t n = V_.n();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) H(i, j) += V_.p(i, l, j) * x[l];
  return H;
}

Eigen::MatrixXd TransitionFamily::log_transition_matrix(std::size_t k) const {
  const std::vector<double> L = log_state(k);
  const std::size_t n = V_.n();
  Eigen::MatrixXd H(n, n);
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l) buf[l] = logP_(i * n + l, j) + L[l];
      H(i, j) = logsumexp(buf);
    }
  return H;
}

Eigen::MatrixXd compose_transitions(const TransitionFamily& f, std::size_t k, std::size_t m) {
  if (k >= m) throw PreconditionError(fmt::format("compose_transitions needs k < m, got k = {}, m = {}", k, m));
  Eigen::MatrixXd H = f.transition_matrix(k);
  for (std::size_t t = k + 1; t < m; ++t) H = H * f.transition_matrix(t);
  return H;
}

CylinderSet make_cylinder(std::size_t start, std::vector<std::size_t> states, std::size_t n) {
  if (states.empty()) throw PreconditionError("cylinder needs at least one state");
  for (std::size_t s : states) {
    if (s >= n) throw PreconditionError(fmt::format("cylinder state {} outside 1..{}", s + 1, n));
  }
  return CylinderSet{start, std::move(states)};
}

double cylinder_measure(const TransitionFamily& f, const CylinderSet& c) {
  double mu = f.state(c.start)[c.states.front()];
  for (std::size_t t = 0; t + 1 < c.states.size() && mu != 0.0; ++t) {
    mu *= f.transition_matrix(c.start + t)(c.states[t], c.states[t + 1]);
  }
  return mu;
}

double log_cylinder_measure(const TransitionFamily& f, const CylinderSet& c) {
  double mu = f.log_state(c.start)[c.states.front()];
  for (std::size_t t = 0; t + 1 < c.states.size() && mu != neg_inf; ++t) {
    mu += f.log_transition_matrix(c.start + t)(c.states[t], c.states[t + 1]);
  }
  return mu;
}

double two_point_measure(const TransitionFamily& f, std::size_t k, std::size_t i, std::size_t m, std::size_t j) {
  if (i >= f.n() || j >= f.n()) throw PreconditionError("two_point_measure state out of range");
  return f.state(k)[i] * compose_transitions(f, k, m)(i, j);
}

CylinderSet shift_cylinder(const CylinderSet& c, std::size_t m) { return CylinderSet{c.start + m, c.states}; }

MixingGap mixing_gap(const TransitionFamily& f, const CylinderSet& A, const CylinderSet& B, std::size_t m) {
  const CylinderSet Bm = shift_cylinder(B, m);
  if (A.end() >= Bm.start) {
    throw PreconditionError(fmt::format("cylinder windows overlap: A ends at {}, shifted B starts at {}", A.end(),
                                        Bm.start));
  }
  const std::size_t il = A.states.back();
  const std::size_t js = Bm.states.front();
  const double bound = std::abs(compose_transitions(f, A.end(), Bm.start)(il, js) - f.state(Bm.start)[js]);

  double inner = cylinder_measure(f, A);
  for (std::size_t t = 0; t + 1 < Bm.states.size() && inner != 0.0; ++t) {
    inner *= f.transition_matrix(Bm.start + t)(Bm.states[t], Bm.states[t + 1]);
  }
  return MixingGap{inner * bound, bound};
}

MixingSeries mixing_series(const TransitionFamily& f, const CylinderSet& A, const CylinderSet& B, std::size_t m_max) {
  if (m_max < 1) throw PreconditionError("mixing_series needs m_max >= 1");
  MixingSeries s{A, B, {}, false};
  for (std::size_t m = 1; m <= m_max; ++m) {
    if (A.end() >= B.start + m) continue;
    const MixingGap g = mixing_gap(f, A, B, m);
    s.terms.push_back({m, g.tau, g.bound});
  }
  const std::size_t t = s.terms.size();
  s.numerically_mixing =
      t >= 3 && s.terms[t - 1].tau < 1e-10 && s.terms[t - 2].tau < 1e-10 && s.terms[t - 3].tau < 1e-10;
  return s;
}

void write_mixing_csv(std::ostream& os, const MixingSeries& s) {
  os << "m,tau_m,bound_m\n";
  for (const auto& t : s.terms) fmt::print(os, "{},{:.17g},{:.17g}\n", t.m, t.tau, t.bound);
}

bool prob_close(double log_a, double log_b, double abs_tol, double rel_log_tol) {
  static const double floor_log = std::log(1e-300);
  if (log_a == neg_inf || log_b == neg_inf) return log_a == log_b;
  if (std::max(log_a, log_b) >= floor_log) return std::abs(std::exp(log_a) - std::exp(log_b)) <= abs_tol;
  return std::abs(log_a - log_b) <= rel_log_tol * std::max({1.0, std::abs(log_a), std::abs(log_b)});
}

}  // namespace qso
