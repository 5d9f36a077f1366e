#include "qso/abscont.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qso/logmath.hpp"

namespace qso {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// e * log v with 0 * (-inf) taken as 0, i.e. v^0 = 1 even for v = 0.
double plog(double e, double log_v) { return e == 0.0 ? 0.0 : e * log_v; }

double pow2(std::size_t k) { return std::ldexp(1.0, static_cast<int>(k)); }
double pow2m1(std::size_t l) { return std::ldexp(1.0, static_cast<int>(l) - 1); }

// (1 - r)^2 w from log w and log r. 0/0 := 1 arrives here as a NaN ratio.
double squared_gap(double log_w, double log_r) {
  if (log_w == neg_inf || std::isnan(log_r)) return 0.0;
  if (log_r == inf) return inf;
  if (log_r == neg_inf) return std::exp(log_w);
  if (log_r <= 0.0) return std::exp(2.0 * log1mexp(log_r) + log_w);
  return std::exp(2.0 * (log_r + log1mexp(-log_r)) + log_w);
}

bool tail_rule(const std::vector<double>& s) {
  const std::size_t n = s.size();
  if (n < 3 || !(s[n - 1] < 1e-12)) return false;
  auto drop = [](double a, double b) { return (b == 0.0 && a >= 0.0) || (a > b && a >= 10.0 * b); };
  return drop(s[n - 3], s[n - 2]) && drop(s[n - 2], s[n - 1]);
}

// Harmless states: the terms themselves die out, or the state is eventually left
// for good (summable occupation), so the series is a finite sum almost surely.
RNStateVerdict classify_state(std::size_t state, const std::vector<double>& g, const std::vector<double>& occ) {
  RNStateVerdict v{state, RNClass::undecided, "none", g.empty() ? 0.0 : g.back()};
  if (tail_rule(g)) {
    v.classification = RNClass::equivalent_evidence;
    v.deciding = "terms";
    return v;
  }
  if (tail_rule(occ)) {
    v.classification = RNClass::equivalent_evidence;
    v.deciding = "occupation";
    v.tail = occ.back();
    return v;
  }
  for (std::size_t t = 0; t < g.size(); ++t) {
    if (std::isinf(g[t]) && occ[t] > 0.0) {
      v.classification = RNClass::singular_evidence;
      v.deciding = "terms";
      v.tail = inf;
      return v;
    }
  }
  if (g.size() >= 5) {
    bool floor = true;
    for (std::size_t t = g.size() - 5; t < g.size(); ++t) floor = floor && g[t] >= 1e-6 && occ[t] >= 1e-6;
    if (floor) {
      v.classification = RNClass::singular_evidence;
      v.deciding = "terms";
    }
  }
  return v;
}

RNClass combine(const std::vector<RNStateVerdict>& states, double& tail) {
  tail = 0.0;
  bool all_equivalent = true;
  for (const auto& s : states) {
    if (s.classification == RNClass::singular_evidence) {
      tail = s.tail;
      return RNClass::singular_evidence;
    }
    all_equivalent = all_equivalent && s.classification == RNClass::equivalent_evidence;
    tail = std::max(tail, s.tail);
  }
  return all_equivalent ? RNClass::equivalent_evidence : RNClass::undecided;
}

double log_a(const VaParams& p) { return safe_log(p.a); }
double log_x1(const VaParams& p) { return safe_log(p.x[0]); }

// log (a x_1)^(2^k)
double log_h11(const VaParams& p, std::size_t k) { return plog(pow2(k), log_a(p) + log_x1(p)); }

}  // namespace

VaParams make_va_params(double a, double x1) {
  if (!(a >= 0.0 && a <= 1.0)) throw PreconditionError(fmt::format("a = {} outside [0, 1]", a));
  return VaParams{a, make_point({x1, 1.0 - x1})};
}

QsoOperator va_operator(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw PreconditionError(fmt::format("a = {} outside [0, 1]", a));
  HeredityTensor t(2);
  t(0, 0, 0) = a;
  t(0, 0, 1) = 1.0 - a;
  t(0, 1, 1) = t(1, 0, 1) = 1.0;
  t(1, 1, 1) = 1.0;
  return make_operator(std::move(t));
}

double va_log_x1(const VaParams& p, std::size_t k) {
  return plog(pow2(k) - 1.0, log_a(p)) + plog(pow2(k), log_x1(p));
}

VaTransition va_transition_closed_form(const VaParams& p, std::size_t k) {
  VaTransition t;
  const double l11 = log_h11(p, k);
  t.logH << l11, log1mexp(l11), neg_inf, 0.0;
  t.H << std::exp(l11), -std::expm1(l11), 0.0, 1.0;
  return t;
}

CylinderClass CylinderClass::all_ones(std::size_t l, std::size_t m) {
  if (l > m) throw PreconditionError(fmt::format("window [{}, {}] is empty", l, m));
  return {Kind::all_ones, l, m, 0};
}

CylinderClass CylinderClass::all_twos(std::size_t l, std::size_t m) {
  if (l > m) throw PreconditionError(fmt::format("window [{}, {}] is empty", l, m));
  return {Kind::all_twos, l, m, 0};
}

CylinderClass CylinderClass::ones_then_twos(std::size_t l, std::size_t m, std::size_t k) {
  if (!(l <= k && k < m)) throw PreconditionError(fmt::format("need l <= k < m, got l={}, k={}, m={}", l, k, m));
  return {Kind::ones_then_twos, l, m, k};
}

CylinderClass CylinderClass::two_one(std::size_t k) { return {Kind::two_one, k, k + 1, k}; }

CylinderSet CylinderClass::cylinder() const {
  std::vector<std::size_t> s(m - l + 1, 0);
  switch (kind) {
    case Kind::all_ones: break;
    case Kind::all_twos: std::fill(s.begin(), s.end(), 1); break;
    case Kind::ones_then_twos:
      for (std::size_t t = k + 1; t <= m; ++t) s[t - l] = 1;
      break;
    case Kind::two_one: s = {1, 0}; break;
  }
  return CylinderSet{l, std::move(s)};
}

std::string to_string(CylinderClass::Kind k) {
  switch (k) {
    case CylinderClass::Kind::all_ones: return "ALL_ONES";
    case CylinderClass::Kind::all_twos: return "ALL_TWOS";
    case CylinderClass::Kind::ones_then_twos: return "ONES_THEN_TWOS";
    case CylinderClass::Kind::two_one: return "TWO_ONE";
  }
  return "UNKNOWN";
}

std::string CylinderClass::label() const {
  switch (kind) {
    case Kind::ones_then_twos: return fmt::format("{}({},{},{})", to_string(kind), l, m, k);
    case Kind::two_one: return fmt::format("{}({})", to_string(kind), k);
    default: return fmt::format("{}({},{})", to_string(kind), l, m);
  }
}

CylinderValue va_cylinder_closed_form(const VaParams& p, const CylinderClass& c) {
  const double la = log_a(p);
  const double lx = log_x1(p);
  CylinderValue v;
  auto note = [&](double constructive, double printed) {
    if (constructive != printed) {
      v.discrepancies.push_back(fmt::format("{}: exponent of a is {} from the cylinder product, {} in the closed formula",
                                            c.label(), constructive, printed));
    }
  };
  switch (c.kind) {
    case CylinderClass::Kind::all_ones: {
      const double ec = pow2(c.m) - 1.0;
      const double ep = pow2(c.m) - pow2m1(c.l);
      v.log_value = plog(ec, la) + plog(pow2(c.m), lx);
      v.log_printed = plog(ep, la) + plog(pow2(c.m), lx);
      note(ec, ep);
      break;
    }
    case CylinderClass::Kind::all_twos: {
      const double ec = pow2(c.l) - 1.0;
      const double ep = pow2m1(c.l);
      v.log_value = log1mexp(plog(ec, la) + plog(pow2(c.l), lx));
      v.log_printed = log1mexp(plog(ep, la) + plog(pow2(c.l), lx));
      note(ec, ep);
      break;
    }
    case CylinderClass::Kind::ones_then_twos: {
      const double ec = pow2(c.k) - 1.0;
      const double ep = pow2(c.k) - pow2m1(c.l);
      const double leave = log1mexp(log_h11(p, c.k));
      v.log_value = plog(ec, la) + plog(pow2(c.k), lx) + leave;
      v.log_printed = plog(ep, la) + plog(pow2(c.k), lx) + leave;
      note(ec, ep);
      break;
    }
    case CylinderClass::Kind::two_one:
      v.log_value = neg_inf;
      v.log_printed = neg_inf;
      break;
  }
  v.value = std::exp(v.log_value);
  v.printed = std::exp(v.log_printed);
  return v;
}

RatioZ rn_ratio_z(const VaParams& num, const VaParams& den, const CylinderClass& c, bool cross_parameter) {
  if (num.a != den.a && !cross_parameter) {
    throw PreconditionError(fmt::format("a differs ({} vs {}) and cross-parameter mode is off", num.a, den.a));
  }
  const double ln = va_cylinder_closed_form(num, c).log_value;
  const double ld = va_cylinder_closed_form(den, c).log_value;
  if (ln == neg_inf && ld == neg_inf) return RatioZ{1.0, 0.0, false};
  if (ld == neg_inf) return RatioZ{inf, inf, true};
  return RatioZ{std::exp(ln - ld), ln - ld, false};
}

ExpectationTerms conditional_expectation_term(const VaParams& num, const VaParams& den, std::size_t m) {
  if (m < 1) throw PreconditionError("conditional_expectation_term needs m >= 1");
  const double ltx = log_h11(num, m - 1);
  const double lty = log_h11(den, m - 1);
  const double lsx = log1mexp(ltx);
  const double lsy = log1mexp(lty);
  return ExpectationTerms{squared_gap(lsx, lsx - lsy), squared_gap(ltx, ltx - lty)};
}

std::string to_string(RNClass c) {
  switch (c) {
    case RNClass::equivalent_evidence: return "equivalent_evidence";
    case RNClass::singular_evidence: return "singular_evidence";
    case RNClass::undecided: return "undecided";
  }
  return "unknown";
}

RNSeriesReport rn_series(const VaParams& num, const VaParams& den, std::size_t m_max, bool cross_parameter) {
  if (m_max < 2) throw PreconditionError("rn_series needs m_max >= 2");
  if (num.a != den.a && !cross_parameter) {
    throw PreconditionError(fmt::format("a differs ({} vs {}) and cross-parameter mode is off", num.a, den.a));
  }
  RNSeriesReport r;
  r.num = num;
  r.den = den;
  std::vector<double> g1, occ1, g2, occ2;
  double sum = 0.0;
  double amin = inf, amax = neg_inf;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const ExpectationTerms e = conditional_expectation_term(num, den, m);
    sum += e.K + e.K_hat;
    const double lo = va_log_x1(num, m - 1);
    const double occ = std::exp(lo);
    r.terms.push_back({m, e.K, e.K_hat, sum, occ});
    g1.push_back(e.K + e.K_hat);
    occ1.push_back(occ);
    g2.push_back(0.0);  // state 2 is absorbing under both measures
    occ2.push_back(-std::expm1(lo));

    if (lo != neg_inf) {
      const double ltx = log_h11(num, m - 1), lty = log_h11(den, m - 1);
      if (ltx != neg_inf) {
        amin = std::min(amin, ltx - lty);
        amax = std::max(amax, ltx - lty);
      }
      const double lsx = log1mexp(ltx), lsy = log1mexp(lty);
      if (lsx != neg_inf) {
        amin = std::min(amin, lsx - lsy);
        amax = std::max(amax, lsx - lsy);
      }
    }
    if (lo != 0.0) {  // state 2 reachable: alpha = 1 there
      amin = std::min(amin, 0.0);
      amax = std::max(amax, 0.0);
    }
  }
  r.log_alpha_min = amin == inf ? 0.0 : amin;
  r.log_alpha_max = amax == neg_inf ? 0.0 : amax;
  r.states = {classify_state(1, g1, occ1), classify_state(2, g2, occ2)};
  r.classification = combine(r.states, r.tail_term);

  const double lnx = log_a(num) + log_x1(num);
  const double lny = log_a(den) + log_x1(den);
  if (lnx > lny) {
    r.exceptional_set_note = fmt::format(
        "alpha_m is unbounded on the all-ones path (1,1,1,...): log alpha_m = 2^(m-1) * {:.17g}; "
        "that path has numerator probability {:.17g} in the limit",
        lnx - lny, num.a == 1.0 && num.x[0] == 1.0 ? 1.0 : 0.0);
  }
  return r;
}

void write_rn_csv(std::ostream& os, const RNSeriesReport& r) {
  os << "m,K_term,Khat_term,partial_sum\n";
  for (const auto& t : r.terms) fmt::print(os, "{},{:.17g},{:.17g},{:.17g}\n", t.m, t.K_term, t.K_hat_term, t.partial_sum);
}

HeuristicRNReport rn_series_heuristic(const TransitionFamily& num, const TransitionFamily& den, std::size_t m_max) {
  if (m_max < 2) throw PreconditionError("rn_series_heuristic needs m_max >= 2");
  if (num.n() != den.n()) throw PreconditionError("numerator and denominator families differ in dimension");
  const std::size_t n = num.n();
  HeuristicRNReport r;
  std::vector<std::vector<double>> g(n), occ(n);
  double sum = 0.0;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const Eigen::MatrixXd ln = num.log_transition_matrix(m - 1);
    const Eigen::MatrixXd ld = den.log_transition_matrix(m - 1);
    const std::vector<double> lx = num.log_state(m - 1);
    HeuristicTerm t{m, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) t.g[i] += squared_gap(ln(i, j), ln(i, j) - ld(i, j));
      t.occupation[i] = std::exp(lx[i]);
      sum += t.g[i];
      g[i].push_back(t.g[i]);
      occ[i].push_back(t.occupation[i]);
    }
    t.partial_sum = sum;
    r.terms.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < n; ++i) r.states.push_back(classify_state(i + 1, g[i], occ[i]));
  r.classification = combine(r.states, r.tail_term);
  return r;
}

}  // namespace qso
