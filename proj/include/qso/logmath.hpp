#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace qso {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// log(sum exp(v)); -inf for an empty range or all -inf.
inline double logsumexp(std::span<const double> v) {
  double m = neg_inf;
  for (double x : v) m = std::max(m, x);
  if (m == neg_inf) return neg_inf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == neg_inf) return a;
  return a + std::log1p(std::exp(b - a));
}

/// log(1 - exp(x)) for x <= 0, accurate near both ends.
inline double log1mexp(double x) {
  if (x == 0.0) return neg_inf;
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : neg_inf; }

}  // namespace qso
