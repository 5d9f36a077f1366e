#pragma once

// Test-only generators of heredity tensors.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "qso/operator.hpp"

namespace qso::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Dirichlet(1,...,1) of length `len`; with `sparse`, each slot is dropped with
/// probability 1/3 while keeping at least one.
inline std::vector<double> dirichlet(Rng& rng, std::size_t len, bool sparse = false) {
  std::vector<double> w(len);
  double s = 0.0;
  std::exponential_distribution<double> e(1.0);
  for (auto& v : w) {
    v = e(rng);
    if (sparse && uniform(rng) < 1.0 / 3.0) v = 0.0;
  }
  for (double v : w) s += v;
  if (s == 0.0) {
    w[std::uniform_int_distribution<std::size_t>(0, len - 1)(rng)] = 1.0;
    return w;
  }
  for (auto& v : w) v /= s;
  return w;
}

/// Symmetric tensor with every (i,j) row an independent Dirichlet draw.
inline HeredityTensor random_tensor(Rng& rng, std::size_t n, bool sparse = false) {
  HeredityTensor t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto w = dirichlet(rng, n, sparse);
      for (std::size_t k = 0; k < n; ++k) t(i, j, k) = t(j, i, k) = w[k];
    }
  return t;
}

inline QsoOperator random_operator(Rng& rng, std::size_t n, bool sparse = false) {
  return make_operator(random_tensor(rng, n, sparse));
}

/// Random operator that is b-bistochastic by construction. For a pair with
/// lo = min(i,j) and hi = max(i,j) the row puts no mass below lo, at most 1/2
/// on lo..hi-1 and the rest on hi..n; that pattern is exactly what V(x) <=^b x
/// requires of a row. With probability `p_absorb` a diagonal pair (k,k), k < n,
/// is made absorbing (P_{kk,k} = 1), which breaks the strict uniqueness
/// conditions.
inline QsoOperator random_bbistochastic(Rng& rng, std::size_t n, double p_absorb = 0.0) {
  HeredityTensor t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t lo = i, hi = j;
      std::vector<double> row(n, 0.0);
      if (lo == hi) {
        if (lo + 1 < n && uniform(rng) < p_absorb) {
          row[lo] = 1.0;
        } else {
          const auto w = dirichlet(rng, n - lo);
          for (std::size_t m = lo; m < n; ++m) row[m] = w[m - lo];
        }
      } else {
        const double band = 0.5 * uniform(rng);
        const auto wb = dirichlet(rng, hi - lo);
        const auto wt = dirichlet(rng, n - hi);
        for (std::size_t m = lo; m < hi; ++m) row[m] = band * wb[m - lo];
        for (std::size_t m = hi; m < n; ++m) row[m] = (1.0 - band) * wt[m - hi];
      }
      for (std::size_t k = 0; k < n; ++k) t(i, j, k) = t(j, i, k) = row[k];
    }
  return make_operator(std::move(t));
}

/// n = 3 tensor with P_{22,1} = P_{23,1} = P_{33,1} = P_{33,2} = 0 and otherwise
/// random rows.
inline QsoOperator random_structured3(Rng& rng) {
  HeredityTensor t = random_tensor(rng, 3, uniform(rng) < 0.5);
  auto squash = [&](std::size_t i, std::size_t j, std::size_t from) {
    for (std::size_t k = 0; k < from; ++k) {
      t(i, j, 2) += t(i, j, k);
      t(i, j, k) = 0.0;
    }
    for (std::size_t k = 0; k < 3; ++k) t(j, i, k) = t(i, j, k);
  };
  squash(1, 1, 1);
  squash(1, 2, 1);
  squash(2, 2, 2);
  return make_operator(std::move(t));
}

/// n = 2 tensor with P_{22,1} = 0.
inline QsoOperator random_structured2(Rng& rng) {
  HeredityTensor t(2);
  const double a = uniform(rng), b = uniform(rng);
  t(0, 0, 0) = a;
  t(0, 0, 1) = 1.0 - a;
  t(0, 1, 0) = t(1, 0, 0) = b;
  t(0, 1, 1) = t(1, 0, 1) = 1.0 - b;
  t(1, 1, 1) = 1.0;
  return make_operator(std::move(t));
}

/// Operator whose rows are small perturbations of one common row, so that the
/// contraction modulus is typically below 1.
inline QsoOperator random_near_constant(Rng& rng, std::size_t n, double spread) {
  const auto base = dirichlet(rng, n);
  HeredityTensor t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto w = dirichlet(rng, n);
      for (std::size_t k = 0; k < n; ++k) t(i, j, k) = t(j, i, k) = (1.0 - spread) * base[k] + spread * w[k];
    }
  return make_operator(std::move(t));
}

}  // namespace qso::testing
