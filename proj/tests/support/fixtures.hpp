#pragma once

// In-code copies of the operators shipped under fixtures/ (1-based entries).

#include <vector>

#include "qso/operator.hpp"

namespace qso::testing {

inline QsoOperator from_one_based(std::size_t n, std::vector<Coefficient> entries) {
  for (auto& e : entries) {
    --e.i;
    --e.j;
    --e.k;
  }
  return make_operator(HeredityTensor::from_entries(n, entries));
}

// Attracting vertex, three vertex fixed points. A1 = D2 = 1, B1 = C1 = E2 = 0.3, C2 = 0.2.
inline QsoOperator attracting_not_unique() {
  return from_one_based(3, {{1, 1, 1, 1.0},
                            {1, 2, 1, 0.3}, {1, 2, 2, 0.4}, {1, 2, 3, 0.3},
                            {1, 3, 1, 0.3}, {1, 3, 2, 0.2}, {1, 3, 3, 0.5},
                            {2, 2, 2, 1.0},
                            {2, 3, 2, 0.3}, {2, 3, 3, 0.7},
                            {3, 3, 3, 1.0}});
}

// C1 = 1/2 breaks the strict uniqueness conditions; the vertex is still the only fixed point.
inline QsoOperator sufficiency_only() {
  return from_one_based(3, {{1, 1, 1, 0.5}, {1, 1, 2, 0.3}, {1, 1, 3, 0.2},
                            {1, 2, 1, 0.25}, {1, 2, 2, 0.25}, {1, 2, 3, 0.5},
                            {1, 3, 1, 0.5}, {1, 3, 3, 0.5},
                            {2, 2, 2, 0.6}, {2, 2, 3, 0.4},
                            {2, 3, 2, 0.4}, {2, 3, 3, 0.6},
                            {3, 3, 3, 1.0}});
}

// A2 = 1, every other pair goes to type 3.
inline QsoOperator unique_not_contraction() {
  return from_one_based(3, {{1, 1, 2, 1.0}, {1, 2, 3, 1.0}, {1, 3, 3, 1.0},
                            {2, 2, 3, 1.0}, {2, 3, 3, 1.0}, {3, 3, 3, 1.0}});
}

}  // namespace qso::testing
