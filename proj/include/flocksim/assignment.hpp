#pragma once

#include <cstddef>
#include <vector>

#include "flocksim/common.hpp"

namespace flocksim {

// Exact solver for the square linear assignment problem
// (shortest augmenting path with dual potentials, O(n^3)).
//
// cost is row-major n x n. Returns the minimizing column for each row;
// total_cost receives the optimal value.
std::vector<int> solve_assignment(const std::vector<Real>& cost, int n,
                                  Real* total_cost = nullptr);

}  // namespace flocksim
