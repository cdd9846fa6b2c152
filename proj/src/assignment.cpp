#include "flocksim/assignment.hpp"

#include <limits>

namespace flocksim {

// Shortest-augmenting-path assignment with dual potentials (the classic
// Jonker-Volgenant / Hungarian scheme). One Dijkstra-like sweep per row.
std::vector<int> solve_assignment(const std::vector<Real>& cost, int n,
                                  Real* total_cost) {
  require(n >= 1, "assignment needs n >= 1");
  check_internal(cost.size() == static_cast<std::size_t>(n) * n,
                 "assignment cost matrix has wrong size");
  const Real kInf = std::numeric_limits<Real>::infinity();

  std::vector<Real> u(n, 0), v(n, 0);        // dual potentials
  std::vector<int> row_of_col(n, -1);        // matched row per column
  std::vector<int> col_of_row(n, -1);
  std::vector<Real> shortest(n);
  std::vector<int> pred(n);                  // previous column on path
  std::vector<char> done(n);

  for (int cur_row = 0; cur_row < n; ++cur_row) {
    std::fill(shortest.begin(), shortest.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    std::fill(pred.begin(), pred.end(), -1);

    int sink = -1;
    int i = cur_row;
    Real min_val = 0;
    while (sink == -1) {
      Real lowest = kInf;
      int j_lowest = -1;
      const Real* ci = &cost[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) {
        if (done[j]) continue;
        const Real r = min_val + ci[j] - u[i] - v[j];
        if (r < shortest[j]) {
          shortest[j] = r;
          pred[j] = i;
        }
        if (shortest[j] < lowest ||
            (shortest[j] == lowest && row_of_col[j] == -1)) {
          lowest = shortest[j];
          j_lowest = j;
        }
      }
      check_internal(j_lowest >= 0 && lowest < kInf,
                     "assignment problem infeasible");
      min_val = lowest;
      done[j_lowest] = 1;
      if (row_of_col[j_lowest] == -1) {
        sink = j_lowest;
      } else {
        i = row_of_col[j_lowest];
      }
    }

    u[cur_row] += min_val;
    for (int j = 0; j < n; ++j) {
      if (!done[j]) continue;
      if (j != sink) {
        const int ir = row_of_col[j];
        u[ir] += min_val - shortest[j];
      }
      v[j] -= min_val - shortest[j];
    }
    // v[sink] update above used shortest[sink] == min_val, net zero; walk the
    // augmenting path back to cur_row flipping matches.
    int j = sink;
    while (true) {
      const int ir = pred[j];
      row_of_col[j] = ir;
      std::swap(col_of_row[ir], j);
      if (ir == cur_row) break;
    }
  }

  if (total_cost) {
    Real s = 0;
    for (int r = 0; r < n; ++r)
      s += cost[static_cast<std::size_t>(r) * n + col_of_row[r]];
    *total_cost = s;
  }
  return col_of_row;
}

}  // namespace flocksim
