#include <cmath>
#include <string>

#include "chemkd/error.hpp"
#include "chemkd/ged.hpp"

namespace chemkd {

Assignment assignment_solve(std::span<const double> costs, std::size_t m) {
  if (costs.size() != m * m) throw InvalidArgument("cost matrix is not square");
  Assignment out;
  if (m == 0) return out;
  for (double c : costs) {
    if (std::isnan(c) || c < 0) throw InvalidArgument("cost matrix entries must be non-negative");
  }
  for (std::size_t i = 0; i < m; ++i) {
    bool row_ok = false;
    bool col_ok = false;
    for (std::size_t j = 0; j < m; ++j) {
      row_ok |= std::isfinite(costs[i * m + j]);
      col_ok |= std::isfinite(costs[j * m + i]);
    }
    if (!row_ok) throw InvalidArgument("row " + std::to_string(i) + " has no permitted assignment");
    if (!col_ok) throw InvalidArgument("column " + std::to_string(i) + " has no permitted assignment");
  }

  // Shortest augmenting paths with row/column potentials, 1-based with a
  // virtual column 0.
  const double inf = kForbidden;
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = costs[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (!std::isfinite(delta)) throw InvalidArgument("no assignment with finite cost exists");
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.row_to_col.assign(m, 0);
  for (std::size_t j = 1; j <= m; ++j) out.row_to_col[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < m; ++i) out.total += costs[i * m + out.row_to_col[i]];
  return out;
}

}  // namespace chemkd
