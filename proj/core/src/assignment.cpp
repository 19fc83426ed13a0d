#include "crad/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace crad {

std::vector<std::size_t> max_weight_assignment(const Matrix& score) {
  const auto n = static_cast<std::size_t>(score.rows());
  if (static_cast<std::size_t>(score.cols()) != n) {
    throw std::invalid_argument("assignment needs a square score matrix");
  }
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();

  // Shortest augmenting path with potentials on cost = -score; 1-based
  // indices with 0 as the virtual root column.
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> col_match(n + 1, 0), way(n + 1, 0);
  for (std::size_t r = 1; r <= n; ++r) {
    col_match[0] = r;
    std::size_t col = 0;
    std::vector<double> min_slack(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col] = true;
      const std::size_t row = col_match[col];
      double delta = inf;
      std::size_t next = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = -score(row - 1, c - 1) - row_pot[row] - col_pot[c];
        if (cur < min_slack[c]) {
          min_slack[c] = cur;
          way[c] = col;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          next = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          row_pot[col_match[c]] += delta;
          col_pot[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col = next;
    } while (col_match[col] != 0);
    do {
      const std::size_t prev = way[col];
      col_match[col] = col_match[prev];
      col = prev;
    } while (col != 0);
  }

  std::vector<std::size_t> match(n);
  for (std::size_t c = 1; c <= n; ++c) match[col_match[c] - 1] = c - 1;
  return match;
}

}  // namespace crad
