#include "stanceval/assignment.hpp"

#include <cmath>
#include <limits>

#include "stanceval/error.hpp"

namespace stanceval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieEps = 1e-9;

// Kuhn-Munkres with potentials on a rows <= cols cost matrix (minimization).
// Returns col -> row (+1 offset internally cleared by caller).
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = static_cast<int>(cost.front().size());
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
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
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  return p;  // p[j] in 1..n, 0 = free column
}

// Optimal total weight; matches min(rows, cols) entries.
double optimal_value(const std::vector<std::vector<double>>& w) {
  const int rows = static_cast<int>(w.size());
  if (rows == 0) return 0.0;
  const int cols = static_cast<int>(w.front().size());
  if (cols == 0) return 0.0;

  std::vector<int> row_to_col(rows, -1);
  if (rows <= cols) {
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) cost[i][j] = -w[i][j];
    const auto p = hungarian_min(cost);
    for (int j = 1; j <= cols; ++j)
      if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  } else {
    std::vector<std::vector<double>> cost(cols, std::vector<double>(rows));
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) cost[j][i] = -w[i][j];
    const auto p = hungarian_min(cost);
    for (int i = 1; i <= rows; ++i)
      if (p[i] != 0) row_to_col[i - 1] = p[i] - 1;
  }
  double total = 0.0;
  for (int i = 0; i < rows; ++i)
    if (row_to_col[i] >= 0) total += w[i][row_to_col[i]];
  return total;
}

}  // namespace

double assignment_total(const std::vector<std::vector<double>>& weights,
                        const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i)
    if (row_to_col[i] >= 0) total += weights[i][static_cast<std::size_t>(row_to_col[i])];
  return total;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  const int rows = static_cast<int>(weights.size());
  if (rows == 0) return {};
  const int cols = static_cast<int>(weights.front().size());
  std::vector<int> assign(rows, -1);
  if (cols == 0) return assign;
  for (const auto& row : weights)
    if (static_cast<int>(row.size()) != cols)
      throw Error("BadArgument", "assignment matrix is not rectangular");

  // Fix rows one by one to the lowest column consistent with optimality;
  // each probe solves the remaining subproblem.
  const double target = optimal_value(weights);
  std::vector<bool> col_used(cols, false);
  std::vector<int> col_map;  // sub column -> original column
  double fixed = 0.0;
  int needed = std::min(rows, cols);

  for (int i = 0; i < rows && needed > 0; ++i) {
    const int rows_left_after = rows - i - 1;
    auto sub_value = [&](int skip_col) {
      std::vector<std::vector<double>> sub;
      sub.reserve(static_cast<std::size_t>(rows_left_after));
      for (int r = i + 1; r < rows; ++r) {
        std::vector<double> line;
        line.reserve(static_cast<std::size_t>(cols));
        for (int c = 0; c < cols; ++c)
          if (!col_used[c] && c != skip_col) line.push_back(weights[r][c]);
        sub.push_back(std::move(line));
      }
      return optimal_value(sub);
    };

    bool placed = false;
    for (int j = 0; j < cols; ++j) {
      if (col_used[j]) continue;
      const double candidate = fixed + weights[i][j] + sub_value(j);
      if (std::abs(candidate - target) <= kTieEps) {
        assign[i] = j;
        col_used[j] = true;
        fixed += weights[i][j];
        --needed;
        placed = true;
        break;
      }
    }
    // No column keeps this row inside an optimal solution; legal only while
    // enough rows remain to fill the matching.
    if (!placed && rows_left_after < needed)
      throw Error("Internal", "assignment fixing failed to reach the optimum");
  }
  return assign;
}

}  // namespace stanceval
