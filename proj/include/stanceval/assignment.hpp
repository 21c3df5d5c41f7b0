#pragma once

#include <vector>

namespace stanceval {

// Maximum-total-weight one-to-one assignment on a rectangular weight matrix.
// Exactly min(rows, cols) entries are matched. Returns row -> column
// (-1 for unmatched rows). Among equal-weight optima the result is the
// lexicographically smallest (row 0 gets the lowest usable column, then
// row 1, ...), which also prefers matching earlier rows when rows > cols.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

// Total weight of an assignment, accumulated in row order (so equal
// matchings sum bit-identically).
double assignment_total(const std::vector<std::vector<double>>& weights,
                        const std::vector<int>& row_to_col);

}  // namespace stanceval
