#pragma once

#include <vector>

#include <Eigen/Dense>

namespace diec {

/// Maximum-weight one-to-one assignment on a rectangular weight matrix
/// (Hungarian method, O(n^3)). Returns, for each row, the assigned column or
/// -1 when the row is left unmatched (only when rows > cols).
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

/// Sum of weights selected by `assignment`.
double assignment_value(const Eigen::MatrixXd& weights, const std::vector<int>& assignment);

}  // namespace diec
