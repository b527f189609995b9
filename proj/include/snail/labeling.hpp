#pragma once

#include <Eigen/Dense>
#include <vector>

namespace snail {

/// Greedy maximum-overlap assignment between bare basis vectors (rows) and
/// eigenvectors (columns). Returns column index per bare index. Throws
/// LabelingFailed if any assigned overlap |<k|v>|^2 is below `threshold`.
std::vector<int> greedy_labels(const Eigen::MatrixXcd& vectors, double threshold = 0.7);

}  // namespace snail
