#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dyncomm {

// Node-indexed matrices are row-major so a node's row is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using NodeId = std::uint32_t;
using Label = std::uint32_t;
using Labels = std::vector<Label>;

/// Per-slice hard community labels c_1..c_T.
using PartitionSeries = std::vector<Labels>;

/// Per-slice row-stochastic membership matrices B_t (N x K).
using MembershipSeries = std::vector<Matrix>;

}  // namespace dyncomm
