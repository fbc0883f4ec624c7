#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <tcdm/savar.hpp>

namespace tcdm::testing {

/// Self-prediction design of a random patch of `n` points (uniform in a
/// 10-unit box, random colors) with K neighbors.
Design random_savar_instance(std::size_t n, std::size_t k, Channel channel, std::uint64_t seed);

/// Least-squares predictions through an SVD pseudo-inverse of the design.
Eigen::MatrixXd pinv_predictions(const Eigen::MatrixXd& targets, const RowMatrix& design);

/// ||a - b||_F / ||b||_F.
double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Spearman correlation from the textbook rank formula
/// 1 - 6 sum d^2 / (n (n^2 - 1)); valid only without ties.
double srocc_rank_formula(std::span<const double> a, std::span<const double> b);

}  // namespace tcdm::testing
