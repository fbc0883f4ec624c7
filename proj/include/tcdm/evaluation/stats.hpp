#pragma once

#include <span>
#include <vector>

namespace tcdm::evaluation {

/// Pearson linear correlation. Throws InputError on length mismatch, fewer
/// than two samples, or zero variance in either argument.
double plcc(std::span<const double> a, std::span<const double> b);

/// Spearman rank correlation: Pearson on average-tie (fractional) ranks.
double srocc(std::span<const double> a, std::span<const double> b);

/// sqrt(mean((a - b)^2)).
double rmse(std::span<const double> a, std::span<const double> b);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> values);

/// Unbiased sample variance.
double sample_variance(std::span<const double> values);

/// Left-tailed variance-ratio F-test. Returns true (H = 1) when
/// var(a) / var(b) falls below the `significance` quantile of
/// F(n_a - 1, n_b - 1), i.e. model a has significantly smaller residuals.
bool f_test(std::span<const double> residuals_a, std::span<const double> residuals_b, double significance = 0.05);

}  // namespace tcdm::evaluation
