#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tcdm::evaluation {

/// R(Q) = b1 * (1/2 - 1/(1 + exp(b2 * (Q - b3)))) + b4 * Q + b5
struct LogisticParams {
  std::array<double, 5> beta{};
};

double logistic5(const LogisticParams& params, double q);

struct LogisticFit {
  LogisticParams params;
  LogisticParams initial;
  std::vector<double> mapped;
  double initial_sse = 0.0;
  double final_sse = 0.0;
  std::size_t evaluations = 0;
};

/// Standard VQEG starting point for the given data.
LogisticParams initial_logistic_guess(std::span<const double> scores, std::span<const double> mos);

/// Least-squares fit of the five-parameter logistic. Needs at least 6
/// samples and non-constant scores. The returned SSE never exceeds the SSE
/// of the starting point.
LogisticFit fit_logistic5(std::span<const double> scores, std::span<const double> mos);

}  // namespace tcdm::evaluation
