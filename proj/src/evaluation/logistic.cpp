#include <tcdm/evaluation/logistic.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include <tcdm/error.hpp>

namespace tcdm::evaluation {
namespace {

constexpr std::size_t kMinSamples = 6;
constexpr int kMaxEvaluations = 10000;
constexpr double kTolerance = 1e-10;

// 1 / (1 + exp(z)) without overflow.
double inverse_logistic(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double evaluate(const double* b, double q) { return b[0] * (0.5 - inverse_logistic(b[1] * (q - b[2]))) + b[3] * q + b[4]; }

struct Residuals : Eigen::DenseFunctor<double> {
  std::span<const double> q;
  std::span<const double> y;
  std::size_t* evaluations;

  Residuals(std::span<const double> scores, std::span<const double> mos, std::size_t* counter)
      : Eigen::DenseFunctor<double>(5, static_cast<int>(scores.size())), q(scores), y(mos), evaluations(counter) {}

  int operator()(const InputType& b, ValueType& r) const {
    ++*evaluations;
    for (std::size_t i = 0; i < q.size(); ++i) r[static_cast<Eigen::Index>(i)] = evaluate(b.data(), q[i]) - y[i];
    return 0;
  }

  int df(const InputType& b, JacobianType& jac) const {
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double u = q[i] - b[2];
      const double s = inverse_logistic(b[1] * u);
      const double slope = s * (1.0 - s);  // -ds/dz
      jac(row, 0) = 0.5 - s;
      jac(row, 1) = b[0] * slope * u;
      jac(row, 2) = -b[0] * slope * b[1];
      jac(row, 3) = q[i];
      jac(row, 4) = 1.0;
    }
    return 0;
  }
};

double sse(const LogisticParams& p, std::span<const double> q, std::span<const double> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double r = evaluate(p.beta.data(), q[i]) - y[i];
    total += r * r;
  }
  return total;
}

}  // namespace

double logistic5(const LogisticParams& params, double q) { return evaluate(params.beta.data(), q); }

LogisticParams initial_logistic_guess(std::span<const double> scores, std::span<const double> mos) {
  if (scores.size() != mos.size()) throw InputError("sample lengths differ");
  if (scores.size() < kMinSamples) throw InputError("logistic fit needs at least 6 samples");
  const double n = static_cast<double>(scores.size());
  const double mean_q = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  double var_q = 0.0;
  for (const double s : scores) var_q += (s - mean_q) * (s - mean_q);
  var_q /= n;
  if (!(var_q > 0.0)) throw InputError("logistic fit needs non-constant scores");
  const auto [lo, hi] = std::minmax_element(mos.begin(), mos.end());
  LogisticParams p;
  p.beta = {*hi - *lo, 1.0 / std::sqrt(var_q), mean_q, 0.0, std::accumulate(mos.begin(), mos.end(), 0.0) / n};
  return p;
}

LogisticFit fit_logistic5(std::span<const double> scores, std::span<const double> mos) {
  LogisticFit fit;
  fit.initial = initial_logistic_guess(scores, mos);
  fit.initial_sse = sse(fit.initial, scores, mos);

  Residuals functor(scores, mos, &fit.evaluations);
  Eigen::LevenbergMarquardt<Residuals> solver(functor);
  solver.setMaxfev(kMaxEvaluations);
  solver.setFtol(kTolerance);
  solver.setXtol(kTolerance);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(fit.initial.beta.data(), 5);
  solver.minimize(b);

  LogisticParams fitted;
  std::copy(b.data(), b.data() + 5, fitted.beta.begin());
  const double fitted_sse = sse(fitted, scores, mos);
  // Keep the starting point if the search wandered off or went non-finite.
  if (std::isfinite(fitted_sse) && fitted_sse <= fit.initial_sse) {
    fit.params = fitted;
    fit.final_sse = fitted_sse;
  } else {
    fit.params = fit.initial;
    fit.final_sse = fit.initial_sse;
  }
  fit.mapped.reserve(scores.size());
  for (const double s : scores) fit.mapped.push_back(logistic5(fit.params, s));
  return fit;
}

}  // namespace tcdm::evaluation
