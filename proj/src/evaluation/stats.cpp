#include <tcdm/evaluation/stats.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>

#include <tcdm/error.hpp>

namespace tcdm::evaluation {
namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("sample lengths differ");
  if (a.size() < 2) throw InputError("need at least two samples");
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

double plcc(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw InputError("zero variance: correlation undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double shared = 0.5 * static_cast<double>(start + 1 + end);  // mean of ranks start+1 .. end
    for (std::size_t i = start; i < end; ++i) ranks[order[i]] = shared;
    start = end;
  }
  return ranks;
}

double srocc(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const auto ra = fractional_ranks(a);
  const auto rb = fractional_ranks(b);
  return plcc(ra, rb);
}

double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("sample lengths differ");
  if (a.empty()) throw InputError("need at least one sample");
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw InputError("need at least two samples");
  const double m = mean(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

bool f_test(std::span<const double> residuals_a, std::span<const double> residuals_b, double significance) {
  if (!(significance > 0.0 && significance < 1.0)) throw InputError("significance must lie in (0, 1)");
  const double va = sample_variance(residuals_a);
  const double vb = sample_variance(residuals_b);
  if (!(va > 0.0) || !(vb > 0.0)) throw InputError("degenerate residual variance");
  const boost::math::fisher_f_distribution<double> dist(static_cast<double>(residuals_a.size() - 1),
                                                        static_cast<double>(residuals_b.size() - 1));
  return va / vb < boost::math::quantile(dist, significance);
}

}  // namespace tcdm::evaluation
