#include <tcdm/savar.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>

#include <tcdm/error.hpp>
#include <tcdm/simd/kernels.hpp>
#include <tcdm/spatial_index.hpp>

namespace tcdm {

std::optional<WeightScheme> parse_weight_scheme(std::string_view name) {
  if (name == "sigmoid_proposed" || name == "sigmoid" || name == "proposed") return WeightScheme::sigmoid_proposed;
  if (name == "constant_one" || name == "constant") return WeightScheme::constant_one;
  if (name == "inverse_distance") return WeightScheme::inverse_distance;
  if (name == "exp_decay") return WeightScheme::exp_decay;
  return std::nullopt;
}

std::string_view to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::sigmoid_proposed: return "sigmoid_proposed";
    case WeightScheme::constant_one: return "constant_one";
    case WeightScheme::inverse_distance: return "inverse_distance";
    case WeightScheme::exp_decay: return "exp_decay";
  }
  return "unknown";
}

std::optional<EtaMode> parse_eta_mode(std::string_view name) {
  if (name == "std" || name == "std_dev") return EtaMode::std_dev;
  if (name == "variance" || name == "var") return EtaMode::variance;
  return std::nullopt;
}

std::string_view to_string(EtaMode mode) { return mode == EtaMode::std_dev ? "std" : "variance"; }

namespace {

double distance_spread(std::span<const double> distances, EtaMode mode) {
  const double n = static_cast<double>(distances.size());
  const double mean = std::accumulate(distances.begin(), distances.end(), 0.0) / n;
  double ss = 0.0;
  for (const double d : distances) ss += (d - mean) * (d - mean);
  const double variance = ss / n;
  return mode == EtaMode::std_dev ? std::sqrt(variance) : variance;
}

}  // namespace

std::vector<double> spatial_kernel(std::span<const double> distances, WeightScheme scheme, EtaMode eta_mode) {
  std::vector<double> d(distances.size());
  if (distances.empty()) return d;
  switch (scheme) {
    case WeightScheme::constant_one:
      std::fill(d.begin(), d.end(), 1.0);
      break;
    case WeightScheme::inverse_distance:
      for (std::size_t j = 0; j < d.size(); ++j) {
        d[j] = distances[j] > 0.0 ? 1.0 / distances[j] : std::numeric_limits<double>::infinity();
      }
      break;
    case WeightScheme::sigmoid_proposed: {
      const double eta = distance_spread(distances, eta_mode);
      if (!(eta > 0.0)) {
        std::fill(d.begin(), d.end(), 0.5);
        break;
      }
      // 1/(1+e^-z) rounds to 1.0 once z > ~37; keep the open upper bound.
      const double below_one = std::nextafter(1.0, 0.0);
      for (std::size_t j = 0; j < d.size(); ++j) {
        d[j] = std::min(1.0 / (1.0 + std::exp(-distances[j] / eta)), below_one);
      }
      break;
    }
    case WeightScheme::exp_decay: {
      const double eta = distance_spread(distances, eta_mode);
      if (!(eta > 0.0)) {
        std::fill(d.begin(), d.end(), 1.0);
        break;
      }
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = std::exp(-distances[j] / eta);
      break;
    }
  }
  return d;
}

std::vector<double> spatial_weights(std::span<const double> distances, WeightScheme scheme, EtaMode eta_mode) {
  std::vector<double> w = spatial_kernel(distances, scheme, eta_mode);
  if (w.empty()) return w;
  const auto infinite = static_cast<double>(std::count_if(w.begin(), w.end(), [](double v) { return std::isinf(v); }));
  if (infinite > 0) {
    // Limit of 1/dist normalization: coincident neighbors take all the weight.
    for (auto& v : w) v = std::isinf(v) ? 1.0 / infinite : 0.0;
    return w;
  }
  double total = 0.0;
  for (const double v : w) total += v;
  if (!(total > 0.0)) {
    // exp_decay can underflow every term; fall back to uniform.
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  for (auto& v : w) v /= total;
  return w;
}

std::vector<double> spatial_weights(const Vec3& query, std::span<const Vec3> neighbors, WeightScheme scheme,
                                    EtaMode eta_mode) {
  std::vector<double> distances;
  distances.reserve(neighbors.size());
  for (const auto& n : neighbors) distances.push_back((n - query).norm());
  return spatial_weights(distances, scheme, eta_mode);
}

Neighborhoods find_neighborhoods(std::span<const Point> targets, std::span<const Point> source, bool exclude_self,
                                 const SavarOptions& options) {
  if (source.empty()) throw InputError("neighbor source is empty");
  if (options.k == 0) throw InputError("neighbor count K must be positive");
  if (exclude_self && targets.size() != source.size()) {
    throw InputError("self-exclusion requires the targets to be the neighbor source");
  }
  const std::size_t k = options.k;
  std::vector<Vec3> source_positions;
  source_positions.reserve(source.size());
  for (const auto& p : source) source_positions.push_back(p.position);
  const SpatialIndex index(source_positions);

  Neighborhoods hoods;
  hoods.k = k;
  hoods.indices.resize(targets.size() * k);
  hoods.weights.resize(targets.size() * k);
  hoods.distances.resize(targets.size() * k);

  const bool skip_coincident = !exclude_self && options.cross_exclude_coincident;
  NeighborList found;
  std::vector<std::size_t> kept_indices;
  std::vector<double> kept_distances;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Vec3& q = targets[i].position;
    kept_indices.clear();
    kept_distances.clear();
    if (exclude_self) {
      index.knn(q, k, i, found);
      kept_indices = found.indices;
      kept_distances = found.distances;
    } else if (!skip_coincident) {
      index.knn(q, k, std::nullopt, found);
      kept_indices = found.indices;
      kept_distances = found.distances;
    } else {
      // Widen the query until K non-coincident neighbors survive or the
      // source runs out.
      std::size_t want = k;
      for (;;) {
        index.knn(q, want, std::nullopt, found);
        std::size_t coincident = 0;
        while (coincident < found.size() && found.distances[coincident] == 0.0) ++coincident;
        if (found.size() - coincident >= k || found.size() < want) {
          if (coincident == found.size()) {
            // Nothing but coincident points: use them rather than nothing.
            kept_indices = found.indices;
            kept_distances = found.distances;
          } else {
            kept_indices.assign(found.indices.begin() + coincident, found.indices.end());
            kept_distances.assign(found.distances.begin() + coincident, found.distances.end());
          }
          break;
        }
        want = k + coincident;
      }
      if (kept_indices.size() > k) {
        kept_indices.resize(k);
        kept_distances.resize(k);
      }
    }
    if (kept_indices.empty()) throw InputError("target point " + std::to_string(i) + " has no neighbor");
    while (kept_indices.size() < k) {
      kept_indices.push_back(kept_indices.back());
      kept_distances.push_back(kept_distances.back());
    }
    const auto w = spatial_weights(kept_distances, options.scheme, options.eta_mode);
    std::copy(kept_indices.begin(), kept_indices.end(), hoods.indices.begin() + i * k);
    std::copy(kept_distances.begin(), kept_distances.end(), hoods.distances.begin() + i * k);
    std::copy(w.begin(), w.end(), hoods.weights.begin() + i * k);
  }
  return hoods;
}

namespace {

const Vec3& feature(const Point& p, Channel channel) { return channel == Channel::geometry ? p.position : p.color; }

}  // namespace

Design assemble_design(std::span<const Point> targets, std::span<const Point> source, const Neighborhoods& hoods,
                       Channel channel) {
  const std::size_t n = targets.size();
  const std::size_t k = hoods.k;
  if (hoods.rows() != n) throw InputError("neighborhood table does not match the targets");
  Design out;
  out.targets.resize(static_cast<Eigen::Index>(n), 3);
  out.design.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(3 * k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out.targets.row(row) = feature(targets[i], channel).transpose();
    for (std::size_t j = 0; j < k; ++j) {
      const double w = hoods.weights[i * k + j];
      const Vec3& f = feature(source[hoods.indices[i * k + j]], channel);
      for (int c = 0; c < 3; ++c) out.design(row, static_cast<Eigen::Index>(3 * j) + c) = w * f[c];
    }
  }
  return out;
}

Design assemble_design(std::span<const Point> targets, std::span<const Point> source, Channel channel,
                       bool exclude_self, const SavarOptions& options) {
  if (targets.empty()) throw InputError("no target points");
  return assemble_design(targets, source, find_neighborhoods(targets, source, exclude_self, options), channel);
}

double clamped_determinant(const Eigen::Matrix3d& sigma) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sigma, Eigen::EigenvaluesOnly);
  double det = 1.0;
  for (int c = 0; c < 3; ++c) det *= std::max(eig.eigenvalues()[c], 0.0);
  return det;
}

namespace {

void finish_fit(const Eigen::MatrixXd& targets, SAVarFit& fit) {
  fit.residuals = targets - fit.predictions;
  const Eigen::MatrixXd s = fit.residuals.transpose() * fit.residuals / static_cast<double>(targets.rows());
  fit.sigma = 0.5 * (s + s.transpose());
  fit.complexity = clamped_determinant(fit.sigma);
}

void check_fit_inputs(const Eigen::MatrixXd& targets, const RowMatrix& design) {
  if (targets.rows() != design.rows() || targets.rows() == 0) throw InputError("design and targets disagree on rows");
  if (targets.cols() != 3 || design.cols() == 0 || design.cols() % 3 != 0) {
    throw InputError("expected 3 target channels and a 3K-wide design");
  }
  if (!targets.allFinite() || !design.allFinite()) throw InputError("non-finite value in regression inputs");
}

}  // namespace

SAVarFit fit_savar(const Eigen::MatrixXd& targets, const RowMatrix& design, double ridge) {
  check_fit_inputs(targets, design);
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols();
  const Eigen::Index d = targets.cols();
  const Eigen::Index w = m + d;

  // One Gram pass over [design | targets] yields G = A^T A and A^T Y.
  RowMatrix augmented(n, w);
  augmented.leftCols(m) = design;
  augmented.rightCols(d) = targets;
  RowMatrix gram = RowMatrix::Zero(w, w);
  simd::active_kernels().gram_upper(augmented.data(), static_cast<std::size_t>(n), static_cast<std::size_t>(w),
                                    gram.data());
  const Eigen::MatrixXd full = gram.selfadjointView<Eigen::Upper>();
  Eigen::MatrixXd normal = full.topLeftCorner(m, m);
  const Eigen::MatrixXd rhs = full.topRightCorner(m, d);

  SAVarFit fit;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  bool solved = llt.info() == Eigen::Success && llt.rcond() >= 1e-12;
  if (!solved) {
    const double lambda = ridge * normal.trace() / static_cast<double>(m);
    if (lambda > 0.0) {
      normal.diagonal().array() += lambda;
      llt.compute(normal);
      solved = llt.info() == Eigen::Success;
      fit.regularized = true;
    }
  }
  const Eigen::MatrixXd theta_t = solved ? Eigen::MatrixXd(llt.solve(rhs))
                                         : Eigen::MatrixXd(normal.completeOrthogonalDecomposition().solve(rhs));
  fit.theta = theta_t.transpose();
  fit.predictions = design * theta_t;
  finish_fit(targets, fit);
  return fit;
}

SAVarFit fit_savar_kronecker(const Eigen::MatrixXd& targets, const RowMatrix& design) {
  check_fit_inputs(targets, design);
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols();
  const Eigen::Index d = targets.cols();

  const Eigen::MatrixXd f = design.transpose();  // (K d) x N
  const Eigen::MatrixXd projector = (f * f.transpose()).ldlt().solve(f);
  const Eigen::MatrixXd lifted = Eigen::kroneckerProduct(projector, Eigen::MatrixXd::Identity(d, d));

  // vec() of the d x N target matrix stacks each point's channels.
  Eigen::VectorXd fv(n * d);
  for (Eigen::Index i = 0; i < n; ++i) fv.segment(i * d, d) = targets.row(i).transpose();
  const Eigen::VectorXd theta_v = lifted * fv;

  SAVarFit fit;
  fit.theta = Eigen::Map<const Eigen::MatrixXd>(theta_v.data(), d, m);
  const Eigen::VectorXd pred_v = Eigen::kroneckerProduct(f.transpose(), Eigen::MatrixXd::Identity(d, d)) * theta_v;
  fit.predictions.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) fit.predictions.row(i) = pred_v.segment(i * d, d).transpose();
  finish_fit(targets, fit);
  return fit;
}

namespace {

PatchPrediction predict_patch(std::span<const Point> targets, std::span<const Point> source, bool exclude_self,
                              const SavarOptions& options) {
  const Neighborhoods hoods = find_neighborhoods(targets, source, exclude_self, options);
  const Design geometry = assemble_design(targets, source, hoods, Channel::geometry);
  const Design color = assemble_design(targets, source, hoods, Channel::color);
  const SAVarFit geometry_fit = fit_savar(geometry.targets, geometry.design, options.ridge);
  const SAVarFit color_fit = fit_savar(color.targets, color.design, options.ridge);

  PatchPrediction out;
  out.geometry_complexity = geometry_fit.complexity;
  out.color_complexity = color_fit.complexity;
  out.prediction.resize(static_cast<Eigen::Index>(targets.size()), 6);
  out.prediction.leftCols(3) = geometry_fit.predictions;
  out.prediction.rightCols(3) = color_fit.predictions;
  return out;
}

}  // namespace

std::optional<PatchPrediction> self_complexity(std::span<const Point> reference, const SavarOptions& options) {
  if (reference.size() < 2) return std::nullopt;
  return predict_patch(reference, reference, true, options);
}

std::optional<PatchPrediction> cross_complexity(std::span<const Point> reference, std::span<const Point> distorted,
                                                const SavarOptions& options) {
  if (reference.size() < 2 || distorted.empty()) return std::nullopt;
  return predict_patch(reference, distorted, false, options);
}

}  // namespace tcdm
