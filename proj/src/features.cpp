#include <tcdm/features.hpp>

#include <cmath>
#include <vector>

#include <tcdm/error.hpp>
#include <tcdm/spatial_index.hpp>

namespace tcdm {

Vec3 color_weights(ColorSpace space, bool raw) {
  if (space == ColorSpace::rgb) return raw ? Vec3(1.0, 2.0, 1.0) : Vec3(0.25, 0.5, 0.25);
  return raw ? Vec3(6.0, 1.0, 1.0) : Vec3(0.75, 0.125, 0.125);
}

double complexity_similarity(double c_self, double c_cross, double t) {
  return (2.0 * c_self * c_cross + t) / (c_self * c_self + c_cross * c_cross + t);
}

namespace {

// a and b point at 6 values: position then color.
double g_raw(const double* a, const double* b, const Vec3& weights) {
  double color = 1.0;
  for (int c = 0; c < 3; ++c) color += weights[c] * std::abs(a[3 + c] - b[3 + c]);
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return color * std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

double g_difference(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b,
                    const Vec3& weights) {
  if (a.size() != 6 || b.size() != 6) throw InputError("g expects 6-vectors");
  return g_raw(a.data(), b.data(), weights);
}

double g_difference(const Point& a, const Point& b, const Vec3& weights) {
  Eigen::RowVectorXd ra(6), rb(6);
  ra << a.position.transpose(), a.color.transpose();
  rb << b.position.transpose(), b.color.transpose();
  return g_difference(ra, rb, weights);
}

std::vector<std::size_t> prediction_neighbors(const Eigen::MatrixXd& x_hat, std::size_t k) {
  const auto n = static_cast<std::size_t>(x_hat.rows());
  if (n < 2) throw InputError("difference fields need at least two predicted points");
  if (x_hat.cols() != 6) throw InputError("prediction terms must be N x 6");
  if (k == 0) throw InputError("neighbor count K must be positive");

  std::vector<Vec3> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = x_hat.row(static_cast<Eigen::Index>(i)).head<3>().transpose();
  const SpatialIndex index(positions);
  std::vector<std::size_t> ids(n * k);
  NeighborList found;
  for (std::size_t i = 0; i < n; ++i) {
    index.knn(positions[i], k, i, found);
    for (std::size_t j = 0; j < k; ++j) ids[i * k + j] = j < found.size() ? found.indices[j] : found.indices.back();
  }
  return ids;
}

Eigen::MatrixXd difference_field(const Eigen::MatrixXd& prediction, const std::vector<std::size_t>& ids, std::size_t k,
                                 const Vec3& weights) {
  const auto n = static_cast<std::size_t>(prediction.rows());
  if (prediction.cols() != 6) throw InputError("prediction terms must be N x 6");
  if (ids.size() != n * k) throw InputError("neighbor ids do not match the prediction");
  // Row-major copy so each 6-vector is contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor> rows = prediction;
  Eigen::MatrixXd field(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = rows.data() + 6 * i;
    for (std::size_t j = 0; j < k; ++j) {
      field(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g_raw(a, rows.data() + 6 * ids[i * k + j], weights);
    }
  }
  return field;
}

DifferenceFields difference_fields(const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& y_hat, std::size_t k,
                                   const Vec3& weights) {
  if (y_hat.rows() != x_hat.rows() || y_hat.cols() != 6) throw InputError("prediction terms must both be N x 6");
  const auto ids = prediction_neighbors(x_hat, k);
  return {difference_field(x_hat, ids, k, weights), difference_field(y_hat, ids, k, weights)};
}

double prediction_similarity(const Eigen::MatrixXd& field_x, const Eigen::MatrixXd& field_y, double t) {
  if (field_x.rows() != field_y.rows() || field_x.cols() != field_y.cols() || field_x.size() == 0) {
    throw InputError("difference fields must have the same nonzero shape");
  }
  const double n = static_cast<double>(field_x.size());
  const double mean_x = field_x.sum() / n;
  const double mean_y = field_y.sum() / n;
  const Eigen::ArrayXXd cx = field_x.array() - mean_x;
  const Eigen::ArrayXXd cy = field_y.array() - mean_y;
  const double sigma_x = std::sqrt((cx * cx).sum() / n);
  const double sigma_y = std::sqrt((cy * cy).sum() / n);
  const double cov = (cx * cy).sum() / n;
  return (cov + t) / (sigma_x * sigma_y + t);
}

std::optional<SelfTerms> self_terms(std::span<const Point> reference, const FeatureOptions& options) {
  auto prediction = self_complexity(reference, options.savar);
  if (!prediction) return std::nullopt;
  SelfTerms terms;
  terms.ids = prediction_neighbors(prediction->prediction, options.savar.k);
  terms.field = difference_field(prediction->prediction, terms.ids, options.savar.k,
                                 color_weights(options.color_space, options.raw_color_weights));
  terms.prediction = std::move(*prediction);
  return terms;
}

PatchFeatures patch_features(const PatchPair& pair, const FeatureOptions& options, const SelfTerms* self) {
  PatchFeatures out;
  out.reference_points = pair.reference.size();
  out.distorted_points = pair.distorted.size();
  if (pair.reference.size() < 2) {
    out.skipped = true;
    return out;
  }
  if (pair.distorted.empty()) {
    out.empty = true;
    return out;
  }

  std::optional<SelfTerms> own_self;
  if (self == nullptr) {
    own_self = self_terms(pair.reference, options);
    self = &*own_self;
  }
  const auto cross = cross_complexity(pair.reference, pair.distorted, options.savar);
  if (!cross) throw InternalError("cross prediction unavailable for a non-degenerate patch");

  out.geometry_self = self->prediction.geometry_complexity;
  out.color_self = self->prediction.color_complexity;
  out.geometry_cross = cross->geometry_complexity;
  out.color_cross = cross->color_complexity;
  out.f1_geometry = complexity_similarity(out.geometry_self, out.geometry_cross, options.t);
  out.f1_color = complexity_similarity(out.color_self, out.color_cross, options.t);

  const Eigen::MatrixXd field_y = difference_field(cross->prediction, self->ids, options.savar.k,
                                                   color_weights(options.color_space, options.raw_color_weights));
  out.f2 = prediction_similarity(self->field, field_y, options.t);
  return out;
}

}  // namespace tcdm
