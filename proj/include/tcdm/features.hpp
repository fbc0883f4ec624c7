#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <tcdm/savar.hpp>
#include <tcdm/segmentation.hpp>
#include <tcdm/types.hpp>

namespace tcdm {

enum class ColorSpace { rgb, yuv };

/// Per-channel factors k_d of the point-wise difference g. Normalized to sum
/// to one by default; `raw` keeps the integer ratios (1:2:1 RGB, 6:1:1 YUV).
Vec3 color_weights(ColorSpace space, bool raw = false);

/// SSIM-style ratio (2 a b + T) / (a^2 + b^2 + T). In (0, 1] for a, b >= 0.
double complexity_similarity(double c_self, double c_cross, double t);

/// g(a, b) = (sum_d k_d |a_color_d - b_color_d| + 1) * ||a_pos - b_pos||.
/// Rows are 6-vectors: position then color.
double g_difference(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b,
                    const Vec3& weights);
double g_difference(const Point& a, const Point& b, const Vec3& weights);

/// N x K point-wise difference fields of the two prediction terms. Neighbor
/// ids come from the geometry of `x_hat` alone (self excluded, short lists
/// padded with the farthest) and are reused on `y_hat`.
struct DifferenceFields {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
};

DifferenceFields difference_fields(const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& y_hat, std::size_t k,
                                   const Vec3& weights);

/// Row-major N x K neighbor ids Id_i taken from the geometry of `x_hat`.
std::vector<std::size_t> prediction_neighbors(const Eigen::MatrixXd& x_hat, std::size_t k);

/// One difference field over precomputed neighbor ids.
Eigen::MatrixXd difference_field(const Eigen::MatrixXd& prediction, const std::vector<std::size_t>& ids, std::size_t k,
                                 const Vec3& weights);

/// (c + T) / (sigma_x sigma_y + T) over the flattened fields, with population
/// standard deviations and covariance.
double prediction_similarity(const Eigen::MatrixXd& field_x, const Eigen::MatrixXd& field_y, double t);

struct FeatureOptions {
  SavarOptions savar;
  double t = 1e-6;
  ColorSpace color_space = ColorSpace::rgb;
  bool raw_color_weights = false;
};

struct PatchFeatures {
  double f1_geometry = 0.0;
  double f1_color = 0.0;
  double f2 = 0.0;
  double geometry_self = 0.0;
  double geometry_cross = 0.0;
  double color_self = 0.0;
  double color_cross = 0.0;
  std::size_t reference_points = 0;
  std::size_t distorted_points = 0;
  bool skipped = false;  // fewer than two reference points
  bool empty = false;    // no distorted points; features forced to 0
};

/// Everything about a reference patch that does not depend on the distorted
/// cloud: its self-prediction, the neighbor ids and the reference field.
struct SelfTerms {
  PatchPrediction prediction;
  std::vector<std::size_t> ids;
  Eigen::MatrixXd field;
};

/// nullopt when the patch has fewer than two points.
std::optional<SelfTerms> self_terms(std::span<const Point> reference, const FeatureOptions& options);

/// Features of one patch pair. `self` may carry precomputed self_terms() of
/// pair.reference.
PatchFeatures patch_features(const PatchPair& pair, const FeatureOptions& options, const SelfTerms* self = nullptr);

}  // namespace tcdm
