#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include <tcdm/types.hpp>

namespace tcdm {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Form of the per-neighbor spatial kernel d(dist) before normalization.
enum class WeightScheme {
  sigmoid_proposed,  // 1 / (1 + exp(-dist / eta)), in [0.5, 1)
  constant_one,      // 1
  inverse_distance,  // 1 / dist; zero-distance neighbors share all weight
  exp_decay,         // exp(-dist / eta)
};

/// What eta is: spread of the K query-to-neighbor distances.
enum class EtaMode { std_dev, variance };

enum class Channel { geometry, color };

std::optional<WeightScheme> parse_weight_scheme(std::string_view name);
std::string_view to_string(WeightScheme scheme);
std::optional<EtaMode> parse_eta_mode(std::string_view name);
std::string_view to_string(EtaMode mode);

struct SavarOptions {
  std::size_t k = 20;
  WeightScheme scheme = WeightScheme::sigmoid_proposed;
  EtaMode eta_mode = EtaMode::std_dev;
  /// Tikhonov factor; lambda = ridge * trace(G) / (K * d), applied only when
  /// the normal matrix G is singular or its condition estimate exceeds 1e12.
  double ridge = 1e-8;
  /// Cross-prediction skips distorted points that coincide exactly with the
  /// target, mirroring the self-exclusion of self-prediction.
  bool cross_exclude_coincident = true;
};

/// Unnormalized kernel values d_j for neighbors at the given distances.
std::vector<double> spatial_kernel(std::span<const double> distances, WeightScheme scheme,
                                   EtaMode eta_mode = EtaMode::std_dev);

/// Kernel values normalized to sum to one. Empty input gives empty output.
std::vector<double> spatial_weights(std::span<const double> distances, WeightScheme scheme,
                                    EtaMode eta_mode = EtaMode::std_dev);
std::vector<double> spatial_weights(const Vec3& query, std::span<const Vec3> neighbors, WeightScheme scheme,
                                    EtaMode eta_mode = EtaMode::std_dev);

/// K padded neighbors and their weights for every target point.
struct Neighborhoods {
  std::size_t k = 0;
  std::vector<std::size_t> indices;  // row-major N x K, into the source patch
  std::vector<double> weights;       // row-major N x K, rows sum to one
  std::vector<double> distances;     // row-major N x K

  std::size_t rows() const { return k == 0 ? 0 : indices.size() / k; }
};

/// Finds each target's K nearest source points (dropping the target itself
/// when `exclude_self`, which requires source == targets). Short lists are
/// padded by repeating the farthest neighbor found. Throws InputError when a
/// target has no neighbor at all.
Neighborhoods find_neighborhoods(std::span<const Point> targets, std::span<const Point> source, bool exclude_self,
                                 const SavarOptions& options);

/// Target matrix (N x 3) and weighted design matrix (N x 3K) for one channel.
struct Design {
  Eigen::MatrixXd targets;
  RowMatrix design;
};

Design assemble_design(std::span<const Point> targets, std::span<const Point> source, const Neighborhoods& hoods,
                       Channel channel);
Design assemble_design(std::span<const Point> targets, std::span<const Point> source, Channel channel,
                       bool exclude_self, const SavarOptions& options);

/// Closed-form multivariate least squares with a shared design.
struct SAVarFit {
  Eigen::MatrixXd theta;        // d x (K d)
  Eigen::MatrixXd predictions;  // N x d
  Eigen::MatrixXd residuals;    // N x d
  Eigen::Matrix3d sigma;        // residual covariance, (1/N) E^T E
  double complexity = 0.0;      // det(sigma), negative round-off clamped to 0
  bool regularized = false;     // ridge fallback was needed
};

/// Normal-equation solve of min ||targets - design * theta^T||^2.
SAVarFit fit_savar(const Eigen::MatrixXd& targets, const RowMatrix& design, double ridge = 1e-8);

/// The same estimator written in vectorized Kronecker form,
/// vec(theta) = [((F F^T)^-1 F) (x) I_d] vec(targets^T) with F = design^T.
/// Dense and slow; kept as an algebraic cross-check of fit_savar.
SAVarFit fit_savar_kronecker(const Eigen::MatrixXd& targets, const RowMatrix& design);

/// det of a symmetric PSD 3x3 matrix from its eigenvalues, negatives clamped.
double clamped_determinant(const Eigen::Matrix3d& sigma);

/// Complexities of one patch prediction and the N x 6 prediction term
/// (predicted translated geometry, then predicted color).
struct PatchPrediction {
  double geometry_complexity = 0.0;
  double color_complexity = 0.0;
  Eigen::MatrixXd prediction;
};

/// Self-prediction of the reference patch from its own neighbors.
/// nullopt when the patch has fewer than two points.
std::optional<PatchPrediction> self_complexity(std::span<const Point> reference, const SavarOptions& options);

/// Cross-prediction of the reference patch from distorted neighbors.
/// nullopt when the reference has fewer than two points or the distorted
/// patch is empty.
std::optional<PatchPrediction> cross_complexity(std::span<const Point> reference, std::span<const Point> distorted,
                                                const SavarOptions& options);

}  // namespace tcdm
