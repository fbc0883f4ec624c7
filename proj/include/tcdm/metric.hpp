#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <tcdm/features.hpp>
#include <tcdm/savar.hpp>
#include <tcdm/segmentation.hpp>
#include <tcdm/types.hpp>

namespace tcdm {

/// Scoring parameters. Defaults are the published configuration.
struct MetricConfig {
  std::size_t seeds = 400;  // L
  std::size_t k = 20;       // SA-VAR order and F2 neighbor count
  double t = 1e-6;
  double alpha = 0.3;
  SamplingConfig sampling;
  WeightScheme weight_scheme = WeightScheme::sigmoid_proposed;
  ColorSpace color_space = ColorSpace::rgb;
  EtaMode eta_mode = EtaMode::std_dev;
  bool raw_color_weights = false;
  bool cross_exclude_coincident = true;
  double ridge = 1e-8;
};

/// Throws InputError for out-of-range parameters.
void validate(const MetricConfig& config);

/// Stable one-line rendering of every field; used for cache keys and echoes.
std::string describe(const MetricConfig& config);

std::optional<ColorSpace> parse_color_space(std::string_view name);
std::string_view to_string(ColorSpace space);
std::optional<SamplingStrategy> parse_sampling_strategy(std::string_view name);
std::string_view to_string(SamplingStrategy strategy);

/// Full-range BT.601: Y in [0, 255], chroma centered on 128.
Vec3 rgb_to_yuv(const Vec3& rgb);
PointCloud convert_color_space(const PointCloud& cloud, ColorSpace space);

struct QualityReport {
  double q = 0.0;
  double f1 = 0.0;
  double f1_geometry_mean = 0.0;
  double f1_color_mean = 0.0;
  double f2 = 0.0;
  std::vector<PatchFeatures> per_patch;  // seed order
  MetricConfig config;
  std::size_t reference_points = 0;
  std::size_t distorted_points = 0;
  std::size_t patches_used = 0;
  std::size_t patches_skipped = 0;
  std::size_t patches_empty = 0;
};

/// Everything that depends on the reference alone: seeds, reference patches
/// and their self-predictions. Reusable across many distorted clouds.
class PreparedReference {
public:
  PreparedReference(const PointCloud& reference, const MetricConfig& config, std::size_t threads = 0);

  const MetricConfig& config() const { return config_; }
  const SeedSet& seeds() const { return seeds_; }
  std::size_t reference_points() const { return reference_points_; }

  /// Scores a distorted cloud against this reference.
  QualityReport score(const PointCloud& distorted, std::size_t threads = 0) const;

private:
  MetricConfig config_;
  FeatureOptions feature_options_;
  std::size_t reference_points_ = 0;
  SeedSet seeds_;
  std::vector<std::vector<Point>> reference_patches_;
  std::vector<std::optional<SelfTerms>> self_terms_;
};

/// Higher is better. `threads` = 0 picks the machine default; the result is
/// bit-identical for every thread count.
QualityReport score(const PointCloud& reference, const PointCloud& distorted, const MetricConfig& config = {},
                    std::size_t threads = 0);

}  // namespace tcdm
