#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <tcdm/types.hpp>

namespace tcdm {

enum class DegradationKind { geometry_gaussian, color_noise, downsample };

/// One synthetic distortion.
///  - geometry_gaussian: `level` is the per-axis noise sigma, in coordinate units
///  - color_noise: `level` is the per-channel sigma on the [0, 255] scale
///  - downsample: `level` is the keep fraction in (0, 1]
struct DegradationSpec {
  DegradationKind kind = DegradationKind::geometry_gaussian;
  double level = 0.0;
  std::uint64_t rng_seed = 0;
};

std::optional<DegradationKind> parse_degradation_kind(std::string_view name);
std::string_view to_string(DegradationKind kind);

/// Pure function of (cloud, spec). Color noise is clamped to [0, 255];
/// downsampling keeps ceil(level * N) points in their original relative order.
PointCloud degrade(const PointCloud& cloud, const DegradationSpec& spec);

}  // namespace tcdm
