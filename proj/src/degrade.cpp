#include <tcdm/degrade.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <tcdm/error.hpp>
#include <tcdm/rng.hpp>

namespace tcdm {

std::optional<DegradationKind> parse_degradation_kind(std::string_view name) {
  if (name == "geometry_gaussian" || name == "ggn") return DegradationKind::geometry_gaussian;
  if (name == "color_noise" || name == "cn") return DegradationKind::color_noise;
  if (name == "downsample" || name == "ds") return DegradationKind::downsample;
  return std::nullopt;
}

std::string_view to_string(DegradationKind kind) {
  switch (kind) {
    case DegradationKind::geometry_gaussian: return "geometry_gaussian";
    case DegradationKind::color_noise: return "color_noise";
    case DegradationKind::downsample: return "downsample";
  }
  return "unknown";
}

PointCloud degrade(const PointCloud& cloud, const DegradationSpec& spec) {
  if (!std::isfinite(spec.level)) throw InputError("degradation level must be finite");
  Rng rng(spec.rng_seed);
  PointCloud out;

  switch (spec.kind) {
    case DegradationKind::geometry_gaussian: {
      if (spec.level < 0.0) throw InputError("geometry noise sigma must be nonnegative");
      out = cloud;
      if (spec.level == 0.0) return out;
      for (auto& p : out.points) {
        for (int c = 0; c < 3; ++c) p.position[c] += spec.level * rng.gaussian();
      }
      return out;
    }
    case DegradationKind::color_noise: {
      if (spec.level < 0.0) throw InputError("color noise sigma must be nonnegative");
      out = cloud;
      if (spec.level == 0.0) return out;
      for (auto& p : out.points) {
        for (int c = 0; c < 3; ++c) p.color[c] = std::clamp(p.color[c] + spec.level * rng.gaussian(), 0.0, 255.0);
      }
      return out;
    }
    case DegradationKind::downsample: {
      if (!(spec.level > 0.0 && spec.level <= 1.0)) throw InputError("downsample keep fraction must lie in (0, 1]");
      const std::size_t n = cloud.size();
      // Snap products like 0.7 * 10 = 7.000000000000001 before rounding up.
      const double exact = spec.level * static_cast<double>(n);
      const double nearest = std::round(exact);
      const auto keep = static_cast<std::size_t>(std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact) ? nearest
                                                                                                     : std::ceil(exact));
      if (keep == 0) throw InputError("downsample would produce an empty cloud");
      if (keep >= n) return cloud;
      // Partial Fisher-Yates picks the subset; sorting restores input order.
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(order[i], order[j]);
      }
      order.resize(keep);
      std::sort(order.begin(), order.end());
      out.points.reserve(keep);
      for (const auto i : order) out.points.push_back(cloud.points[i]);
      return out;
    }
  }
  throw InternalError("unhandled degradation kind");
}

}  // namespace tcdm
