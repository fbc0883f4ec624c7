#include <tcdm/types.hpp>

#include <string>

#include <tcdm/error.hpp>

namespace tcdm {

std::vector<Vec3> PointCloud::positions() const {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.position);
  return out;
}

void validate(const PointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    if (!p.position.allFinite()) throw InputError("point " + std::to_string(i) + ": non-finite coordinate");
    for (int c = 0; c < 3; ++c) {
      if (!(p.color[c] >= 0.0 && p.color[c] <= 255.0)) {
        throw InputError("point " + std::to_string(i) + ": color component outside [0, 255]");
      }
    }
  }
}

}  // namespace tcdm
