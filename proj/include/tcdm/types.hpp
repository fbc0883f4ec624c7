#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace tcdm {

using Vec3 = Eigen::Vector3d;

/// A colored 3D point. Colors live on the 8-bit scale [0, 255] but are
/// carried as doubles so converted color spaces fit in the same slot.
struct Point {
  Vec3 position = Vec3::Zero();
  Vec3 color = Vec3::Zero();

  bool operator==(const Point& other) const { return position == other.position && color == other.color; }
};

/// Ordered sequence of points. Order is meaningful only for I/O round trips;
/// the metric itself is insensitive to it.
struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  std::vector<Vec3> positions() const;

  bool operator==(const PointCloud& other) const = default;
};

/// Throws InputError when a coordinate is non-finite or a color leaves [0, 255].
void validate(const PointCloud& cloud);

/// Strict lexicographic order on (x, y, z).
inline bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

}  // namespace tcdm
