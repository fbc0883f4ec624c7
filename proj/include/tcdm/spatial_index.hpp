#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <tcdm/types.hpp>

namespace tcdm {

namespace simd {
struct KernelTable;
}

/// Result of a k-nearest-neighbor query, closest first.
struct NeighborList {
  std::vector<std::size_t> indices;
  std::vector<double> distances;  // Euclidean, nondecreasing

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  void clear() {
    indices.clear();
    distances.clear();
  }
};

/// Immutable kd-tree over a set of 3D positions.
///
/// Neighbor order is a total order, so results never depend on the tree
/// layout: ascending squared distance, then lexicographic (x, y, z) position,
/// then original index. Duplicated positions are kept. Safe for concurrent
/// queries.
class SpatialIndex {
public:
  explicit SpatialIndex(std::span<const Vec3> positions);
  SpatialIndex(std::span<const Vec3> positions, const simd::KernelTable& kernels);

  std::size_t size() const { return positions_.size(); }
  const Vec3& position(std::size_t i) const { return positions_[i]; }

  /// The min(k, available) nearest points. `exclude` never appears in the result.
  NeighborList knn(const Vec3& query, std::size_t k, std::optional<std::size_t> exclude = std::nullopt) const;

  /// Same as above, reusing `out`'s storage.
  void knn(const Vec3& query, std::size_t k, std::optional<std::size_t> exclude, NeighborList& out) const;

private:
  struct Node {
    Vec3 lo;
    Vec3 hi;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Vec3> positions_;
  std::vector<std::uint32_t> slots_;  // tree slot -> original index
  std::vector<double> xs_, ys_, zs_;  // coordinates in tree-slot order
  std::vector<Node> nodes_;
  const simd::KernelTable* kernels_;
};

/// Greedy max-min seed selection. The first seed is the point farthest from
/// the centroid; each next seed maximizes its distance to the chosen set.
/// Ties go to the lexicographically smallest position, then the lowest index.
/// Returns indices in selection order.
std::vector<std::size_t> farthest_point_sampling(std::span<const Vec3> positions, std::size_t count);

/// `count` distinct uniformly random indices, reproducible from `rng_seed`.
std::vector<std::size_t> random_sampling(std::span<const Vec3> positions, std::size_t count, std::uint64_t rng_seed);

}  // namespace tcdm
