#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <tcdm/types.hpp>

namespace tcdm {

enum class SamplingStrategy { fps, random };

struct SamplingConfig {
  SamplingStrategy strategy = SamplingStrategy::fps;
  std::uint64_t rng_seed = 0;  // used by SamplingStrategy::random only
};

/// Generating seeds of the Voronoi partition, in selection order.
struct SeedSet {
  std::vector<Vec3> positions;
  std::vector<std::size_t> reference_indices;

  std::size_t size() const { return positions.size(); }
};

/// Nearest-seed label of every point in both clouds.
struct VoronoiPartition {
  std::vector<std::uint32_t> reference_labels;
  std::vector<std::uint32_t> distorted_labels;
};

/// Points of one Voronoi cell from both clouds, translated so the seed sits
/// at the origin. Colors are untouched.
struct PatchPair {
  std::size_t seed_index = 0;
  Vec3 seed = Vec3::Zero();
  std::vector<Point> reference;
  std::vector<Point> distorted;
  std::vector<std::size_t> reference_source;  // index of each member in its cloud
  std::vector<std::size_t> distorted_source;
};

SeedSet select_seeds(const PointCloud& reference, std::size_t count, const SamplingConfig& sampling);

/// Nearest-seed label of each point of one cloud.
std::vector<std::uint32_t> assign_labels(const PointCloud& cloud, const SeedSet& seeds, std::size_t threads = 1);

/// Labels each point with its nearest seed. Points equidistant to several
/// seeds go to the one ranked first by the spatial-index tie-break.
VoronoiPartition assign_partition(const PointCloud& reference, const PointCloud& distorted, const SeedSet& seeds,
                                  std::size_t threads = 1);

/// One pair per seed, in seed order. Members keep their cloud order. Empty
/// cells are represented, not dropped.
std::vector<PatchPair> build_patch_pairs(const PointCloud& reference, const PointCloud& distorted,
                                         const VoronoiPartition& partition, const SeedSet& seeds);

}  // namespace tcdm
