#include <tcdm/segmentation.hpp>

#include <algorithm>
#include <string>

#include <tcdm/error.hpp>
#include <tcdm/parallel.hpp>
#include <tcdm/spatial_index.hpp>

namespace tcdm {

SeedSet select_seeds(const PointCloud& reference, std::size_t count, const SamplingConfig& sampling) {
  if (count == 0) throw InputError("seed count must be positive");
  const auto positions = reference.positions();
  SeedSet seeds;
  seeds.reference_indices = sampling.strategy == SamplingStrategy::fps
                                ? farthest_point_sampling(positions, count)
                                : random_sampling(positions, count, sampling.rng_seed);
  seeds.positions.reserve(count);
  for (const auto i : seeds.reference_indices) seeds.positions.push_back(positions[i]);
  return seeds;
}

std::vector<std::uint32_t> assign_labels(const PointCloud& cloud, const SeedSet& seeds, std::size_t threads) {
  if (seeds.size() == 0) throw InputError("partition needs at least one seed");
  const SpatialIndex index(seeds.positions);
  std::vector<std::uint32_t> labels(cloud.size(), 0);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (cloud.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    NeighborList nearest;
    const std::size_t end = std::min(cloud.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      index.knn(cloud.points[i].position, 1, std::nullopt, nearest);
      labels[i] = static_cast<std::uint32_t>(nearest.indices.front());
    }
  });
  return labels;
}

VoronoiPartition assign_partition(const PointCloud& reference, const PointCloud& distorted, const SeedSet& seeds,
                                  std::size_t threads) {
  return {assign_labels(reference, seeds, threads), assign_labels(distorted, seeds, threads)};
}

std::vector<PatchPair> build_patch_pairs(const PointCloud& reference, const PointCloud& distorted,
                                         const VoronoiPartition& partition, const SeedSet& seeds) {
  if (partition.reference_labels.size() != reference.size() || partition.distorted_labels.size() != distorted.size()) {
    throw InputError("partition does not match the clouds");
  }
  std::vector<PatchPair> pairs(seeds.size());
  for (std::size_t l = 0; l < pairs.size(); ++l) {
    pairs[l].seed_index = l;
    pairs[l].seed = seeds.positions[l];
  }

  auto distribute = [&](const PointCloud& cloud, const std::vector<std::uint32_t>& labels, bool is_reference) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto l = labels[i];
      if (l >= pairs.size()) throw InputError("partition label " + std::to_string(l) + " out of range");
      auto& pair = pairs[l];
      Point p = cloud.points[i];
      p.position -= pair.seed;
      (is_reference ? pair.reference : pair.distorted).push_back(p);
      (is_reference ? pair.reference_source : pair.distorted_source).push_back(i);
    }
  };
  distribute(reference, partition.reference_labels, true);
  distribute(distorted, partition.distorted_labels, false);
  return pairs;
}

}  // namespace tcdm
