#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <tcdm/error.hpp>
#include <tcdm/segmentation.hpp>

#include "shapes.hpp"

using namespace tcdm;

namespace {

PointCloud cloud_of(std::initializer_list<Vec3> positions) {
  PointCloud c;
  for (const auto& p : positions) c.points.push_back({p, Vec3(10, 20, 30)});
  return c;
}

using Key = std::tuple<double, double, double, double, double, double>;

std::multiset<Key> contents(const std::vector<Point>& pts) {
  std::multiset<Key> out;
  for (const auto& p : pts) out.emplace(p.position.x(), p.position.y(), p.position.z(), p.color.x(), p.color.y(), p.color.z());
  return out;
}

// Nearest seed by direct scan, ties to the lower-ranked seed under (d^2, lexicographic, index).
std::uint32_t nearest_seed(const Vec3& p, const SeedSet& seeds) {
  std::uint32_t best = 0;
  for (std::uint32_t l = 1; l < seeds.size(); ++l) {
    const double a = (p - seeds.positions[l]).squaredNorm();
    const double b = (p - seeds.positions[best]).squaredNorm();
    if (a < b || (a == b && lex_less(seeds.positions[l], seeds.positions[best]))) best = l;
  }
  return best;
}

}  // namespace

TEST_CASE("two seeds, hand computation") {
  const auto ref = cloud_of({Vec3(0, 0, 0), Vec3(10, 0, 0), Vec3(4, 0, 0), Vec3(6, 0, 0)});
  const auto dist = cloud_of({Vec3(4, 0, 0), Vec3(6, 0, 0), Vec3(5, 0, 0)});
  SeedSet seeds;
  seeds.positions = {Vec3(0, 0, 0), Vec3(10, 0, 0)};
  seeds.reference_indices = {0, 1};
  const auto part = assign_partition(ref, dist, seeds);
  CHECK(part.reference_labels == std::vector<std::uint32_t>{0, 1, 0, 1});
  // x = 5 is equidistant: the lexicographically smaller seed wins.
  CHECK(part.distorted_labels == std::vector<std::uint32_t>{0, 1, 0});
}

TEST_CASE("seed points carry their own label and translate to the origin") {
  const auto ref = testing::make_sphere(3000, 1);
  const auto seeds = select_seeds(ref, 50, {});
  const auto part = assign_partition(ref, ref, seeds);
  for (std::size_t l = 0; l < seeds.size(); ++l) CHECK(part.reference_labels[seeds.reference_indices[l]] == l);
  const auto pairs = build_patch_pairs(ref, ref, part, seeds);
  for (std::size_t l = 0; l < pairs.size(); ++l) {
    const auto& src = pairs[l].reference_source;
    const auto it = std::find(src.begin(), src.end(), seeds.reference_indices[l]);
    REQUIRE(it != src.end());
    CHECK(pairs[l].reference[std::size_t(it - src.begin())].position == Vec3::Zero());
  }
}

TEST_CASE("patch holding only its seed") {
  const auto ref = cloud_of({Vec3(0, 0, 0), Vec3(100, 0, 0), Vec3(101, 0, 0)});
  const auto seeds = select_seeds(ref, 2, {});
  const auto pairs = build_patch_pairs(ref, ref, assign_partition(ref, ref, seeds), seeds);
  REQUIRE(pairs.size() == 2);
  bool found = false;
  for (const auto& pair : pairs) {
    if (pair.reference.size() == 1) {
      found = true;
      CHECK(pair.reference[0].position == Vec3::Zero());
      CHECK(pair.reference[0].color == Vec3(10, 20, 30));
    }
  }
  CHECK(found);
}

TEST_CASE("cube corners with L = 8 are all seeds") {
  PointCloud cube;
  for (int i = 0; i < 8; ++i) cube.points.push_back({Vec3(i & 1, (i >> 1) & 1, (i >> 2) & 1), Vec3(0, 0, 0)});
  auto ids = select_seeds(cube, 8, {}).reference_indices;
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("single seed holds everything") {
  const auto ref = testing::make_random_cloud(500, 50, 2);
  const auto dist = testing::make_random_cloud(300, 50, 3);
  const auto seeds = select_seeds(ref, 1, {});
  const auto pairs = build_patch_pairs(ref, dist, assign_partition(ref, dist, seeds), seeds);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].reference.size() == 500);
  CHECK(pairs[0].distorted.size() == 300);
}

TEST_CASE("partition is exhaustive, exclusive and matches a direct scan") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto ref = testing::make_random_cloud(2000 + 500 * s, 100, 10 + s);
    const auto dist = testing::make_random_cloud(1500, 100, 20 + s);
    const SamplingConfig sampling{s % 2 ? SamplingStrategy::random : SamplingStrategy::fps, s};
    const auto seeds = select_seeds(ref, 40, sampling);
    const auto part = assign_partition(ref, dist, seeds, 1 + s);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(part.reference_labels[i] == nearest_seed(ref.points[i].position, seeds));
    for (std::size_t i = 0; i < dist.size(); ++i) CHECK(part.distorted_labels[i] == nearest_seed(dist.points[i].position, seeds));

    const auto pairs = build_patch_pairs(ref, dist, part, seeds);
    REQUIRE(pairs.size() == seeds.size());
    std::vector<int> seen_ref(ref.size()), seen_dist(dist.size());
    for (std::size_t l = 0; l < pairs.size(); ++l) {
      const auto& pair = pairs[l];
      CHECK(pair.seed == seeds.positions[l]);
      CHECK(std::is_sorted(pair.reference_source.begin(), pair.reference_source.end()));
      CHECK(std::is_sorted(pair.distorted_source.begin(), pair.distorted_source.end()));
      for (std::size_t j = 0; j < pair.reference.size(); ++j) {
        const auto i = pair.reference_source[j];
        ++seen_ref[i];
        CHECK(pair.reference[j].position == ref.points[i].position - pair.seed);
      }
      for (std::size_t j = 0; j < pair.distorted.size(); ++j) {
        const auto i = pair.distorted_source[j];
        ++seen_dist[i];
        CHECK(pair.distorted[j].position == dist.points[i].position - pair.seed);
      }
    }
    CHECK(std::all_of(seen_ref.begin(), seen_ref.end(), [](int c) { return c == 1; }));
    CHECK(std::all_of(seen_dist.begin(), seen_dist.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("translation leaves patch contents unchanged") {
  // Integer coordinates and an integer offset keep every subtraction exact.
  PointCloud ref = testing::make_random_cloud(3000, 1000, 31);
  PointCloud dist = testing::make_random_cloud(2500, 1000, 32);
  for (auto* c : {&ref, &dist})
    for (auto& p : c->points) p.position = p.position.array().round().matrix();
  const Vec3 t(1024, -77, 3);
  PointCloud ref_t = ref, dist_t = dist;
  for (auto& p : ref_t.points) p.position += t;
  for (auto& p : dist_t.points) p.position += t;

  const auto seeds = select_seeds(ref, 30, {});
  const auto seeds_t = select_seeds(ref_t, 30, {});
  CHECK(seeds.reference_indices == seeds_t.reference_indices);
  const auto a = build_patch_pairs(ref, dist, assign_partition(ref, dist, seeds), seeds);
  const auto b = build_patch_pairs(ref_t, dist_t, assign_partition(ref_t, dist_t, seeds_t), seeds_t);
  REQUIRE(a.size() == b.size());
  for (std::size_t l = 0; l < a.size(); ++l) {
    CHECK(b[l].seed == a[l].seed + t);
    CHECK(contents(a[l].reference) == contents(b[l].reference));
    CHECK(contents(a[l].distorted) == contents(b[l].distorted));
  }
}

TEST_CASE("permutation leaves patch contents unchanged") {
  const auto ref = testing::make_torus(4000, 40);
  const auto dist = testing::make_torus(3000, 41);
  PointCloud ref_p, dist_p;
  ref_p.points.assign(ref.points.rbegin(), ref.points.rend());
  dist_p.points.assign(dist.points.rbegin(), dist.points.rend());
  std::swap(ref_p.points[5], ref_p.points[999]);

  const auto seeds = select_seeds(ref, 60, {});
  const auto seeds_p = select_seeds(ref_p, 60, {});
  CHECK(seeds.positions == seeds_p.positions);
  const auto a = build_patch_pairs(ref, dist, assign_partition(ref, dist, seeds), seeds);
  const auto b = build_patch_pairs(ref_p, dist_p, assign_partition(ref_p, dist_p, seeds_p), seeds_p);
  for (std::size_t l = 0; l < a.size(); ++l) {
    CHECK(contents(a[l].reference) == contents(b[l].reference));
    CHECK(contents(a[l].distorted) == contents(b[l].distorted));
  }
}

TEST_CASE("empty cells are kept") {
  const auto ref = cloud_of({Vec3(0, 0, 0), Vec3(10, 0, 0)});
  const auto dist = cloud_of({Vec3(1, 0, 0)});
  const auto seeds = select_seeds(ref, 2, {});
  const auto pairs = build_patch_pairs(ref, dist, assign_partition(ref, dist, seeds), seeds);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].distorted.size() + pairs[1].distorted.size() == 1);
  CHECK((pairs[0].distorted.empty() || pairs[1].distorted.empty()));
}

TEST_CASE("bad requests") {
  const auto ref = cloud_of({Vec3(0, 0, 0), Vec3(10, 0, 0)});
  CHECK_THROWS_AS(select_seeds(ref, 0, {}), InputError);
  CHECK_THROWS_AS(select_seeds(ref, 3, {}), InputError);
  CHECK_THROWS_AS(select_seeds(ref, 3, {SamplingStrategy::random, 1}), InputError);
}
