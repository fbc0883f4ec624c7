#include <tcdm/spatial_index.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <tcdm/error.hpp>
#include <tcdm/rng.hpp>
#include <tcdm/simd/kernels.hpp>

namespace tcdm {
namespace {

constexpr std::uint32_t kLeafSize = 16;
// Below this size one linear scan beats walking the tree.
constexpr std::size_t kLinearScanLimit = 128;

double box_squared_distance(const Vec3& q, const Vec3& lo, const Vec3& hi) {
  // Same operation order as the distance kernels, so the bound never exceeds
  // the computed distance of any point inside the box.
  double d[3];
  for (int c = 0; c < 3; ++c) {
    if (q[c] < lo[c]) d[c] = lo[c] - q[c];
    else if (q[c] > hi[c]) d[c] = q[c] - hi[c];
    else d[c] = 0.0;
  }
  double s = d[0] * d[0];
  s = s + d[1] * d[1];
  s = s + d[2] * d[2];
  return s;
}

struct Candidate {
  double d2;
  std::uint32_t slot;
};

}  // namespace

SpatialIndex::SpatialIndex(std::span<const Vec3> positions) : SpatialIndex(positions, simd::active_kernels()) {}

SpatialIndex::SpatialIndex(std::span<const Vec3> positions, const simd::KernelTable& kernels)
    : positions_(positions.begin(), positions.end()), kernels_(&kernels) {
  if (positions_.empty()) throw InputError("spatial index needs at least one position");
  if (positions_.size() > std::numeric_limits<std::uint32_t>::max()) throw InputError("too many positions");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!positions_[i].allFinite()) throw InputError("position " + std::to_string(i) + " is not finite");
  }
  slots_.resize(positions_.size());
  std::iota(slots_.begin(), slots_.end(), std::uint32_t{0});
  nodes_.reserve(2 * positions_.size() / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(slots_.size()));

  xs_.resize(slots_.size());
  ys_.resize(slots_.size());
  zs_.resize(slots_.size());
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const Vec3& p = positions_[slots_[s]];
    xs_[s] = p.x();
    ys_[s] = p.y();
    zs_[s] = p.z();
  }
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = positions_[slots_[begin]];
  node.hi = node.lo;
  for (std::uint32_t s = begin + 1; s < end; ++s) {
    node.lo = node.lo.cwiseMin(positions_[slots_[s]]);
    node.hi = node.hi.cwiseMax(positions_[slots_[s]]);
  }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  const Vec3 extent = node.hi - node.lo;
  if (extent.y() > extent[axis]) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;
  if (extent[axis] == 0.0) return id;  // all coincident: keep as one leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(slots_.begin() + begin, slots_.begin() + mid, slots_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = positions_[a][axis];
                     const double pb = positions_[b][axis];
                     return pa != pb ? pa < pb : a < b;
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

NeighborList SpatialIndex::knn(const Vec3& query, std::size_t k, std::optional<std::size_t> exclude) const {
  NeighborList out;
  knn(query, k, exclude, out);
  return out;
}

void SpatialIndex::knn(const Vec3& query, std::size_t k, std::optional<std::size_t> exclude, NeighborList& out) const {
  out.clear();
  if (k == 0) return;

  const std::uint32_t excluded =
      exclude && *exclude < positions_.size() ? static_cast<std::uint32_t>(*exclude) : std::numeric_limits<std::uint32_t>::max();

  // Strict total order: distance, then position, then original index.
  auto before = [&](const Candidate& a, const Candidate& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (xs_[a.slot] != xs_[b.slot]) return xs_[a.slot] < xs_[b.slot];
    if (ys_[a.slot] != ys_[b.slot]) return ys_[a.slot] < ys_[b.slot];
    if (zs_[a.slot] != zs_[b.slot]) return zs_[a.slot] < zs_[b.slot];
    return slots_[a.slot] < slots_[b.slot];
  };

  thread_local std::vector<Candidate> scratch;
  std::vector<Candidate>& best = scratch;  // kept sorted by `before`
  best.clear();
  auto offer = [&](const Candidate& c) {
    if (best.size() == k && !before(c, best.back())) return;
    best.insert(std::upper_bound(best.begin(), best.end(), c, before), c);
    if (best.size() > k) best.pop_back();
  };

  if (positions_.size() <= kLinearScanLimit) {
    thread_local std::vector<double> d2_scratch, order_scratch;
    std::vector<double>& d2 = d2_scratch;
    std::vector<double>& sorted = order_scratch;
    const auto n = static_cast<std::uint32_t>(positions_.size());
    d2.resize(n);
    kernels_->squared_distances(query.x(), query.y(), query.z(), xs_.data(), ys_.data(), zs_.data(), n, d2.data());
    // k-th smallest distance first, then only candidates at or below it go
    // through the full tie-breaking order.
    sorted.clear();
    for (std::uint32_t slot = 0; slot < n; ++slot) {
      if (slots_[slot] != excluded) sorted.push_back(d2[slot]);
    }
    if (!sorted.empty()) {
      const std::size_t kth = std::min(k, sorted.size()) - 1;
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(kth), sorted.end());
      const double limit = sorted[kth];
      for (std::uint32_t slot = 0; slot < n; ++slot) {
        if (d2[slot] <= limit && slots_[slot] != excluded) best.push_back({d2[slot], slot});
      }
      std::sort(best.begin(), best.end(), before);
      if (best.size() > k) best.resize(k);
    }
  } else {
    double d2_buffer[kLeafSize];
    auto scan_leaf = [&](const Node& node) {
      const std::uint32_t n = node.end - node.begin;
      // Coincident leaves may exceed kLeafSize; handle them in chunks.
      for (std::uint32_t offset = 0; offset < n; offset += kLeafSize) {
        const std::uint32_t chunk = std::min(kLeafSize, n - offset);
        const std::uint32_t base = node.begin + offset;
        kernels_->squared_distances(query.x(), query.y(), query.z(), xs_.data() + base, ys_.data() + base,
                                    zs_.data() + base, chunk, d2_buffer);
        for (std::uint32_t j = 0; j < chunk; ++j) {
          const std::uint32_t slot = base + j;
          if (slots_[slot] != excluded) offer({d2_buffer[j], slot});
        }
      }
    };

    auto visit = [&](auto&& self, std::int32_t id) -> void {
      const Node& node = nodes_[id];
      if (node.left < 0) {
        scan_leaf(node);
        return;
      }
      const Node& l = nodes_[node.left];
      const Node& r = nodes_[node.right];
      const double dl = box_squared_distance(query, l.lo, l.hi);
      const double dr = box_squared_distance(query, r.lo, r.hi);
      const std::int32_t first = dl <= dr ? node.left : node.right;
      const std::int32_t second = dl <= dr ? node.right : node.left;
      const double d_second = dl <= dr ? dr : dl;
      self(self, first);
      // `<=`, not `<`: a box at exactly the current worst distance can still
      // hold a point that wins the positional tie-break.
      if (best.size() < k || d_second <= best.back().d2) self(self, second);
    };
    visit(visit, 0);
  }

  out.indices.reserve(best.size());
  out.distances.reserve(best.size());
  for (const auto& c : best) {
    out.indices.push_back(slots_[c.slot]);
    out.distances.push_back(std::sqrt(c.d2));
  }
}

std::vector<std::size_t> farthest_point_sampling(std::span<const Vec3> positions, std::size_t count) {
  const std::size_t n = positions.size();
  if (count == 0) return {};
  if (count > n) {
    throw InputError("cannot sample " + std::to_string(count) + " seeds from " + std::to_string(n) + " points");
  }
  const auto& kernels = simd::active_kernels();

  std::vector<double> xs(n), ys(n), zs(n);
  Vec3 centroid = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = positions[i].x();
    ys[i] = positions[i].y();
    zs[i] = positions[i].z();
    centroid += positions[i];
  }
  centroid /= static_cast<double>(n);

  std::vector<char> chosen(n, 0);
  // Largest value among unchosen points; ties to lexicographic position, then index.
  auto pick = [&](const std::vector<double>& score) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      if (best == n || score[i] > score[best] ||
          (score[i] == score[best] && lex_less(positions[i], positions[best]))) {
        best = i;
      }
    }
    return best;
  };

  std::vector<double> min_d2(n);
  kernels.squared_distances(centroid.x(), centroid.y(), centroid.z(), xs.data(), ys.data(), zs.data(), n,
                            min_d2.data());
  std::vector<std::size_t> seeds;
  seeds.reserve(count);
  std::size_t next = pick(min_d2);
  std::fill(min_d2.begin(), min_d2.end(), std::numeric_limits<double>::infinity());
  for (;;) {
    seeds.push_back(next);
    chosen[next] = 1;
    if (seeds.size() == count) break;
    const Vec3& s = positions[next];
    const double farthest =
        kernels.update_min_distances(s.x(), s.y(), s.z(), xs.data(), ys.data(), zs.data(), n, min_d2.data());
    next = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i] && min_d2[i] == farthest && (next == n || lex_less(positions[i], positions[next]))) next = i;
    }
    if (next == n) next = pick(min_d2);
  }
  return seeds;
}

std::vector<std::size_t> random_sampling(std::span<const Vec3> positions, std::size_t count, std::uint64_t rng_seed) {
  const std::size_t n = positions.size();
  if (count > n) {
    throw InputError("cannot sample " + std::to_string(count) + " seeds from " + std::to_string(n) + " points");
  }
  Rng rng(rng_seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) std::swap(order[i], order[i + rng.below(n - i)]);
  order.resize(count);
  return order;
}

}  // namespace tcdm
