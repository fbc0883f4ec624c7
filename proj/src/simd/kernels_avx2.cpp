// Compiled with -mavx2 only; never called unless the CPU reports AVX2.

#include <algorithm>
#include <limits>

#include <immintrin.h>

#include <tcdm/simd/kernels.hpp>

namespace tcdm::simd {
namespace {

inline __m256d squared_distance4(__m256d qx, __m256d qy, __m256d qz, const double* xs, const double* ys,
                                 const double* zs) {
  const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs), qx);
  const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys), qy);
  const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs), qz);
  __m256d d = _mm256_mul_pd(dx, dx);
  d = _mm256_add_pd(d, _mm256_mul_pd(dy, dy));
  d = _mm256_add_pd(d, _mm256_mul_pd(dz, dz));
  return d;
}

inline double squared_distance1(double qx, double qy, double qz, double x, double y, double z) {
  const double dx = x - qx;
  const double dy = y - qy;
  const double dz = z - qz;
  double d = dx * dx;
  d = d + dy * dy;
  d = d + dz * dz;
  return d;
}

void squared_distances(double qx, double qy, double qz, const double* xs, const double* ys, const double* zs,
                       std::size_t n, double* out) {
  const __m256d vx = _mm256_set1_pd(qx);
  const __m256d vy = _mm256_set1_pd(qy);
  const __m256d vz = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, squared_distance4(vx, vy, vz, xs + i, ys + i, zs + i));
  for (; i < n; ++i) out[i] = squared_distance1(qx, qy, qz, xs[i], ys[i], zs[i]);
}

double update_min_distances(double qx, double qy, double qz, const double* xs, const double* ys, const double* zs,
                            std::size_t n, double* min_d2) {
  const __m256d vx = _mm256_set1_pd(qx);
  const __m256d vy = _mm256_set1_pd(qy);
  const __m256d vz = _mm256_set1_pd(qz);
  __m256d vbest = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = squared_distance4(vx, vy, vz, xs + i, ys + i, zs + i);
    const __m256d m = _mm256_min_pd(d, _mm256_loadu_pd(min_d2 + i));
    _mm256_storeu_pd(min_d2 + i, m);
    vbest = _mm256_max_pd(m, vbest);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vbest);
  double best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    const double d = squared_distance1(qx, qy, qz, xs[i], ys[i], zs[i]);
    const double m = d < min_d2[i] ? d : min_d2[i];
    min_d2[i] = m;
    best = m > best ? m : best;
  }
  return best;
}

// Accumulates one 4x4 tile of the Gram matrix in registers over all rows.
// Each element still sees its products added in increasing row order.
inline void gram_tile4x4(const double* rows, std::size_t n, std::size_t m, std::size_t a0, std::size_t b0,
                         double* gram) {
  __m256d acc0 = _mm256_loadu_pd(gram + (a0 + 0) * m + b0);
  __m256d acc1 = _mm256_loadu_pd(gram + (a0 + 1) * m + b0);
  __m256d acc2 = _mm256_loadu_pd(gram + (a0 + 2) * m + b0);
  __m256d acc3 = _mm256_loadu_pd(gram + (a0 + 3) * m + b0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows + i * m;
    const __m256d rb = _mm256_loadu_pd(r + b0);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_broadcast_sd(r + a0 + 0), rb));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_broadcast_sd(r + a0 + 1), rb));
    acc2 = _mm256_add_pd(acc2, _mm256_mul_pd(_mm256_broadcast_sd(r + a0 + 2), rb));
    acc3 = _mm256_add_pd(acc3, _mm256_mul_pd(_mm256_broadcast_sd(r + a0 + 3), rb));
  }
  // Lanes below the diagonal are computed but only the upper part is kept.
  alignas(32) double lanes[4][4];
  _mm256_store_pd(lanes[0], acc0);
  _mm256_store_pd(lanes[1], acc1);
  _mm256_store_pd(lanes[2], acc2);
  _mm256_store_pd(lanes[3], acc3);
  for (std::size_t da = 0; da < 4; ++da) {
    for (std::size_t db = 0; db < 4; ++db) {
      if (b0 + db >= a0 + da) gram[(a0 + da) * m + b0 + db] = lanes[da][db];
    }
  }
}

inline void gram_element(const double* rows, std::size_t n, std::size_t m, std::size_t a, std::size_t b,
                         double* gram) {
  double g = gram[a * m + b];
  for (std::size_t i = 0; i < n; ++i) g = g + rows[i * m + a] * rows[i * m + b];
  gram[a * m + b] = g;
}

void gram_upper(const double* rows, std::size_t n, std::size_t m, double* gram) {
  const std::size_t full = m - m % 4;
  for (std::size_t a0 = 0; a0 < full; a0 += 4) {
    for (std::size_t b0 = a0; b0 < full; b0 += 4) gram_tile4x4(rows, n, m, a0, b0, gram);
    for (std::size_t a = a0; a < a0 + 4; ++a) {
      for (std::size_t b = full; b < m; ++b) gram_element(rows, n, m, a, b, gram);
    }
  }
  for (std::size_t a = full; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) gram_element(rows, n, m, a, b, gram);
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", &squared_distances, &update_min_distances, &gram_upper};
  return table;
}

}  // namespace tcdm::simd
