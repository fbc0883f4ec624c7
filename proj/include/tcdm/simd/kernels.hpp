#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace tcdm::simd {

/// Data-parallel inner loops of the metric.
///
/// Every variant performs the same IEEE operations per output element in the
/// same order (no fused multiply-add, no reassociation), so all tables are
/// bit-for-bit interchangeable. The equivalence tests hold them to that.
struct KernelTable {
  std::string_view name;

  /// out[i] = (xs[i]-qx)^2 + (ys[i]-qy)^2 + (zs[i]-qz)^2, summed x, y, z in order.
  void (*squared_distances)(double qx, double qy, double qz, const double* xs, const double* ys, const double* zs,
                            std::size_t n, double* out);

  /// min_d2[i] = min(min_d2[i], squared distance of point i to q); returns
  /// the largest updated value (or -inf when n == 0).
  double (*update_min_distances)(double qx, double qy, double qz, const double* xs, const double* ys,
                                 const double* zs, std::size_t n, double* min_d2);

  /// gram[a*m + b] += sum_i rows[i*m + a] * rows[i*m + b] for all b >= a,
  /// accumulated in increasing i. `rows` is n-by-m row-major. Entries below
  /// the diagonal are left untouched.
  void (*gram_upper)(const double* rows, std::size_t n, std::size_t m, double* gram);
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the running CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Every table usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

/// Table used by the metric. Picks the widest supported variant unless the
/// TCDM_SIMD environment variable names one ("scalar", "avx2").
const KernelTable& active_kernels();

}  // namespace tcdm::simd
