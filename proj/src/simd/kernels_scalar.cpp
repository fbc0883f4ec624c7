#include <limits>

#include <tcdm/simd/kernels.hpp>

namespace tcdm::simd {
namespace {

void squared_distances(double qx, double qy, double qz, const double* xs, const double* ys, const double* zs,
                       std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    double d = dx * dx;
    d = d + dy * dy;
    d = d + dz * dz;
    out[i] = d;
  }
}

double update_min_distances(double qx, double qy, double qz, const double* xs, const double* ys, const double* zs,
                            std::size_t n, double* min_d2) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    double d = dx * dx;
    d = d + dy * dy;
    d = d + dz * dz;
    const double m = d < min_d2[i] ? d : min_d2[i];
    min_d2[i] = m;
    best = m > best ? m : best;
  }
  return best;
}

void gram_upper(const double* rows, std::size_t n, std::size_t m, double* gram) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows + i * m;
    for (std::size_t a = 0; a < m; ++a) {
      const double ra = r[a];
      double* g = gram + a * m;
      for (std::size_t b = a; b < m; ++b) g[b] = g[b] + ra * r[b];
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &squared_distances, &update_min_distances, &gram_upper};
  return table;
}

}  // namespace tcdm::simd
