#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include <tcdm/rng.hpp>
#include <tcdm/simd/kernels.hpp>

using namespace tcdm;

namespace {

std::vector<double> random_values(std::size_t n, Rng& rng, double scale) {
  std::vector<double> v(n);
  for (auto& x : v) x = (rng.uniform() - 0.5) * scale;
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels are always present and first") {
  const auto tables = simd::available_kernels();
  REQUIRE_FALSE(tables.empty());
  CHECK(tables.front()->name == "scalar");
  CHECK_FALSE(simd::active_kernels().name.empty());
}

TEST_CASE("squared distances agree bit for bit across variants") {
  const auto& ref = simd::scalar_kernels();
  Rng rng(1);
  for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 31, 64, 1001}) {
    const auto xs = random_values(n, rng, 1e3), ys = random_values(n, rng, 1e-2), zs = random_values(n, rng, 1e6);
    std::vector<double> expect(n), got(n);
    ref.squared_distances(0.25, -3.5, 1e5, xs.data(), ys.data(), zs.data(), n, expect.data());
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = xs[i] - 0.25, dy = ys[i] + 3.5, dz = zs[i] - 1e5;
      const double oracle = dx * dx + dy * dy + dz * dz;
      CHECK(expect[i] == oracle);
    }
    for (const auto* table : simd::available_kernels()) {
      std::fill(got.begin(), got.end(), -1.0);
      table->squared_distances(0.25, -3.5, 1e5, xs.data(), ys.data(), zs.data(), n, got.data());
      CHECK_MESSAGE(same_bits(expect, got), table->name, " n=", n);
    }
  }
}

TEST_CASE("min-distance update agrees bit for bit across variants") {
  const auto& ref = simd::scalar_kernels();
  Rng rng(2);
  for (std::size_t n : {0, 1, 2, 5, 9, 16, 17, 333}) {
    const auto xs = random_values(n, rng, 10), ys = random_values(n, rng, 10), zs = random_values(n, rng, 10);
    std::vector<double> start(n);
    for (auto& v : start) v = rng.uniform() * 30;
    if (n > 2) start[1] = std::numeric_limits<double>::infinity();

    auto expect = start;
    const double expect_max = ref.update_min_distances(1, 2, 3, xs.data(), ys.data(), zs.data(), n, expect.data());
    if (n == 0) CHECK(expect_max == -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = xs[i] - 1, dy = ys[i] - 2, dz = zs[i] - 3;
      CHECK(expect[i] == std::min(start[i], dx * dx + dy * dy + dz * dz));
    }
    for (const auto* table : simd::available_kernels()) {
      auto got = start;
      const double got_max = table->update_min_distances(1, 2, 3, xs.data(), ys.data(), zs.data(), n, got.data());
      CHECK(same_bits(expect, got));
      CHECK(std::memcmp(&expect_max, &got_max, sizeof(double)) == 0);
    }
  }
}

TEST_CASE("gram accumulation agrees bit for bit across variants") {
  const auto& ref = simd::scalar_kernels();
  Rng rng(3);
  for (std::size_t m : {1, 3, 4, 6, 7, 60, 61}) {
    for (std::size_t n : {0, 1, 2, 25}) {
      const auto rows = random_values(n * m, rng, 4);
      std::vector<double> expect(m * m, 0.5);
      ref.gram_upper(rows.data(), n, m, expect.data());
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          double oracle = 0.5;
          if (b >= a) {
            for (std::size_t i = 0; i < n; ++i) oracle += rows[i * m + a] * rows[i * m + b];
          }
          CHECK(expect[a * m + b] == oracle);
        }
      }
      for (const auto* table : simd::available_kernels()) {
        std::vector<double> got(m * m, 0.5);
        table->gram_upper(rows.data(), n, m, got.data());
        CHECK_MESSAGE(same_bits(expect, got), table->name, " m=", m, " n=", n);
      }
    }
  }
}
