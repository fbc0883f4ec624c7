#include <cstdlib>
#include <string>
#include <string_view>

#include <tcdm/error.hpp>
#include <tcdm/simd/kernels.hpp>

namespace tcdm::simd {

#if defined(TCDM_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(TCDM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const auto* avx2 = avx2_kernels()) out.push_back(avx2);
  return out;
}

namespace {

const KernelTable& select_kernels() {
  const char* forced = std::getenv("TCDM_SIMD");
  if (forced != nullptr && *forced != '\0') {
    const std::string_view name(forced);
    for (const auto* table : available_kernels()) {
      if (table->name == name) return *table;
    }
    throw InputError("TCDM_SIMD=" + std::string(name) + " is not available on this machine");
  }
  const auto tables = available_kernels();
  return *tables.back();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select_kernels();
  return table;
}

}  // namespace tcdm::simd
