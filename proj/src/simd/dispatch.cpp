#include "multivaw/simd/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace multivaw::simd {

namespace {

constexpr KernelTable kScalar{"scalar", &detail::dot_scalar, &detail::axpy_scalar,
                              &detail::rot_scalar, &detail::scal_scalar};

#if defined(MULTIVAW_HAVE_AVX2)
constexpr KernelTable kAvx2{"avx2", &detail::dot_avx2, &detail::axpy_avx2, &detail::rot_avx2,
                            &detail::scal_avx2};

bool cpu_has_avx2_fma() {
#if defined(__GNUC__) || defined(__clang__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

const KernelTable& select() {
  const char* forced = std::getenv("MULTIVAW_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return kScalar;
  if (const KernelTable* avx2 = avx2_kernels()) return *avx2;
  return kScalar;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

const KernelTable* avx2_kernels() noexcept {
#if defined(MULTIVAW_HAVE_AVX2)
  static const bool supported = cpu_has_avx2_fma();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace multivaw::simd
