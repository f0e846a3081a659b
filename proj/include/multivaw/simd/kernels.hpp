#pragma once

#include <cstddef>
#include <string_view>

// Dense inner-loop kernels. Every routine has a portable scalar reference
// implementation; an AVX2/FMA variant is compiled into its own translation
// unit and chosen at runtime when the CPU supports it. Results of the two
// variants agree to rounding, not bit-for-bit (different summation order),
// but each variant is deterministic for a fixed input.
//
// Set MULTIVAW_SIMD=scalar in the environment to force the reference path.

namespace multivaw::simd {

struct KernelTable {
  std::string_view name;
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rot)(double* x, double* y, std::size_t n, double c, double s);
  /// x *= alpha
  void (*scal)(double alpha, double* x, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels() noexcept;

/// Kernel table used by the linear-algebra layer. Selected once per process.
const KernelTable& active() noexcept;

}  // namespace multivaw::simd
