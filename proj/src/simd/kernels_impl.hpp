#pragma once

#include <cstddef>

namespace multivaw::simd::detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void rot_scalar(double* x, double* y, std::size_t n, double c, double s);
void scal_scalar(double alpha, double* x, std::size_t n);

#if defined(MULTIVAW_HAVE_AVX2)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void rot_avx2(double* x, double* y, std::size_t n, double c, double s);
void scal_avx2(double alpha, double* x, std::size_t n);
#endif

}  // namespace multivaw::simd::detail
