#pragma once

#include <cstddef>

namespace mlqmc::kernels::detail {

void gaussian_exponents_scalar(const double* centre, std::size_t width, const double* cols,
                               std::size_t stride, std::size_t count, double scale, double* out);
double sum_exp_shifted_scalar(const double* v, std::size_t n, double shift);
double max_scalar(const double* v, std::size_t n);

#if defined(MLQMC_HAVE_AVX2)
void gaussian_exponents_avx2(const double* centre, std::size_t width, const double* cols,
                             std::size_t stride, std::size_t count, double scale, double* out);
double sum_exp_shifted_avx2(const double* v, std::size_t n, double shift);
double max_avx2(const double* v, std::size_t n);
#endif

}  // namespace mlqmc::kernels::detail
