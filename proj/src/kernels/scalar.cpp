#include <cmath>

#include "kernels_impl.hpp"

namespace mlqmc::kernels::detail {

void gaussian_exponents_scalar(const double* centre, std::size_t width, const double* cols,
                               std::size_t stride, std::size_t count, double scale, double* out) {
  for (std::size_t m = 0; m < count; ++m) out[m] = 0.0;
  for (std::size_t j = 0; j < width; ++j) {
    const double c = centre[j];
    const double* col = cols + j * stride;
    for (std::size_t m = 0; m < count; ++m) {
      const double d = c - col[m];
      out[m] = std::fma(d, d, out[m]);
    }
  }
  for (std::size_t m = 0; m < count; ++m) out[m] *= -scale;
}

double sum_exp_shifted_scalar(const double* v, std::size_t n, double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - shift);
  return s;
}

double max_scalar(const double* v, std::size_t n) {
  double m = v[0];
  for (std::size_t i = 1; i < n; ++i) m = v[i] > m ? v[i] : m;
  return m;
}

}  // namespace mlqmc::kernels::detail
