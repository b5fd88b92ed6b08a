#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace mlqmc::kernels {

enum class Isa { kScalar, kAvx2 };

// out[m] = -scale * sum_j (centre[j] - cols[j * stride + m])^2 for m < count.
using GaussianExponentsFn = void (*)(const double* centre, std::size_t width, const double* cols,
                                     std::size_t stride, std::size_t count, double scale,
                                     double* out);
// sum_i exp(v[i] - shift)
using SumExpShiftedFn = double (*)(const double* v, std::size_t n, double shift);
// max_i v[i], n >= 1
using MaxFn = double (*)(const double* v, std::size_t n);

struct KernelTable {
  Isa isa;
  GaussianExponentsFn gaussian_exponents;
  SumExpShiftedFn sum_exp_shifted;
  MaxFn max;
};

bool isa_supported(Isa isa);
const KernelTable& table(Isa isa);  // throws if unsupported on this CPU
std::string_view isa_name(Isa isa);

// Process-wide selection. Defaults to the best supported ISA unless
// MLQMC_FORCE_SCALAR is set in the environment.
Isa active_isa();
void set_active_isa(Isa isa);
const KernelTable& active();

void gaussian_exponents(std::span<const double> centre, const double* cols, std::size_t stride,
                        std::size_t count, double scale, std::span<double> out);
double log_mean_exp(std::span<const double> values);
double log_mean_exp(const KernelTable& k, std::span<const double> values);

}  // namespace mlqmc::kernels
