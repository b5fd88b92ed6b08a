#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "kernels_impl.hpp"
#include "mlqmc/kernels.hpp"

namespace mlqmc::kernels {

namespace {

constexpr KernelTable kScalar{Isa::kScalar, &detail::gaussian_exponents_scalar,
                              &detail::sum_exp_shifted_scalar, &detail::max_scalar};
#if defined(MLQMC_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::kAvx2, &detail::gaussian_exponents_avx2,
                            &detail::sum_exp_shifted_avx2, &detail::max_avx2};
#endif

Isa default_isa() {
  if (std::getenv("MLQMC_FORCE_SCALAR") != nullptr) return Isa::kScalar;
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(default_isa())};
  return slot;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(MLQMC_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::runtime_error("kernel ISA " + std::string(isa_name(isa)) + " not supported");
  }
#if defined(MLQMC_HAVE_AVX2)
  if (isa == Isa::kAvx2) return kAvx2;
#endif
  return kScalar;
}

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

Isa active_isa() { return active_slot().load()->isa; }
void set_active_isa(Isa isa) { active_slot().store(&table(isa)); }
const KernelTable& active() { return *active_slot().load(); }

void gaussian_exponents(std::span<const double> centre, const double* cols, std::size_t stride,
                        std::size_t count, double scale, std::span<double> out) {
  if (out.size() < count || count > stride) {
    throw std::invalid_argument("gaussian_exponents: buffer too small");
  }
  active().gaussian_exponents(centre.data(), centre.size(), cols, stride, count, scale,
                              out.data());
}

double log_mean_exp(const KernelTable& k, std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("log_mean_exp: empty input");
  const double m = k.max(v.data(), v.size());
  if (!std::isfinite(m)) return m;
  const double s = k.sum_exp_shifted(v.data(), v.size(), m);
  return m + std::log(s / static_cast<double>(v.size()));
}

double log_mean_exp(std::span<const double> v) { return log_mean_exp(active(), v); }

}  // namespace mlqmc::kernels
