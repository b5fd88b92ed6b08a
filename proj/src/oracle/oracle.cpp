#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mlqmc/estimators.hpp"
#include "mlqmc/oracle.hpp"
#include "mlqmc/stats.hpp"

namespace mlqmc {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n, double a,
                                                                   double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::vector<double> x(n), w(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(k) - 1.0) * z * p1 - (static_cast<double>(k) - 1.0) * p2) /
             static_cast<double>(k);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * static_cast<double>(k) - 1.0) * z * p1 - (static_cast<double>(k) - 1.0) * p2) /
           static_cast<double>(k);
    }
    dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = mid - half * z;
    x[n - 1 - i] = mid + half * z;
    w[i] = w[n - 1 - i] = half * wi;
  }
  return {x, w};
}

namespace {

// log of erf(b) - erf(a) for a < b, evaluated through erfc in the tails.
double log_erf_diff(double a, double b) {
  if (a >= 0.0) {
    const double ea = std::erfc(a), eb = std::erfc(b);
    return std::log(ea) + std::log1p(-eb / ea);
  }
  if (b <= 0.0) {
    const double ea = std::erfc(-a), eb = std::erfc(-b);
    return std::log(eb) + std::log1p(-ea / eb);
  }
  return std::log(std::erf(b) - std::erf(a));
}

}  // namespace

double eig_linear_1d(double sigma2, std::size_t n_quad) {
  if (n_quad < 16) throw std::invalid_argument("eig_linear_1d: n_quad must be >= 16");
  const double sigma = std::sqrt(sigma2);
  const auto [tx, tw] = gauss_legendre(n_quad, 0.0, 1.0);
  const auto [ex, ew] = gauss_legendre(n_quad, -8.0 * sigma, 8.0 * sigma);
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  const double s2 = sigma * std::numbers::sqrt2;
  const double log_pre = std::log(sigma * std::sqrt(0.5 * std::numbers::pi));
  double total = 0.0, mass = 0.0;
  for (std::size_t j = 0; j < n_quad; ++j) {
    const double eps = ex[j];
    const double wj = ew[j] * norm * std::exp(-0.5 * eps * eps / sigma2);
    mass += wj;
    double inner = 0.0;
    for (std::size_t i = 0; i < n_quad; ++i) {
      const double y = tx[i] + eps;
      const double log_z = log_pre + log_erf_diff((y - 1.0) / s2, y / s2);
      inner += tw[i] * (-0.5 * eps * eps / sigma2 - log_z);
    }
    total += wj * inner;
  }
  return total / mass;
}

ReferenceValue eig_linear_reference(const LinearGaussianModel& model, std::size_t n_quad) {
  const double d = static_cast<double>(model.d_theta());
  const double v1 = eig_linear_1d(model.sigma2(), n_quad);
  const double v2 = eig_linear_1d(model.sigma2(), 2 * n_quad);
  ReferenceValue ref;
  ref.value = d * v2;
  ref.method = "gauss-legendre-" + std::to_string(2 * n_quad) + "-separable";
  ref.error_bound = d * std::abs(v2 - v1) + 1e-14 * std::abs(ref.value);
  return ref;
}

ReferenceValue eig_poisson_reference(const PoissonEigModel& model, double tol_ref,
                                     std::size_t n_runs, const RateConstants& exact_constants,
                                     std::size_t M0, std::uint64_t seed, unsigned threads) {
  if (n_runs < 1) throw std::invalid_argument("eig_poisson_reference: n_runs must be >= 1");
  RateConstants c = exact_constants;
  c.c_w = 0.0;
  c.c_h2 = 0.0;
  c.gamma = 0.0;
  ScheduleShape shape;
  shape.M0 = M0;
  const AllocationPlan plan = allocate(tol_ref, c, shape);
  std::vector<double> runs(n_runs);
  for (std::size_t k = 0; k < n_runs; ++k) {
    RunConfig cfg;
    cfg.seed = seed + 0x9E3779B97F4A7C15ull * (k + 1);
    cfg.threads = threads;
    runs[k] = mldlqmc_estimate(model, plan.schedule, cfg).estimate;
  }
  const MeanVar mv = sample_mean_var(runs);
  ReferenceValue ref;
  ref.value = mv.mean;
  ref.method = "mldlqmc-exact-mean-of-" + std::to_string(n_runs);
  ref.error_bound = c.confidence.c_alpha() * std::sqrt(mv.variance / static_cast<double>(n_runs)) +
                    tol_ref;
  return ref;
}

}  // namespace mlqmc
