#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mlqmc/allocation.hpp"
#include "mlqmc/models.hpp"

namespace mlqmc {

struct ReferenceValue {
  double value = 0.0;
  std::string method;
  double error_bound = 0.0;
};

// Gauss-Legendre nodes and weights on [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n, double a = -1.0,
                                                                   double b = 1.0);

// One-dimensional EIG term of the linear model with noise variance sigma2.
double eig_linear_1d(double sigma2, std::size_t n_quad);
ReferenceValue eig_linear_reference(const LinearGaussianModel& model, std::size_t n_quad = 128);

// Mean of n_runs MLDLQMC estimates (S = R = 1) at tol_ref on the exact model.
ReferenceValue eig_poisson_reference(const PoissonEigModel& model, double tol_ref,
                                     std::size_t n_runs, const RateConstants& exact_constants,
                                     std::size_t M0, std::uint64_t seed, unsigned threads = 1);

}  // namespace mlqmc
