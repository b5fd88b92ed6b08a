#include <cmath>
#include <stdexcept>

#include "mlqmc/fem.hpp"

namespace mlqmc::fem {

double TrigForcing::operator()(double x) const {
  return theta[0] * std::sin(4.0 * x) + theta[1] * std::cos(4.0 * x) +
         theta[2] * std::sin(8.0 * x) + theta[3] * std::cos(8.0 * x);
}

FemSolution::FemSolution(double h, std::size_t n_elements, std::vector<double> nodal_values)
    : h_(h), n_elements_(n_elements), nodal_(std::move(nodal_values)) {
  if (n_elements == 0 || nodal_.size() + 1 != n_elements) {
    throw std::invalid_argument("FemSolution: nodal count must be n_elements - 1");
  }
}

std::size_t element_count(double h) {
  if (!std::isfinite(h) || !(h > 0.0) || h > 1.0) {
    throw std::invalid_argument("fem: mesh parameter h must lie in (0, 1]");
  }
  // Guard against 1/h landing a rounding step above an integer.
  const double inv = 1.0 / h;
  const double r = std::round(inv);
  return static_cast<std::size_t>(std::abs(inv - r) <= 1e-9 * r ? r : std::ceil(inv));
}

FemSolution solve(const TrigForcing& forcing, double h) {
  const std::size_t n = element_count(h);
  const std::size_t k = n - 1;
  std::vector<double> u(k);
  if (k == 0) return FemSolution(h, n, std::move(u));
  const double dx = 1.0 / static_cast<double>(n);

  // Stiffness (1/dx) tridiag(-1, 2, -1) with a nodal (lumped) load dx * psi(x_i).
  // Thomas elimination; the constant off-diagonal keeps the sweep to one array.
  std::vector<double> c(k);
  const double inv_dx = 1.0 / dx;
  double denom = 2.0 * inv_dx;
  c[0] = -inv_dx / denom;
  u[0] = dx * forcing(dx) / denom;
  for (std::size_t i = 1; i < k; ++i) {
    denom = 2.0 * inv_dx + inv_dx * c[i - 1];
    c[i] = -inv_dx / denom;
    u[i] = (dx * forcing(static_cast<double>(i + 1) * dx) + inv_dx * u[i - 1]) / denom;
  }
  for (std::size_t i = k - 1; i-- > 0;) u[i] -= c[i] * u[i + 1];
  return FemSolution(h, n, std::move(u));
}

double evaluate(const FemSolution& sol, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("fem::evaluate: x outside [0,1]");
  const std::size_t n = sol.n_elements();
  const double t = x * static_cast<double>(n);
  std::size_t e = static_cast<std::size_t>(std::floor(t));
  if (e >= n) e = n - 1;
  const double w = t - static_cast<double>(e);
  const auto node = [&](std::size_t i) {
    return (i == 0 || i == n) ? 0.0 : sol.nodal_values()[i - 1];
  };
  if (w == 0.0) return node(e);
  return (1.0 - w) * node(e) + w * node(e + 1);
}

double exact_solution(const TrigForcing& f, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("fem::exact_solution: x outside [0,1]");
  double u = 0.0;
  const double ks[2] = {4.0, 8.0};
  for (int i = 0; i < 2; ++i) {
    const double k = ks[i];
    const double ts = f.theta[2 * i];
    const double tc = f.theta[2 * i + 1];
    u += ts * (std::sin(k * x) - x * std::sin(k)) / (k * k);
    u += tc * (std::cos(k * x) - 1.0 - x * (std::cos(k) - 1.0)) / (k * k);
  }
  return u;
}

}  // namespace mlqmc::fem
