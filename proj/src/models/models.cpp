#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mlqmc/fem.hpp"
#include "mlqmc/kernels.hpp"
#include "mlqmc/models.hpp"

namespace mlqmc {

Resolution Resolution::mesh(double h) {
  if (!std::isfinite(h) || !(h > 0.0) || h > 1.0) {
    throw std::invalid_argument("mesh parameter h must lie in (0, 1]");
  }
  return Resolution(h);
}

double Resolution::h() const {
  if (is_exact()) throw std::logic_error("exact resolution has no mesh parameter");
  return h_;
}

double Resolution::cost_factor(double gamma) const {
  return is_exact() ? 1.0 : std::pow(h_, -gamma);
}

std::string Resolution::str() const {
  if (is_exact()) return "exact";
  std::ostringstream os;
  os.precision(17);
  os << h_;
  return os.str();
}

double outer_map_value(OuterMap map, double log_mean) {
  return map == OuterMap::kNegLog ? -log_mean : std::exp(log_mean);
}

double apply_outer_map(OuterMap map, std::span<const double> log_g) {
  return outer_map_value(map, kernels::log_mean_exp(log_g));
}

double outer_map_curvature(OuterMap map) { return map == OuterMap::kNegLog ? 1.0 : 0.0; }

EigModel::EigModel(std::size_t d_theta, std::size_t d_y, double sigma2)
    : d_theta_(d_theta), d_y_(d_y), sigma2_(sigma2) {
  if (d_theta == 0 || d_y == 0) throw std::invalid_argument("EigModel: dimensions must be >= 1");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("EigModel: sigma2 must be positive");
  }
}

void EigModel::set_truncation(std::optional<double> radius) {
  if (radius && !(*radius > 0.0)) throw std::invalid_argument("truncation radius must be > 0");
  radius_ = radius;
}

std::pair<std::vector<double>, std::vector<double>> EigModel::split_outer(
    std::span<const double> y) const {
  if (y.size() != outer_dim()) throw std::invalid_argument("split_outer: dimension mismatch");
  std::vector<double> theta(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(d_theta_));
  std::vector<double> noise(d_y_);
  const double sigma = std::sqrt(sigma2_);
  for (std::size_t i = 0; i < d_y_; ++i) {
    const double u = y[d_theta_ + i];
    noise[i] = sigma * (radius_ ? truncated_inverse_normal_cdf(u, *radius_) : inverse_normal_cdf(u));
  }
  return {std::move(theta), std::move(noise)};
}

std::vector<double> EigModel::outer_state(std::span<const double> y, Resolution res) const {
  auto [theta, noise] = split_outer(y);
  std::vector<double> state = forward(theta, res);
  for (std::size_t i = 0; i < d_y_; ++i) state[i] += noise[i];
  return state;
}

double EigModel::outer_offset(std::span<const double> y) const {
  const auto noise = split_outer(y).second;
  double s = 0.0;
  for (double e : noise) s += e * e;
  return -0.5 * s / sigma2_;
}

void EigModel::log_g_block(std::span<const double> state, const InnerBlock& inner,
                           std::size_t count, std::span<double> out) const {
  if (state.size() != d_y_ || inner.width != d_y_ || count > inner.count) {
    throw std::invalid_argument("log_g_block: shape mismatch");
  }
  kernels::gaussian_exponents(state, inner.data.data(), inner.count, count, 0.5 / sigma2_, out);
}

double EigModel::log_g(std::span<const double> y, std::span<const double> x, Resolution res) const {
  if (x.size() != d_theta_) throw std::invalid_argument("log_g: inner dimension mismatch");
  const auto state = outer_state(y, res);
  const auto pred = forward(x, res);
  double s = 0.0;
  for (std::size_t i = 0; i < d_y_; ++i) s += (state[i] - pred[i]) * (state[i] - pred[i]);
  return -0.5 * s / sigma2_;
}

LinearGaussianModel::LinearGaussianModel(double sigma2, std::size_t dim)
    : EigModel(dim, dim, sigma2) {}

std::vector<double> LinearGaussianModel::forward(std::span<const double> theta,
                                                 Resolution /*res*/) const {
  if (theta.size() != d_theta()) throw std::invalid_argument("forward: dimension mismatch");
  return {theta.begin(), theta.end()};
}

InnerBlock LinearGaussianModel::inner_block(const PointSet& x, Resolution /*res*/) const {
  if (x.dim() != d_theta()) throw std::invalid_argument("inner_block: dimension mismatch");
  InnerBlock b{x.count(), d_y(), std::vector<double>(x.count() * d_y())};
  for (std::size_t m = 0; m < x.count(); ++m) {
    for (std::size_t j = 0; j < d_y(); ++j) b.data[j * b.count + m] = x(m, j);
  }
  return b;
}

PoissonEigModel::PoissonEigModel(double sigma2, std::array<double, 2> xi)
    : EigModel(4, 2, sigma2), xi_(xi) {
  for (double x : xi) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("observation points must lie in (0,1)");
  }
}

std::vector<double> PoissonEigModel::forward(std::span<const double> theta, Resolution res) const {
  if (theta.size() != 4) throw std::invalid_argument("forward: dimension mismatch");
  fem::TrigForcing f;
  for (int i = 0; i < 4; ++i) f.theta[i] = theta[i];
  if (res.is_exact()) return {fem::exact_solution(f, xi_[0]), fem::exact_solution(f, xi_[1])};
  const auto sol = fem::solve(f, res.h());
  return {fem::evaluate(sol, xi_[0]), fem::evaluate(sol, xi_[1])};
}

std::array<std::array<double, 4>, 2> PoissonEigModel::basis(Resolution res) const {
  const std::size_t key = res.is_exact() ? 0 : fem::element_count(res.h());
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::array<std::array<double, 4>, 2> B{};
  for (int i = 0; i < 4; ++i) {
    std::array<double, 4> e{};
    e[i] = 1.0;
    const auto r = forward(e, res);
    B[0][i] = r[0];
    B[1][i] = r[1];
  }
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(key, B).first->second;
}

InnerBlock PoissonEigModel::inner_block(const PointSet& x, Resolution res) const {
  if (x.dim() != 4) throw std::invalid_argument("inner_block: dimension mismatch");
  const auto B = basis(res);
  InnerBlock b{x.count(), 2, std::vector<double>(x.count() * 2)};
  for (std::size_t m = 0; m < x.count(); ++m) {
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < 4; ++i) s += B[j][i] * x(m, i);
      b.data[j * b.count + m] = s;
    }
  }
  return b;
}

std::vector<double> PoissonEigModel::outer_state(std::span<const double> y, Resolution res) const {
  auto [theta, noise] = split_outer(y);
  const auto B = basis(res);
  std::vector<double> state(2);
  for (std::size_t j = 0; j < 2; ++j) {
    double s = noise[j];
    double g = 0.0;
    for (std::size_t i = 0; i < 4; ++i) g += B[j][i] * theta[i];
    state[j] = g + s;
  }
  return state;
}

}  // namespace mlqmc
