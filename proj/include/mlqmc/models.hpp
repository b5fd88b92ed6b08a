#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlqmc/lowdisc.hpp"
#include "mlqmc/stats.hpp"

namespace mlqmc {

// Mesh parameter of a discretized model, or exact evaluation.
class Resolution {
 public:
  static constexpr Resolution exact() { return Resolution(0.0); }
  static Resolution mesh(double h);

  bool is_exact() const { return h_ == 0.0; }
  double h() const;
  // h^{-gamma}, or 1 for exact evaluation.
  double cost_factor(double gamma) const;
  std::string str() const;
  bool operator==(const Resolution&) const = default;

 private:
  constexpr explicit Resolution(double h) : h_(h) {}
  double h_;
};

// Per-point inner features in structure-of-arrays layout: column j of point m
// is data[j * count + m]. Any prefix of the rows is again a valid block.
struct InnerBlock {
  std::size_t count = 0;
  std::size_t width = 0;
  std::vector<double> data;
  const double* column(std::size_t j) const { return data.data() + j * count; }
};

// Outer function f applied to the inner mean of g.
enum class OuterMap { kIdentity, kNegLog };

// Nested integral I = E_y[offset(y) + f(E_x[g_h(y, x)])] with log g supplied.
// log g(y, x) = log_g_block(outer_state(y), inner_block(x)) lets the expensive
// model parts be evaluated once per outer and once per inner point.
class NestedProblem {
 public:
  virtual ~NestedProblem() = default;

  virtual std::size_t outer_dim() const = 0;
  virtual std::size_t inner_dim() const = 0;
  virtual bool discretized() const { return false; }
  virtual double gamma() const { return 0.0; }
  virtual OuterMap outer_map() const { return OuterMap::kNegLog; }

  virtual InnerBlock inner_block(const PointSet& x, Resolution res) const = 0;
  virtual std::vector<double> outer_state(std::span<const double> y, Resolution res) const = 0;
  virtual double outer_offset(std::span<const double> /*y*/) const { return 0.0; }
  // out[m] = log g(y, x_m) for the first `count` rows of the block.
  virtual void log_g_block(std::span<const double> state, const InnerBlock& inner,
                           std::size_t count, std::span<double> out) const = 0;
};

// f(mean g) from log g values; f = -log uses log-mean-exp.
double apply_outer_map(OuterMap map, std::span<const double> log_g);
double outer_map_value(OuterMap map, double log_mean);
// f''(m) * m^2, the scale-free curvature used by bias_hat.
double outer_map_curvature(OuterMap map);

// EIG with uniform prior on [0,1]^{d_theta} and noise N(0, sigma2 I):
// y = (theta, u) with noise = sigma Phi^{-1}(u), Y = G_h(theta) + noise,
// log g = -|Y - G_h(x)|^2 / (2 sigma2), offset = -|noise|^2 / (2 sigma2).
class EigModel : public NestedProblem {
 public:
  EigModel(std::size_t d_theta, std::size_t d_y, double sigma2);

  std::size_t d_theta() const { return d_theta_; }
  std::size_t d_y() const { return d_y_; }
  double sigma2() const { return sigma2_; }
  // Noise truncated to [-sigma c, sigma c] via the truncated inverse CDF.
  void set_truncation(std::optional<double> radius);
  std::optional<double> truncation() const { return radius_; }

  virtual std::vector<double> forward(std::span<const double> theta, Resolution res) const = 0;
  virtual std::string name() const = 0;

  std::pair<std::vector<double>, std::vector<double>> split_outer(std::span<const double> y) const;
  double log_g(std::span<const double> y, std::span<const double> x, Resolution res) const;

  std::size_t outer_dim() const override { return d_theta_ + d_y_; }
  std::size_t inner_dim() const override { return d_theta_; }
  std::vector<double> outer_state(std::span<const double> y, Resolution res) const override;
  double outer_offset(std::span<const double> y) const override;
  void log_g_block(std::span<const double> state, const InnerBlock& inner, std::size_t count,
                   std::span<double> out) const override;

 private:
  std::size_t d_theta_;
  std::size_t d_y_;
  double sigma2_;
  std::optional<double> radius_;
};

class LinearGaussianModel final : public EigModel {
 public:
  explicit LinearGaussianModel(double sigma2 = 0.25, std::size_t dim = 4);

  std::vector<double> forward(std::span<const double> theta, Resolution res) const override;
  std::string name() const override { return "linear"; }
  InnerBlock inner_block(const PointSet& x, Resolution res) const override;
};

class PoissonEigModel final : public EigModel {
 public:
  explicit PoissonEigModel(double sigma2 = 1e-4, std::array<double, 2> xi = {0.125, 0.875});

  // Full FEM solve (or closed form) per call; no caching.
  std::vector<double> forward(std::span<const double> theta, Resolution res) const override;
  std::string name() const override { return "poisson"; }
  bool discretized() const override { return true; }
  double gamma() const override { return 1.0; }
  InnerBlock inner_block(const PointSet& x, Resolution res) const override;
  std::vector<double> outer_state(std::span<const double> y, Resolution res) const override;

  const std::array<double, 2>& xi() const { return xi_; }
  // B[j][i] = response at xi_j to unit coefficient i.
  std::array<std::array<double, 4>, 2> basis(Resolution res) const;

 private:
  std::array<double, 2> xi_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::size_t, std::array<std::array<double, 4>, 2>> cache_;
};

}  // namespace mlqmc
