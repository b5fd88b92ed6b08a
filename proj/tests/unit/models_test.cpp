#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "mlqmc/fem.hpp"
#include "mlqmc/hash.hpp"
#include "mlqmc/lowdisc.hpp"
#include "mlqmc/models.hpp"
#include "mlqmc/stats.hpp"

using namespace mlqmc;

namespace {

std::vector<double> uniform(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.001, 0.999);
  std::vector<double> v(n);
  for (double& x : v) x = U(rng);
  return v;
}

}  // namespace

TEST(Resolution, Basics) {
  EXPECT_TRUE(Resolution::exact().is_exact());
  EXPECT_EQ(Resolution::exact().cost_factor(1.0), 1.0);
  EXPECT_EQ(Resolution::mesh(0.25).cost_factor(1.0), 4.0);
  EXPECT_EQ(Resolution::mesh(0.25).h(), 0.25);
  EXPECT_THROW(Resolution::exact().h(), std::logic_error);
  EXPECT_THROW(Resolution::mesh(0.0), std::invalid_argument);
  EXPECT_THROW(Resolution::mesh(2.0), std::invalid_argument);
  EXPECT_EQ(Resolution::exact().str(), "exact");
  EXPECT_EQ(Resolution::mesh(0.0625).str(), "0.0625");
}

TEST(Models, Dimensions) {
  const LinearGaussianModel lin;
  EXPECT_EQ(lin.outer_dim(), 8u);
  EXPECT_EQ(lin.inner_dim(), 4u);
  EXPECT_FALSE(lin.discretized());
  EXPECT_EQ(lin.gamma(), 0.0);
  EXPECT_EQ(lin.sigma2(), 0.25);
  const PoissonEigModel poi;
  EXPECT_EQ(poi.outer_dim(), 6u);
  EXPECT_EQ(poi.inner_dim(), 4u);
  EXPECT_TRUE(poi.discretized());
  EXPECT_EQ(poi.gamma(), 1.0);
  EXPECT_EQ(poi.sigma2(), 1e-4);
  EXPECT_THROW(PoissonEigModel(1e-4, {0.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(LinearGaussianModel(0.0), std::invalid_argument);
}

TEST(Models, LinearForwardIsIdentity) {
  const LinearGaussianModel m;
  const std::vector<double> t{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(m.forward(t, Resolution::exact()), t);
  EXPECT_EQ(m.forward(t, Resolution::mesh(0.5)), t);
}

TEST(Models, PoissonForward) {
  const PoissonEigModel m;
  for (auto r : m.forward(std::vector<double>{0, 0, 0, 0}, Resolution::mesh(0.125))) EXPECT_EQ(r, 0.0);
  const auto g = m.forward(std::vector<double>{1, 0, 0, 0}, Resolution::mesh(std::ldexp(1.0, -10)));
  EXPECT_NEAR(g[0], (std::sin(0.5) - std::sin(4.0) / 8) / 16, 1e-5);
  EXPECT_NEAR(g[1], (std::sin(3.5) - 7 * std::sin(4.0) / 8) / 16, 1e-5);
  const auto e = m.forward(std::vector<double>{1, 0, 0, 0}, Resolution::exact());
  EXPECT_NEAR(e[0], (std::sin(0.5) - std::sin(4.0) / 8) / 16, 1e-15);
}

TEST(Models, PoissonBasisReproducesForward) {
  const PoissonEigModel m;
  std::mt19937_64 rng(1);
  for (const Resolution res : {Resolution::mesh(0.25), Resolution::mesh(1.0 / 100), Resolution::exact()}) {
    const auto theta = uniform(4, rng);
    const auto direct = m.forward(theta, res);
    const PointSet x(1, 4, theta);
    const auto block = m.inner_block(x, res);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(block.column(j)[0], direct[j], 1e-14);
  }
}

TEST(Models, PoissonBasisCacheIsThreadSafe) {
  const PoissonEigModel m;
  std::vector<std::thread> pool;
  std::vector<std::array<std::array<double, 4>, 2>> got(8);
  for (int t = 0; t < 8; ++t) {
    pool.emplace_back([&, t] { got[t] = m.basis(Resolution::mesh(std::ldexp(1.0, -(t % 3) - 5))); });
  }
  for (auto& th : pool) th.join();
  for (int t = 0; t < 8; ++t) EXPECT_EQ(got[t], m.basis(Resolution::mesh(std::ldexp(1.0, -(t % 3) - 5))));
}

TEST(Models, SplitOuter) {
  const LinearGaussianModel m;
  const std::vector<double> y{0.1, 0.2, 0.3, 0.4, 0.5, 0.975, 0.5, 0.025};
  const auto [theta, noise] = m.split_outer(y);
  EXPECT_EQ(theta, (std::vector<double>{0.1, 0.2, 0.3, 0.4}));
  EXPECT_EQ(noise[0], 0.0);
  EXPECT_NEAR(noise[1], 0.5 * 1.959963984540054, 1e-11);
  EXPECT_NEAR(noise[1], 0.97998, 1e-5);
  EXPECT_NEAR(noise[3], -noise[1], 1e-12);
  EXPECT_THROW(m.split_outer(std::vector<double>(5, 0.5)), std::invalid_argument);
}

TEST(Models, TruncatedNoiseStaysInRange) {
  LinearGaussianModel m;
  const double c = 1.5, sigma = 0.5;
  m.set_truncation(c);
  const auto ps = owen_scramble(DigitalNetGenerator(8), 1024, {3, 0});
  for (std::size_t i = 0; i < ps.count(); ++i) {
    for (double e : m.split_outer(ps.row(i)).second) {
      EXPECT_GE(e, -sigma * c - 1e-12);
      EXPECT_LE(e, sigma * c + 1e-12);
    }
  }
  std::vector<double> edge(8, 0.0);
  for (double e : m.split_outer(edge).second) EXPECT_NEAR(e, -sigma * c, 1e-9);
  EXPECT_THROW(m.set_truncation(0.0), std::invalid_argument);
  m.set_truncation(std::nullopt);
  EXPECT_FALSE(m.truncation().has_value());
}

TEST(Models, LogGValues) {
  const LinearGaussianModel m;
  std::vector<double> y{0.1, 0.2, 0.3, 0.4, 0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(m.log_g(y, std::vector<double>{0.1, 0.2, 0.3, 0.4}, Resolution::exact()), 0.0);

  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    y = uniform(8, rng);
    const auto x = uniform(4, rng);
    const auto noise = m.split_outer(y).second;
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::pow(y[i] + noise[i] - x[i], 2);
    const double lg = m.log_g(y, x, Resolution::exact());
    EXPECT_NEAR(lg, -s / (2 * 0.25), 1e-12 * (1 + std::abs(lg)));
    EXPECT_LE(lg, 0.0);
    EXPECT_EQ(lg, m.log_g(y, x, Resolution::mesh(0.125)));
  }
}

TEST(Models, LogGBlockMatchesPointwise) {
  const PoissonEigModel m;
  const Resolution res = Resolution::mesh(1.0 / 32);
  const auto x = owen_scramble(DigitalNetGenerator(4), 37, {1, 2});
  const auto y = owen_scramble(DigitalNetGenerator(6), 5, {1, 3});
  const auto block = m.inner_block(x, res);
  std::vector<double> out(37);
  for (std::size_t n = 0; n < 5; ++n) {
    m.log_g_block(m.outer_state(y.row(n), res), block, 37, out);
    for (std::size_t i = 0; i < 37; ++i) {
      const double pw = m.log_g(y.row(n), x.row(i), res);
      EXPECT_NEAR(out[i], pw, 1e-9 * (1 + std::abs(pw)));
      EXPECT_LE(out[i], 0.0);
      EXPECT_LE(std::exp(out[i]), 1.0);
    }
  }
  EXPECT_THROW(m.log_g_block(std::vector<double>{0.0}, block, 37, out), std::invalid_argument);
  EXPECT_THROW(m.log_g_block(std::vector<double>{0.0, 0.0}, block, 38, out), std::invalid_argument);
}

TEST(Models, OuterOffset) {
  const LinearGaussianModel m;
  const std::vector<double> y0{0.1, 0.2, 0.3, 0.4, 0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(m.outer_offset(y0), 0.0);
  const double u1 = normal_cdf(1.0);  // noise = sigma in every component
  const std::vector<double> y1{0.1, 0.2, 0.3, 0.4, u1, u1, u1, u1};
  EXPECT_NEAR(m.outer_offset(y1), -2.0, 1e-9);
}

TEST(Models, OuterOffsetMeanIsMinusHalfDy) {
  const LinearGaussianModel m;
  const std::size_t n = 1u << 17;  // >= 1e5 points
  const auto ps = owen_scramble(DigitalNetGenerator(8), n, {77, 0});
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = m.outer_offset(ps.row(i));
  const auto mv = sample_mean_var(v);
  // The i.i.d. standard error bounds the rQMC error from above.
  EXPECT_NEAR(mv.mean, -2.0, 3.0 * std::sqrt(mv.variance / n));
}

TEST(Models, PoissonStrongRateOfLogG) {
  const PoissonEigModel m;
  std::mt19937_64 rng(4);
  std::vector<std::vector<double>> ys, xs;
  for (int k = 0; k < 100; ++k) {
    ys.push_back(uniform(6, rng));
    xs.push_back(uniform(4, rng));
  }
  std::vector<double> hs, diffs;
  for (int k = 3; k <= 9; ++k) {
    const double h = std::ldexp(1.0, -k);
    double acc = 0.0;
    for (int p = 0; p < 100; ++p) {
      acc += std::abs(m.log_g(ys[p], xs[p], Resolution::mesh(h)) -
                      m.log_g(ys[p], xs[p], Resolution::exact()));
    }
    hs.push_back(h);
    diffs.push_back(acc / 100);
  }
  EXPECT_NEAR(loglog_fit(hs, diffs).slope, 2.0, 0.3);
}

TEST(Models, OuterMap) {
  EXPECT_EQ(outer_map_value(OuterMap::kNegLog, 0.3), -0.3);
  EXPECT_NEAR(outer_map_value(OuterMap::kIdentity, std::log(2.0)), 2.0, 1e-15);
  EXPECT_NEAR(apply_outer_map(OuterMap::kNegLog, std::vector<double>{0.0, std::log(3.0)}),
              -std::log(2.0), 1e-15);
  EXPECT_EQ(outer_map_curvature(OuterMap::kNegLog), 1.0);
  EXPECT_EQ(outer_map_curvature(OuterMap::kIdentity), 0.0);
}
