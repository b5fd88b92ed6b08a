#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mlqmc/estimators.hpp"
#include "mlqmc/oracle.hpp"
#include "mlqmc/stats.hpp"

using namespace mlqmc;

namespace {

// One outer and one inner coordinate: log g(y, x) = a y + c x.
class ToyProblem final : public NestedProblem {
 public:
  ToyProblem(double a, double c, OuterMap map = OuterMap::kNegLog, double offset_slope = 0.0)
      : a_(a), c_(c), map_(map), offset_slope_(offset_slope) {}
  std::size_t outer_dim() const override { return 1; }
  std::size_t inner_dim() const override { return 1; }
  OuterMap outer_map() const override { return map_; }
  InnerBlock inner_block(const PointSet& x, Resolution) const override {
    return {x.count(), 1, x.data()};
  }
  std::vector<double> outer_state(std::span<const double> y, Resolution) const override {
    return {y[0]};
  }
  double outer_offset(std::span<const double> y) const override { return offset_slope_ * y[0]; }
  void log_g_block(std::span<const double> state, const InnerBlock& inner, std::size_t count,
                   std::span<double> out) const override {
    for (std::size_t m = 0; m < count; ++m) out[m] = a_ * state[0] + c_ * inner.data[m];
  }

 private:
  double a_, c_;
  OuterMap map_;
  double offset_slope_;
};

// Linear model with the coordinates of theta, noise and the inner point
// reversed; the EIG is unchanged.
class PermutedLinear final : public NestedProblem {
 public:
  std::size_t outer_dim() const override { return base_.outer_dim(); }
  std::size_t inner_dim() const override { return base_.inner_dim(); }
  InnerBlock inner_block(const PointSet& x, Resolution res) const override {
    PointSet p(x.count(), x.dim());
    for (std::size_t m = 0; m < x.count(); ++m)
      for (std::size_t j = 0; j < x.dim(); ++j) p(m, j) = x(m, x.dim() - 1 - j);
    return base_.inner_block(p, res);
  }
  std::vector<double> outer_state(std::span<const double> y, Resolution res) const override {
    return base_.outer_state(permute(y), res);
  }
  double outer_offset(std::span<const double> y) const override {
    return base_.outer_offset(permute(y));
  }
  void log_g_block(std::span<const double> state, const InnerBlock& inner, std::size_t count,
                   std::span<double> out) const override {
    base_.log_g_block(state, inner, count, out);
  }

 private:
  static std::vector<double> permute(std::span<const double> y) {
    std::vector<double> p(y.size());
    for (std::size_t j = 0; j < 4; ++j) {
      p[j] = y[3 - j];
      p[4 + j] = y[7 - j];
    }
    return p;
  }
  LinearGaussianModel base_;
};

LevelSchedule schedule(std::vector<LevelSpec> levels) { return LevelSchedule(std::move(levels)); }

double linear_reference() {
  static const double v = eig_linear_reference(LinearGaussianModel(), 128).value;
  return v;
}

}  // namespace

TEST(Mc, ConstantAndKnownMeans) {
  const auto c = mc_estimate({1, [](std::span<const double>) { return 2.5; }}, 100, 1);
  EXPECT_EQ(c.estimate, 2.5);
  EXPECT_EQ(c.total_variance, 0.0);
  const auto z = mc_estimate({1, [](std::span<const double> x) { return x[0]; }}, 100000, 2);
  EXPECT_NEAR(z.estimate, 0.5, 4 * std::sqrt(z.total_variance));
  const auto z2 = mc_estimate({1, [](std::span<const double> x) { return x[0] * x[0]; }}, 100000, 3);
  EXPECT_NEAR(z2.estimate, 1.0 / 3.0, 4 * std::sqrt(z2.total_variance));
  EXPECT_THROW(mc_estimate({1, [](std::span<const double>) { return 0.0; }}, 1, 1),
               std::invalid_argument);
}

TEST(Rqmc, ConstantIsExact) {
  const auto r = rqmc_estimate({3, [](std::span<const double>) { return -1.0; }}, 64, 8, 1);
  EXPECT_EQ(r.estimate, -1.0);
  EXPECT_EQ(r.total_variance, 0.0);
  EXPECT_THROW(rqmc_estimate({1, [](std::span<const double>) { return 0.0; }}, 48, 2, 1),
               std::invalid_argument);
}

TEST(Rqmc, HalfIndicatorIsExactForEveryScramble) {
  const Integrand ind{1, [](std::span<const double> x) { return x[0] < 0.5 ? 1.0 : 0.0; }};
  for (std::size_t M : {2u, 4u, 64u, 1024u}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto r = rqmc_estimate(ind, M, 4, seed);
      EXPECT_EQ(r.estimate, 0.5);
      EXPECT_EQ(r.per_level[0].sample_variance, 0.0);
    }
  }
}

TEST(Rqmc, SmoothOneDimensionalRate) {
  const Integrand phi{1, [](std::span<const double> x) { return std::exp(x[0]); }};
  std::vector<double> Ms, vs;
  for (int k = 4; k <= 12; ++k) {
    const std::size_t M = std::size_t{1} << k;
    const auto r = rqmc_estimate(phi, M, 100, 9);
    EXPECT_NEAR(r.estimate, std::exp(1.0) - 1.0, 5 * std::sqrt(r.total_variance) + 1e-15);
    Ms.push_back(double(M));
    vs.push_back(r.per_level[0].sample_variance);
  }
  EXPECT_LE(loglog_fit(Ms, vs).slope, -2.0);
}

TEST(Rqmc, SmoothTwoDimensionalRate) {
  const Integrand phi{2, [](std::span<const double> x) { return std::exp(x[0] + x[1]); }};
  std::vector<double> Ms, vs;
  for (int k = 4; k <= 12; ++k) {
    const std::size_t M = std::size_t{1} << k;
    Ms.push_back(double(M));
    vs.push_back(rqmc_estimate(phi, M, 200, 21).per_level[0].sample_variance);
  }
  EXPECT_LE(loglog_fit(Ms, vs).slope, -1.8);
}

TEST(Dlmc, ConstantInnerIntegrand) {
  const ToyProblem p(0.0, 0.0);
  const auto r = dlmc_estimate(p, 64, 16, Resolution::exact(), 1);
  EXPECT_EQ(r.estimate, 0.0);
  const ToyProblem q(0.0, 0.0, OuterMap::kNegLog, 1.0);  // offset y averages to 1/2
  const auto s = dlmc_estimate(q, 20000, 2, Resolution::exact(), 2);
  EXPECT_NEAR(s.estimate, 0.5, 4 * std::sqrt(s.total_variance));
}

TEST(Dlmc, InnerIndependentReducesToOuterMc) {
  const ToyProblem p(1.0, 0.0, OuterMap::kIdentity);  // g = e^y
  const auto a = dlmc_estimate(p, 20000, 1, Resolution::exact(), 5);
  const auto b = dlmc_estimate(p, 20000, 32, Resolution::exact(), 5);
  EXPECT_NEAR(a.estimate, b.estimate, 1e-12);
  EXPECT_NEAR(a.estimate, std::exp(1.0) - 1.0, 4 * std::sqrt(a.total_variance));
}

TEST(Dlmc, LinearModelNearOracle) {
  const LinearGaussianModel m;
  const auto lo = dlmc_estimate(m, 1u << 12, 1u << 10, Resolution::exact(), 3);
  // Inner bias of -log(mean g) is about Var[g] / (2 M gbar^2); estimate that
  // ratio from a small-M run with the same outer samples.
  const auto coarse = dlmc_estimate(m, 1u << 12, 1u << 4, Resolution::exact(), 3);
  const double bias_allowance = std::abs(coarse.estimate - lo.estimate) / 64.0 * 2.0;
  const double half_width = 1.96 * std::sqrt(lo.total_variance);
  EXPECT_NEAR(lo.estimate, linear_reference(), 3 * (half_width + bias_allowance));
}

TEST(Rdlqmc, DeterministicAndNearOracle) {
  const LinearGaussianModel m;
  const auto a = rdlqmc_estimate(m, 1u << 10, 1u << 8, Resolution::exact(), 8, 1, 11);
  const auto b = rdlqmc_estimate(m, 1u << 10, 1u << 8, Resolution::exact(), 8, 1, 11);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.per_level[0].sample_variance, b.per_level[0].sample_variance);
  const double sd = std::sqrt(a.per_level[0].sample_variance);
  EXPECT_NEAR(a.estimate, linear_reference(), 4 * sd + 1.0 / (256.0 * 256.0) * 100);
  EXPECT_THROW(rdlqmc_estimate(m, 1000, 256, Resolution::exact(), 1, 1, 1), std::invalid_argument);
}

TEST(Rdlqmc, InnerIndependentIsOuterRqmc) {
  const ToyProblem p(1.0, 0.0, OuterMap::kIdentity);
  const auto r = rdlqmc_estimate(p, 1024, 4, Resolution::exact(), 1, 1, 4);
  EXPECT_NEAR(r.estimate, std::exp(1.0) - 1.0, 1e-5);
}

TEST(Mldlqmc, DegenerateScheduleCollapses) {
  const LinearGaussianModel m;
  RunConfig cfg;
  cfg.S = 3;
  cfg.seed = 17;
  const auto full = mldlqmc_estimate(
      m, schedule({{64, 32, Resolution::exact()}, {32, 32, Resolution::exact()},
                   {16, 32, Resolution::exact()}}),
      cfg);
  EXPECT_EQ(full.per_level[1].mean, 0.0);
  EXPECT_EQ(full.per_level[1].sample_variance, 0.0);
  EXPECT_EQ(full.estimate, full.per_level[0].mean + full.per_level[2].mean);

  const PoissonEigModel p;
  const Resolution h = Resolution::mesh(0.125);
  const auto pf = mldlqmc_estimate(p, schedule({{32, 16, h}, {16, 16, h}, {8, 16, h}}), cfg);
  EXPECT_EQ(pf.per_level[1].mean, 0.0);
}

TEST(Mldlqmc, InnerIndependentLevelsVanish) {
  const ToyProblem p(0.7, 0.0, OuterMap::kNegLog, 0.3);
  RunConfig cfg;
  cfg.S = 4;
  cfg.R = 3;
  const auto r = mldlqmc_estimate(
      p, schedule({{256, 4, Resolution::exact()}, {64, 8, Resolution::exact()},
                   {16, 32, Resolution::exact()}}),
      cfg);
  EXPECT_EQ(r.per_level[1].mean, 0.0);
  EXPECT_EQ(r.per_level[2].mean, 0.0);
  // level 0 alone: offset 0.3 y plus -0.7 y averaged over scrambled outer points
  EXPECT_NEAR(r.estimate, -0.2, 1e-4);
}

TEST(Mldlqmc, SingleLevelMatchesRandomizedInnerMean) {
  // L = 0: f of the R x M0 randomized inner mean with rQMC outer points.
  const ToyProblem p(0.0, 1.0, OuterMap::kIdentity);  // g = e^x, mean e - 1
  RunConfig cfg;
  cfg.S = 16;
  cfg.R = 4;
  const auto r = mldlqmc_estimate(p, schedule({{8, 256, Resolution::exact()}}), cfg);
  EXPECT_NEAR(r.estimate, std::exp(1.0) - 1.0, 4 * std::sqrt(r.total_variance) + 1e-12);
  EXPECT_TRUE(r.bias_hat.has_value());
  EXPECT_EQ(*r.bias_hat, 0.0);  // f'' = 0 for the identity map
}

TEST(Mldlqmc, ThreadCountInvariance) {
  const PoissonEigModel p;
  const auto sch = schedule({{256, 16, Resolution::mesh(0.25)},
                             {64, 64, Resolution::mesh(0.125)},
                             {17, 256, Resolution::mesh(0.0625)}});
  RunConfig c1;
  c1.S = 2;
  c1.R = 2;
  c1.seed = 99;
  RunConfig c4 = c1;
  c4.threads = 4;
  RunConfig c3 = c1;
  c3.threads = 3;
  const auto a = mldlqmc_estimate(p, sch, c1);
  for (const auto& cfg : {c3, c4}) {
    const auto b = mldlqmc_estimate(p, sch, cfg);
    EXPECT_EQ(a.estimate, b.estimate);
    ASSERT_EQ(a.per_level.size(), b.per_level.size());
    for (std::size_t l = 0; l < a.per_level.size(); ++l) {
      EXPECT_EQ(a.per_level[l].mean, b.per_level[l].mean);
      EXPECT_EQ(a.per_level[l].sample_variance, b.per_level[l].sample_variance);
    }
    EXPECT_EQ(a.bias_hat, b.bias_hat);
  }
}

TEST(Mldlqmc, ReportInvariantsAndWork) {
  const LinearGaussianModel m;
  const auto sch = schedule({{64, 16, Resolution::exact()}, {16, 32, Resolution::exact()}});
  RunConfig cfg;
  cfg.S = 5;
  cfg.R = 2;
  const auto r = mldlqmc_estimate(m, sch, cfg);
  double sum = 0.0, var = 0.0;
  for (const auto& lv : r.per_level) {
    sum += lv.mean;
    var += lv.variance_of_mean;
    EXPECT_NEAR(lv.variance_of_mean, lv.sample_variance / 5.0, 1e-18);
  }
  EXPECT_EQ(r.estimate, sum);
  EXPECT_EQ(r.total_variance, var);
  EXPECT_TRUE(r.variance_available);
  EXPECT_EQ(r.work_units, 5.0 * work_units(sch, 0.0, 2));
  // integrand evaluations: level 0 N M, level 1 N (R M_1 + M_0), per s
  EXPECT_EQ(r.evaluations.integrand, 5u * (64 * 16 + 16 * (2 * 32 + 16)));

  RunConfig one;
  const auto s1 = mldlqmc_estimate(m, sch, one);
  EXPECT_FALSE(s1.variance_available);
  EXPECT_FALSE(s1.bias_hat.has_value());
}

TEST(Mldlqmc, RejectsInvalidSchedules) {
  const LinearGaussianModel m;
  RunConfig cfg;
  EXPECT_THROW(mldlqmc_estimate(m, schedule({{4, 24, Resolution::exact()}}), cfg),
               std::invalid_argument);
  EXPECT_THROW(
      mldlqmc_estimate(m, schedule({{4, 32, Resolution::exact()}, {4, 16, Resolution::exact()}}), cfg),
      std::invalid_argument);
  EXPECT_THROW(mldlqmc_estimate(m, schedule({{0, 32, Resolution::exact()}}), cfg),
               std::invalid_argument);
  const PoissonEigModel p;
  EXPECT_THROW(mldlqmc_estimate(p, schedule({{4, 16, Resolution::mesh(0.125)},
                                             {4, 32, Resolution::mesh(0.25)}}),
                                cfg),
               std::invalid_argument);
  EXPECT_THROW(schedule({{4, 16, Resolution::exact()}, {4, 16, Resolution::exact()}})
                   .validate(false, /*strict=*/true),
               std::invalid_argument);
  RunConfig bad;
  bad.S = 0;
  EXPECT_THROW(mldlqmc_estimate(m, schedule({{4, 16, Resolution::exact()}}), bad),
               std::invalid_argument);
}

TEST(Mldlqmc, TelescopingMeanMatchesSingleLevel) {
  const LinearGaussianModel m;
  const auto ml = schedule({{32, 16, Resolution::exact()}, {8, 64, Resolution::exact()}});
  const auto sl = schedule({{8, 64, Resolution::exact()}});
  std::vector<double> a, b;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RunConfig cfg;
    cfg.seed = 1000 + seed;
    a.push_back(mldlqmc_estimate(m, ml, cfg).estimate);
    b.push_back(mldlqmc_estimate(m, sl, cfg).estimate);
  }
  const auto ma = sample_mean_var(a), mb = sample_mean_var(b);
  const double se = std::sqrt(ma.variance / 200 + mb.variance / 200);
  EXPECT_NEAR(ma.mean, mb.mean, 4 * se);
}

TEST(Mldlqmc, ReportedVarianceMatchesRunToRunSpread) {
  const LinearGaussianModel m;
  const auto sch = schedule({{64, 16, Resolution::exact()}, {16, 32, Resolution::exact()},
                             {4, 64, Resolution::exact()}});
  std::vector<double> est, rep_var;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RunConfig cfg;
    cfg.S = 4;
    cfg.seed = 5000 + seed;
    const auto r = mldlqmc_estimate(m, sch, cfg);
    est.push_back(r.estimate);
    rep_var.push_back(r.total_variance);
  }
  const double empirical = sample_mean_var(est).variance;
  const double reported = sample_mean_var(rep_var).mean;
  EXPECT_GE(empirical / reported, 0.5);
  EXPECT_LE(empirical / reported, 2.0);
}

TEST(Mldlqmc, PermutedLinearModelAgreesInDistribution) {
  const LinearGaussianModel m;
  const PermutedLinear p;
  const auto sch = schedule({{64, 16, Resolution::exact()}, {16, 64, Resolution::exact()}});
  std::vector<double> a, b;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RunConfig cfg;
    cfg.seed = 300 + seed;
    a.push_back(mldlqmc_estimate(m, sch, cfg).estimate);
    b.push_back(mldlqmc_estimate(p, sch, cfg).estimate);
  }
  const auto ma = sample_mean_var(a), mb = sample_mean_var(b);
  EXPECT_NEAR(ma.mean, mb.mean, 4 * std::sqrt(ma.variance / 100 + mb.variance / 100));
}

TEST(BiasHat, Basics) {
  EXPECT_FALSE(bias_hat(std::vector<double>{0.1, 0.2}, 1, OuterMap::kNegLog).has_value());
  EXPECT_EQ(*bias_hat(std::vector<double>(12, -3.0), 4, OuterMap::kNegLog), 0.0);
  EXPECT_EQ(*bias_hat(std::vector<double>{0.1, 0.5, 0.2, 0.9}, 2, OuterMap::kIdentity), 0.0);
  EXPECT_THROW(bias_hat(std::vector<double>(5, 0.0), 2, OuterMap::kNegLog), std::invalid_argument);
}

TEST(BiasHat, MatchesSpreadsheetFormula) {
  // (1/2) f''(mbar) var_r / R with f = -log: (1/2) var / (R mbar^2).
  const std::vector<double> m{1.0, 2.0, 4.0};
  std::vector<double> logs;
  for (double v : m) logs.push_back(std::log(v) - 700.0);  // scale must not matter
  const double mbar = 7.0 / 3.0;
  const double var = ((1 - mbar) * (1 - mbar) + (2 - mbar) * (2 - mbar) + (4 - mbar) * (4 - mbar)) / 2;
  EXPECT_NEAR(*bias_hat(logs, 3, OuterMap::kNegLog), 0.5 * var / 3.0 / (mbar * mbar), 1e-12);
}

TEST(BiasHat, GaussianToyWithinThirtyPercent) {
  // g = exp(c x) with M_L = 1: each replicate's inner mean is g at one
  // scrambled point, so Var_r = Var[e^{cX}] for X uniform.
  const double c = 0.5;
  const double gbar = (std::exp(c) - 1) / c;
  const double g2 = (std::exp(2 * c) - 1) / (2 * c);
  const std::size_t R = 32;
  const double analytic = 0.5 * (g2 - gbar * gbar) / R / (gbar * gbar);
  const ToyProblem p(0.0, c);
  RunConfig cfg;
  cfg.S = 20;
  cfg.R = R;
  cfg.seed = 4;
  const auto r = mldlqmc_estimate(p, schedule({{4, 1, Resolution::exact()}}), cfg);
  ASSERT_TRUE(r.bias_hat.has_value());
  EXPECT_NEAR(*r.bias_hat / analytic, 1.0, 0.3);
}

TEST(WorkUnits, Examples) {
  EXPECT_EQ(work_units(schedule({{1, 1, Resolution::exact()}}), 0.0), 3.0);
  const auto sch = schedule({{4, 2, Resolution::mesh(0.5)}, {2, 4, Resolution::mesh(0.25)}});
  EXPECT_EQ(work_units(sch, 1.0, 1), 56.0);
  EXPECT_EQ(work_units(sch, 0.0, 1), (4 + 2) + (2 + 4) + (4 * 2) + 2 * (4 + 2));
  EXPECT_EQ(work_units(sch, 1.0, 3), 56.0 + 2 * 4 * 2);
}
