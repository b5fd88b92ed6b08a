#include <cmath>
#include <vector>

#include "mlqmc/pilot.hpp"

namespace mlqmc {

namespace {

std::vector<double> dyadic(int lo, int hi, int step = 1) {
  std::vector<double> g;
  for (int k = lo; k <= hi; k += step) g.push_back(std::ldexp(1.0, k));
  return g;
}

std::vector<std::size_t> as_sizes(const std::vector<double>& g) {
  return std::vector<std::size_t>(g.begin(), g.end());
}

}  // namespace

PilotInputs run_pilot_suite(const EigModel& model, const PilotSuiteConfig& cfg) {
  const bool disc = model.discretized();
  const std::size_t S = cfg.S ? cfg.S : (cfg.quick ? 50 : (disc ? 100 : 200));
  const int top = cfg.quick ? 2 : 0;  // quick mode trims the finest grid points
  const Resolution r0 = disc ? Resolution::mesh(cfg.h0) : Resolution::exact();
  const Resolution r1 = disc ? Resolution::mesh(cfg.h0 / 2) : Resolution::exact();
  const std::size_t m_ratio = disc ? 4 : 2;

  PilotInputs in;
  in.inner_variance =
      pilot_inner_variance(model, as_sizes(dyadic(4, 10 - top)), r0, S, cfg.seed, cfg.threads);

  LevelVarianceSetup sn;
  sn.mode = LevelVarianceMode::kN;
  sn.grid = dyadic(3, 9 - top);
  sn.M_coarse = cfg.M0;
  sn.M_fine = cfg.M0 * m_ratio;
  sn.res_coarse = r0;
  sn.res_fine = r1;
  in.level_variance_N = pilot_level_variance(model, sn, S, cfg.shift, cfg.seed, cfg.threads);

  LevelVarianceSetup sm;
  sm.mode = LevelVarianceMode::kM;
  // Deterministic shifted nets reach the M^-2 regime late; start at 2^6.
  sm.grid = disc ? dyadic(6, 14 - 2 * top, 2) : dyadic(6, 14 - top);
  sm.N = 1;
  sm.m_ratio = m_ratio;
  sm.res_coarse = r0;
  sm.res_fine = r0;
  in.level_variance_M = pilot_level_variance(model, sm, S, cfg.shift, cfg.seed, cfg.threads);

  in.level0_variance = pilot_level0_variance(model, dyadic(3, 9 - top), cfg.M0, r0, S, cfg.shift,
                                             cfg.seed, cfg.threads);
  if (!disc) return in;

  const std::vector<double> h_grid = dyadic(-6 + top, -2);
  std::vector<double> h_desc(h_grid.rbegin(), h_grid.rend());
  in.bias = pilot_bias(model, h_desc, std::ldexp(1.0, -12), 1, 32, S, cfg.seed, cfg.threads);

  LevelVarianceSetup sh;
  sh.mode = LevelVarianceMode::kH;
  sh.grid = h_desc;
  sh.N = 1;
  sh.M_coarse = 8;
  sh.M_fine = 8;
  in.level_variance_h = pilot_level_variance(model, sh, S, cfg.shift, cfg.seed, cfg.threads);

  const std::vector<double> theta(model.d_theta(), 0.5);
  volatile double sink = 0.0;
  const auto forward = [&](double h) { sink = sink + model.forward(theta, Resolution::mesh(h))[0]; };
  const auto t_grid = dyadic(-14 + 2 * top, -6);
  in.gamma = pilot_gamma(model, forward, std::vector<double>(t_grid.rbegin(), t_grid.rend()),
                         cfg.quick ? 5 : 20);
  return in;
}

}  // namespace mlqmc
