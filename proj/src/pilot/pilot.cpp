#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mlqmc/hash.hpp"
#include "mlqmc/parallel.hpp"
#include "mlqmc/pilot.hpp"

namespace mlqmc {

RateFit fit_rate(std::string quantity, std::vector<double> grid, std::vector<double> observed) {
  if (grid.size() != observed.size() || grid.size() < 2) {
    throw std::invalid_argument("fit_rate: need matching grids with at least two points");
  }
  // grid[0] is the coarsest (least asymptotic) point.
  RateFit rf;
  rf.quantity = std::move(quantity);
  rf.grid = std::move(grid);
  rf.observed = std::move(observed);
  std::size_t start = 0;
  rf.fit = loglog_fit(rf.grid, rf.observed);
  while (rf.grid.size() - start > 3) {
    const std::span<const double> gx(rf.grid.data() + start + 1, rf.grid.size() - start - 1);
    const std::span<const double> gy(rf.observed.data() + start + 1, rf.grid.size() - start - 1);
    const LogLogFit rest = loglog_fit(gx, gy);
    const double resid = std::abs(std::log2(rf.observed[start]) -
                                  (rest.intercept + rest.slope * std::log2(rf.grid[start])));
    if (!(resid > std::max(3.0 * rest.residual_rms, kGuardFloorLog2))) break;
    ++start;
    rf.fit = rest;
  }
  rf.dropped = start;
  return rf;
}

namespace {

// Geometric mean of observed * grid^exponent over the points kept by the fit.
double gmean_coeff(const RateFit& rf, double exponent) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = rf.dropped; i < rf.grid.size(); ++i) {
    s += std::log2(rf.observed[i]) + exponent * std::log2(rf.grid[i]);
    ++n;
  }
  return std::exp2(s / static_cast<double>(n));
}

std::vector<double> variances_from(const std::vector<std::vector<double>>& per_point) {
  std::vector<double> out;
  for (const auto& v : per_point) out.push_back(sample_mean_var(v).variance);
  return out;
}

RateFit fit_or_flag(std::string quantity, std::vector<double> grid, std::vector<double> observed,
                    std::size_t S, std::uint64_t seed) {
  const bool positive = std::all_of(observed.begin(), observed.end(),
                                    [](double v) { return v > 0.0 && std::isfinite(v); });
  RateFit rf;
  if (positive) {
    rf = fit_rate(std::move(quantity), std::move(grid), std::move(observed));
  } else {
    rf.quantity = std::move(quantity);
    rf.grid = std::move(grid);
    rf.observed = std::move(observed);
    rf.reliable = false;
  }
  rf.S = S;
  rf.seed = seed;
  return rf;
}

}  // namespace

RateFit pilot_bias(const NestedProblem& problem, const std::vector<double>& h_grid, double h_ref,
                   std::size_t N, std::size_t M, std::size_t S, std::uint64_t seed,
                   unsigned threads) {
  if (h_grid.size() < 2) throw std::invalid_argument("pilot_bias: degenerate grid");
  if (S < 2) throw std::invalid_argument("pilot_bias: S must be >= 2");
  if (!(h_ref < *std::min_element(h_grid.begin(), h_grid.end()))) {
    throw std::invalid_argument("pilot_bias: h_ref must be below the grid");
  }
  const DigitalNetGenerator gen_outer(problem.outer_dim());
  const DigitalNetGenerator gen_inner(problem.inner_dim());
  const std::size_t G = h_grid.size();
  // diffs[g][s]: common random numbers across h for each randomization s.
  std::vector<std::vector<double>> diffs(G, std::vector<double>(S));
  parallel_for_chunks(S, threads, [&](std::size_t b, std::size_t e) {
    std::vector<double> scratch;
    for (std::size_t s = b; s < e; ++s) {
      const PointSet y = owen_scramble(gen_outer, N, {seed, stream_id("pilot/bias/outer", {s})});
      const PointSet x = owen_scramble(gen_inner, M, {seed, stream_id("pilot/bias/inner", {s})});
      const auto value = [&](Resolution res) {
        const InnerBlock block = problem.inner_block(x, res);
        double acc = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
          acc += problem.outer_offset(y.row(n)) +
                 nested_term(problem, problem.outer_state(y.row(n), res), block, M, scratch);
        }
        return acc / static_cast<double>(N);
      };
      const double ref = value(Resolution::mesh(h_ref));
      for (std::size_t g = 0; g < G; ++g) diffs[g][s] = value(Resolution::mesh(h_grid[g])) - ref;
    }
  });
  std::vector<double> bias(G);
  std::size_t noisy = 0;
  for (std::size_t g = 0; g < G; ++g) {
    const MeanVar mv = sample_mean_var(diffs[g]);
    bias[g] = std::abs(mv.mean);
    if (bias[g] <= 2.0 * std::sqrt(mv.variance / static_cast<double>(S))) ++noisy;
  }
  RateFit rf = fit_or_flag("bias", h_grid, bias, S, seed);
  if (2 * noisy > G) rf.reliable = false;
  return rf;
}

RateFit pilot_inner_variance(const NestedProblem& problem, const std::vector<std::size_t>& M_grid,
                             Resolution res, std::size_t S, std::uint64_t seed,
                             unsigned threads) {
  if (S < 2) throw std::invalid_argument("pilot_inner_variance: S must be >= 2");
  const DigitalNetGenerator gen_outer(problem.outer_dim());
  const DigitalNetGenerator gen_inner(problem.inner_dim());
  const PointSet y = owen_scramble(gen_outer, 1, {seed, stream_id("pilot/inner/outer", {})});
  const auto state = problem.outer_state(y.row(0), res);
  std::vector<std::vector<double>> values(M_grid.size(), std::vector<double>(S));
  for (std::size_t g = 0; g < M_grid.size(); ++g) {
    const std::size_t M = M_grid[g];
    parallel_for_chunks(S, threads, [&](std::size_t b, std::size_t e) {
      std::vector<double> scratch;
      for (std::size_t s = b; s < e; ++s) {
        const PointSet x = owen_scramble(gen_inner, M, {seed, stream_id("pilot/inner", {M, s})});
        values[g][s] = nested_term(problem, state, problem.inner_block(x, res), M, scratch);
      }
    });
  }
  return fit_or_flag("inner_variance", std::vector<double>(M_grid.begin(), M_grid.end()),
                     variances_from(values), S, seed);
}

RateFit pilot_level_variance(const NestedProblem& problem, const LevelVarianceSetup& setup,
                             std::size_t S, double shift, std::uint64_t seed, unsigned threads) {
  if (S < 2) throw std::invalid_argument("pilot_level_variance: S must be >= 2");
  if (setup.grid.size() < 2) throw std::invalid_argument("pilot_level_variance: grid too short");
  const DigitalNetGenerator gen_outer(problem.outer_dim());
  const DigitalNetGenerator gen_inner(problem.inner_dim());
  const std::size_t G = setup.grid.size();
  std::vector<std::vector<double>> values(G, std::vector<double>(S));
  std::vector<double> abscissa(G);

  for (std::size_t g = 0; g < G; ++g) {
    std::size_t N = setup.N, Mc = setup.M_coarse, Mf = setup.M_fine;
    Resolution rc = setup.res_coarse, rf = setup.res_fine;
    const double v = setup.grid[g];
    switch (setup.mode) {
      case LevelVarianceMode::kN:
        N = static_cast<std::size_t>(v);
        abscissa[g] = v;
        break;
      case LevelVarianceMode::kM:
        Mf = static_cast<std::size_t>(v);
        Mc = std::max<std::size_t>(1, Mf / setup.m_ratio);
        abscissa[g] = v;
        break;
      case LevelVarianceMode::kH:
        rf = Resolution::mesh(v);
        rc = Resolution::mesh(std::min(1.0, 2.0 * v));
        abscissa[g] = 1.0 / v;
        break;
    }
    const PointSet det = shifted_inner_points(gen_inner, std::max(Mc, Mf), shift);
    const InnerBlock fine = problem.inner_block(det.prefix(Mf), rf);
    const InnerBlock coarse = problem.inner_block(det.prefix(Mc), rc);
    parallel_for_chunks(S, threads, [&](std::size_t b, std::size_t e) {
      std::vector<double> scratch;
      for (std::size_t s = b; s < e; ++s) {
        const PointSet y =
            owen_scramble(gen_outer, N, {seed, stream_id("pilot/level/outer", {g, s})});
        double acc = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
          const auto sf = problem.outer_state(y.row(n), rf);
          const auto sc = rc == rf ? sf : problem.outer_state(y.row(n), rc);
          acc += nested_term(problem, sf, fine, Mf, scratch) -
                 nested_term(problem, sc, coarse, Mc, scratch);
        }
        values[g][s] = acc / static_cast<double>(N);
      }
    });
  }
  static constexpr const char* names[] = {"level_variance_N", "level_variance_M",
                                          "level_variance_h"};
  return fit_or_flag(names[static_cast<int>(setup.mode)], abscissa, variances_from(values), S,
                     seed);
}

RateFit pilot_level0_variance(const NestedProblem& problem, const std::vector<double>& N_grid,
                              std::size_t M0, Resolution res0, std::size_t S, double shift,
                              std::uint64_t seed, unsigned threads) {
  if (S < 2) throw std::invalid_argument("pilot_level0_variance: S must be >= 2");
  const DigitalNetGenerator gen_outer(problem.outer_dim());
  const DigitalNetGenerator gen_inner(problem.inner_dim());
  const InnerBlock block = problem.inner_block(shifted_inner_points(gen_inner, M0, shift), res0);
  std::vector<std::vector<double>> values(N_grid.size(), std::vector<double>(S));
  for (std::size_t g = 0; g < N_grid.size(); ++g) {
    const auto N = static_cast<std::size_t>(N_grid[g]);
    parallel_for_chunks(S, threads, [&](std::size_t b, std::size_t e) {
      std::vector<double> scratch;
      for (std::size_t s = b; s < e; ++s) {
        const PointSet y =
            owen_scramble(gen_outer, N, {seed, stream_id("pilot/level0/outer", {g, s})});
        double acc = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
          acc += problem.outer_offset(y.row(n)) +
                 nested_term(problem, problem.outer_state(y.row(n), res0), block, M0, scratch);
        }
        values[g][s] = acc / static_cast<double>(N);
      }
    });
  }
  return fit_or_flag("level0_variance", N_grid, variances_from(values), S, seed);
}

RateFit pilot_gamma(const NestedProblem& problem, const TimedForward& forward,
                    const std::vector<double>& h_grid, std::size_t reps) {
  if (!problem.discretized()) throw std::invalid_argument("pilot_gamma: problem has exact sampling");
  if (reps < 1) throw std::invalid_argument("pilot_gamma: reps must be >= 1");
  using clock = std::chrono::steady_clock;
  const auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };
  std::vector<double> inv_h, times;
  for (double h : h_grid) {
    // Batch calls so that one timed repetition spans at least a millisecond.
    std::size_t batch = 1;
    for (;;) {
      const auto t0 = clock::now();
      for (std::size_t i = 0; i < batch; ++i) forward(h);
      if (seconds(clock::now() - t0) >= 1e-3 || batch >= (std::size_t{1} << 20)) break;
      batch *= 2;
    }
    std::vector<double> samples(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      const auto t0 = clock::now();
      for (std::size_t i = 0; i < batch; ++i) forward(h);
      samples[r] = seconds(clock::now() - t0) / static_cast<double>(batch);
    }
    std::nth_element(samples.begin(), samples.begin() + reps / 2, samples.end());
    inv_h.push_back(1.0 / h);
    times.push_back(samples[reps / 2]);
  }
  return fit_or_flag("gamma", inv_h, times, reps, 0);
}

PilotReport assemble(const PilotInputs& in) {
  const auto require_negative = [](const RateFit& rf) {
    if (!rf.reliable) throw std::invalid_argument("assemble: unreliable fit for " + rf.quantity);
    if (!(rf.rate() < 0.0)) {
      throw std::invalid_argument("assemble: non-negative variance rate for " + rf.quantity);
    }
  };
  require_negative(in.inner_variance);
  require_negative(in.level_variance_N);
  require_negative(in.level_variance_M);
  require_negative(in.level0_variance);

  PilotReport rep;
  rep.epsilon = in.epsilon;
  rep.a_max = in.a_max ? *in.a_max
                       : std::clamp(1.0 - in.epsilon + 0.5 * in.level_variance_N.rate(), 0.0,
                                    kMaxFittedAmax);
  const double p = 2.0 - 2.0 * in.epsilon - 2.0 * rep.a_max;
  const double q = 2.0 - 2.0 * in.epsilon;
  rep.inner_var_rate = -in.inner_variance.rate();
  rep.inner_var_coeff = gmean_coeff(in.inner_variance, q);
  rep.level_var_N_rate = -in.level_variance_N.rate();
  rep.level_var_coeff = gmean_coeff(in.level_variance_M, q);
  rep.level0_var_coeff = gmean_coeff(in.level0_variance, p);
  rep.fits = {in.inner_variance, in.level_variance_N, in.level_variance_M, in.level0_variance};

  rep.exact_sampling = !in.bias.has_value();
  if (!rep.exact_sampling) {
    if (!in.level_variance_h || !in.gamma) {
      throw std::invalid_argument("assemble: discretized problems need h-variance and gamma fits");
    }
    if (!in.bias->reliable) throw std::invalid_argument("assemble: unreliable bias fit");
    require_negative(*in.level_variance_h);
    rep.eta_w = in.bias->rate();
    rep.C_w = in.bias->coeff();
    // Variance ~ K_h h^{2 eta_s}; the fit runs against 1/h, so slope = -2 eta_s.
    rep.eta_s_d1 = -0.5 * in.level_variance_h->rate();
    rep.level_var_h_coeff = gmean_coeff(*in.level_variance_h, 2.0 * rep.eta_s_d1);
    rep.gamma = in.gamma->rate();
    rep.fits.push_back(*in.bias);
    rep.fits.push_back(*in.level_variance_h);
    rep.fits.push_back(*in.gamma);
  }
  return rep;
}

RateConstants PilotReport::constants(ConfidenceSpec confidence) const {
  RateConstants c;
  c.epsilon = epsilon;
  c.a_max = a_max;
  c.confidence = confidence;
  c.c0_var = level0_var_coeff;
  c.cI_var = level_var_coeff;
  c.cIII_var = inner_var_coeff;
  if (!exact_sampling) {
    c.eta_w = eta_w;
    c.eta_s = eta_s_d1;
    c.gamma = gamma;
    c.c_w = C_w;
    c.c_h2 = level_var_h_coeff / level_var_coeff;
  }
  return c;
}

}  // namespace mlqmc
