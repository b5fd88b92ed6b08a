#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mlqmc/allocation.hpp"
#include "mlqmc/estimators.hpp"
#include "mlqmc/stats.hpp"

namespace mlqmc {

// Observations along one dyadic grid and the log2-log2 fit through them.
struct RateFit {
  std::string quantity;
  std::vector<double> grid;      // abscissa used for the fit (N, M, 1/h or h)
  std::vector<double> observed;
  LogLogFit fit;
  std::size_t dropped = 0;       // coarse points dropped by the pre-asymptotic guard
  bool reliable = true;
  std::size_t S = 0;
  std::uint64_t seed = 0;

  double rate() const { return fit.slope; }
  double coeff() const { return fit.coeff(); }
};

// OLS fit with a pre-asymptotic guard: drop the coarsest point while its
// log2 residual against the fit of the remaining points exceeds both 3x their
// RMS residual and kGuardFloorLog2. At least three points are kept.
inline constexpr double kGuardFloorLog2 = 0.1;
RateFit fit_rate(std::string quantity, std::vector<double> grid, std::vector<double> observed);

RateFit pilot_bias(const NestedProblem& problem, const std::vector<double>& h_grid, double h_ref,
                   std::size_t N, std::size_t M, std::size_t S, std::uint64_t seed,
                   unsigned threads = 1);
RateFit pilot_inner_variance(const NestedProblem& problem, const std::vector<std::size_t>& M_grid,
                             Resolution res, std::size_t S, std::uint64_t seed,
                             unsigned threads = 1);

enum class LevelVarianceMode { kN, kM, kH };

// Exactly one of the three grids varies according to `mode`; the other
// quantities come from the fixed fields.
struct LevelVarianceSetup {
  LevelVarianceMode mode = LevelVarianceMode::kN;
  std::vector<double> grid;      // N values, fine M values, or fine h values
  std::size_t N = 1;
  std::size_t M_coarse = 1;
  std::size_t M_fine = 2;
  Resolution res_coarse = Resolution::exact();
  Resolution res_fine = Resolution::exact();
  std::size_t m_ratio = 2;       // kM: M_coarse = M_fine / m_ratio
};

RateFit pilot_level_variance(const NestedProblem& problem, const LevelVarianceSetup& setup,
                             std::size_t S, double shift, std::uint64_t seed,
                             unsigned threads = 1);
// Variance over S of the level-0 term vs N.
RateFit pilot_level0_variance(const NestedProblem& problem, const std::vector<double>& N_grid,
                              std::size_t M0, Resolution res0, std::size_t S, double shift,
                              std::uint64_t seed, unsigned threads = 1);

using TimedForward = std::function<void(double h)>;
RateFit pilot_gamma(const NestedProblem& problem, const TimedForward& forward,
                    const std::vector<double>& h_grid, std::size_t reps);

struct PilotReport {
  double eta_w = 0.0;
  double C_w = 0.0;
  double eta_s_d1 = 0.0;
  double gamma = 0.0;
  double inner_var_coeff = 0.0;
  double inner_var_rate = 0.0;
  double level_var_coeff = 0.0;
  double level_var_h_coeff = 0.0;
  double level0_var_coeff = 0.0;
  double level_var_N_rate = 0.0;
  double epsilon = 0.0;
  double a_max = 0.0;
  std::vector<RateFit> fits;
  bool exact_sampling = true;

  RateConstants constants(ConfidenceSpec confidence = {}) const;
};

struct PilotInputs {
  RateFit inner_variance;
  RateFit level_variance_N;
  RateFit level_variance_M;
  RateFit level0_variance;
  std::optional<RateFit> bias;
  std::optional<RateFit> level_variance_h;
  std::optional<RateFit> gamma;
  double epsilon = 0.0;
  // Absent: taken from the level-variance-vs-N rate, A = (2 - 2 eps - rate) / 2,
  // clamped to [0, kMaxFittedAmax].
  std::optional<double> a_max;
};

inline constexpr double kMaxFittedAmax = 0.45;

PilotReport assemble(const PilotInputs& in);

// Pilot grids per model. The linear suite fits inner, level and level-0
// variances; the Poisson suite adds bias, h-variance and timing fits.
struct PilotSuiteConfig {
  std::size_t S = 0;  // 0: model default (200 linear, 100 Poisson)
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool quick = false;
  double shift = 1.0 / std::numbers::sqrt2;
  std::size_t M0 = 256;
  double h0 = 1.0 / 16;  // discretized models only
};

PilotInputs run_pilot_suite(const EigModel& model, const PilotSuiteConfig& cfg);

}  // namespace mlqmc
