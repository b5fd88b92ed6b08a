#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "mlqmc/estimators.hpp"
#include "mlqmc/stats.hpp"

namespace mlqmc {

// Rates and aggregated variance coefficients of the level-variance model
//   level 0:        c0 / N^p
//   level 1..L:     cI (M^{-2+2eps} + c_h2 h^{2 eta_s}) / N^p
//   plus cIII M_L^{-2+2eps} from the scrambled inner points at level L
// with p = 2 - 2 eps - 2 A_max, and bias C_w h_L^{eta_w}.
struct RateConstants {
  double eta_w = 1.0;
  double eta_s = 1.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  double a_max = 0.0;
  double c_w = 0.0;
  double c0_var = 1.0;
  double cI_var = 1.0;
  double c_h2 = 0.0;
  double cIII_var = 1.0;
  ConfidenceSpec confidence{};

  double outer_exponent() const { return 2.0 - 2.0 * epsilon - 2.0 * a_max; }
  void validate() const;
};

// Shape of the level schedule: M_l = M0 b^l (rounded up to powers of two) and
// h_l = h0 2^-l, or exact evaluation when h0 is absent.
struct ScheduleShape {
  std::size_t M0 = 256;
  std::optional<double> h0;
  std::optional<double> m_base;  // default 2^{eta_w/(1-eps)}, or 2 for exact sampling

  double log2_m_base(const RateConstants& c) const;
};

struct AllocationPlan {
  LevelSchedule schedule;
  double predicted_variance = 0.0;
  double predicted_bias = 0.0;
  double predicted_work = 0.0;
  double tol = 0.0;
  std::vector<double> N_continuous;
};

struct LevelWeights {
  std::vector<double> W;
  std::vector<double> D;
};

enum class WorkCase { kExact, kVarianceDominated, kBoundary, kBiasDominated };

struct WorkPrediction {
  double work = 0.0;
  double exponent = 0.0;
  WorkCase work_case = WorkCase::kExact;
  bool log_factor = false;
};

std::string_view work_case_name(WorkCase c);

std::vector<std::size_t> m_schedule(std::size_t M0, double eta_w, double epsilon, std::size_t L,
                                    std::optional<double> base_override = std::nullopt);
std::vector<double> h_schedule(double h0, std::size_t L);
std::size_t choose_L(double tol, const RateConstants& c, std::optional<double> h0, std::size_t M0,
                     double log2_m_base = 1.0);
LevelWeights level_weights(const LevelSchedule& schedule, const RateConstants& c);
// Continuous optimum of sum N_l W_l subject to sum D_l N_l^-p = tol^2 / (8 c_alpha^2).
std::vector<double> choose_N_continuous(double tol, const RateConstants& c,
                                        const LevelWeights& w);
std::vector<std::size_t> choose_N(double tol, const RateConstants& c, const LevelWeights& w);
std::size_t ceil_pow2(double x);

AllocationPlan allocate(double tol, const RateConstants& c, const ScheduleShape& shape);
double predicted_variance(const LevelSchedule& schedule, const RateConstants& c);
WorkPrediction predict_work(const AllocationPlan& plan, const RateConstants& c);

}  // namespace mlqmc
