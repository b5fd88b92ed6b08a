#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "mlqmc/lowdisc.hpp"
#include "mlqmc/models.hpp"

namespace mlqmc {

struct LevelSpec {
  std::size_t N = 1;
  std::size_t M = 1;
  Resolution res = Resolution::exact();
};

class LevelSchedule {
 public:
  LevelSchedule() = default;
  explicit LevelSchedule(std::vector<LevelSpec> levels);

  std::size_t L() const { return levels_.size() - 1; }
  std::size_t size() const { return levels_.size(); }
  const LevelSpec& operator[](std::size_t l) const { return levels_[l]; }
  LevelSpec& operator[](std::size_t l) { return levels_[l]; }
  const std::vector<LevelSpec>& levels() const { return levels_; }

  // Estimator preconditions: N >= 1, M powers of two and non-decreasing, h
  // non-increasing. Strict mode (allocation plans) also requires M strictly
  // increasing and, for discretized problems, h strictly decreasing.
  void validate(bool discretized, bool strict) const;

 private:
  std::vector<LevelSpec> levels_;
};

struct RunConfig {
  std::size_t S = 1;
  std::size_t R = 1;
  std::uint64_t seed = 0;
  double shift = 1.0 / std::numbers::sqrt2;
  unsigned threads = 1;
};

struct LevelStats {
  std::size_t level = 0;
  double mean = 0.0;
  double sample_variance = 0.0;    // over the S randomizations
  double variance_of_mean = 0.0;   // sample_variance / S
  std::size_t N = 0;
  std::size_t M = 0;
  Resolution res = Resolution::exact();
};

struct EvaluationCounts {
  std::uint64_t model = 0;      // outer states plus inner feature evaluations
  std::uint64_t integrand = 0;  // log g evaluations
};

struct EstimateReport {
  double estimate = 0.0;
  std::vector<LevelStats> per_level;
  double total_variance = 0.0;
  bool variance_available = false;  // false when S == 1
  std::optional<double> bias_hat;
  double work_units = 0.0;
  EvaluationCounts evaluations;
  std::size_t S = 1;
  std::size_t R = 1;
};

struct Integrand {
  std::size_t dim = 1;
  std::function<double(std::span<const double>)> fn;
};

EstimateReport mc_estimate(const Integrand& phi, std::size_t M, std::uint64_t seed);
EstimateReport rqmc_estimate(const Integrand& phi, std::size_t M, std::size_t S,
                             std::uint64_t seed);
EstimateReport dlmc_estimate(const NestedProblem& problem, std::size_t N, std::size_t M,
                             Resolution res, std::uint64_t seed, unsigned threads = 1);
EstimateReport rdlqmc_estimate(const NestedProblem& problem, std::size_t N, std::size_t M,
                               Resolution res, std::size_t S, std::size_t R, std::uint64_t seed,
                               unsigned threads = 1);
EstimateReport mldlqmc_estimate(const NestedProblem& problem, const LevelSchedule& schedule,
                                const RunConfig& cfg);

// Leading-order inner bias proxy from log inner means laid out as groups of R
// consecutive replicates. Absent when R < 2.
std::optional<double> bias_hat(std::span<const double> log_inner_means, std::size_t R,
                               OuterMap map);

// sum (N_l + M_l) h_l^-gamma + sum N_l M_l, with the coarse M_{l-1} included
// in level l's products and level L's fine product scaled by R.
double work_units(const LevelSchedule& schedule, double gamma, std::size_t R = 1);

// Shared building blocks, also used by the pilot runs.
PointSet shifted_inner_points(const DigitalNetGenerator& gen, std::size_t M, double shift);
// f(mean_m g(y, x_m)) over the first `count` rows; scratch is resized as needed.
double nested_term(const NestedProblem& problem, std::span<const double> state,
                   const InnerBlock& inner, std::size_t count, std::vector<double>& scratch);
// log mean_m g(y, x_m) over the first `count` rows.
double log_inner_mean(const NestedProblem& problem, std::span<const double> state,
                      const InnerBlock& inner, std::size_t count, std::vector<double>& scratch);

}  // namespace mlqmc
