#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mlqmc/estimators.hpp"
#include "mlqmc/hash.hpp"
#include "mlqmc/kernels.hpp"
#include "mlqmc/parallel.hpp"
#include "mlqmc/stats.hpp"

namespace mlqmc {

LevelSchedule::LevelSchedule(std::vector<LevelSpec> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("LevelSchedule: at least one level required");
}

void LevelSchedule::validate(bool discretized, bool strict) const {
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const auto& lv = levels_[l];
    const std::string where = "level " + std::to_string(l) + ": ";
    if (lv.N < 1) throw std::invalid_argument(where + "N must be >= 1");
    if (!std::has_single_bit(lv.M)) throw std::invalid_argument(where + "M must be a power of two");
    if (discretized && lv.res.is_exact() && l + 1 < levels_.size() &&
        !levels_[l + 1].res.is_exact()) {
      throw std::invalid_argument(where + "exact level followed by a mesh level");
    }
    if (l == 0) continue;
    const auto& prev = levels_[l - 1];
    if (lv.M < prev.M || (strict && lv.M == prev.M)) {
      throw std::invalid_argument(where + "M must increase across levels");
    }
    if (discretized && !lv.res.is_exact() && !prev.res.is_exact()) {
      if (lv.res.h() > prev.res.h() || (strict && lv.res.h() == prev.res.h())) {
        throw std::invalid_argument(where + "h must decrease across levels");
      }
    }
  }
}

namespace {

LevelStats summarize(std::size_t level, std::span<const double> per_s, std::size_t N,
                     std::size_t M, Resolution res) {
  const MeanVar mv = sample_mean_var(per_s);
  LevelStats st;
  st.level = level;
  st.mean = mv.mean;
  st.sample_variance = mv.variance;
  st.variance_of_mean = mv.variance / static_cast<double>(per_s.size());
  st.N = N;
  st.M = M;
  st.res = res;
  return st;
}

void finalize(EstimateReport& rep) {
  rep.estimate = 0.0;
  rep.total_variance = 0.0;
  for (const auto& lv : rep.per_level) {
    rep.estimate += lv.mean;
    rep.total_variance += lv.variance_of_mean;
  }
  rep.variance_available = rep.S >= 2;
}

}  // namespace

EstimateReport mc_estimate(const Integrand& phi, std::size_t M, std::uint64_t seed) {
  if (M < 2) throw std::invalid_argument("mc_estimate: M must be >= 2");
  const CounterRng rng(seed, stream_id("mc", {}));
  std::vector<double> x(phi.dim), values(M);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < phi.dim; ++j) x[j] = rng.uniform(i * phi.dim + j);
    values[i] = phi.fn(x);
  }
  const MeanVar mv = sample_mean_var(values);
  EstimateReport rep;
  LevelStats st;
  st.mean = mv.mean;
  st.sample_variance = mv.variance;
  st.variance_of_mean = mv.variance / static_cast<double>(M);
  st.N = M;
  st.M = 1;
  rep.per_level.push_back(st);
  rep.S = 1;
  rep.work_units = static_cast<double>(M);
  rep.evaluations.integrand = M;
  finalize(rep);
  rep.variance_available = true;
  return rep;
}

EstimateReport rqmc_estimate(const Integrand& phi, std::size_t M, std::size_t S,
                             std::uint64_t seed) {
  if (!std::has_single_bit(M)) throw std::invalid_argument("rqmc_estimate: M must be a power of two");
  if (S < 1) throw std::invalid_argument("rqmc_estimate: S must be >= 1");
  const DigitalNetGenerator gen(phi.dim);
  std::vector<double> per_s(S), values(M);
  for (std::size_t s = 0; s < S; ++s) {
    const PointSet ps = owen_scramble(gen, M, {seed, stream_id("rqmc", {s})});
    for (std::size_t i = 0; i < M; ++i) values[i] = phi.fn(ps.row(i));
    per_s[s] = pairwise_sum(values) / static_cast<double>(M);
  }
  EstimateReport rep;
  rep.S = S;
  rep.per_level.push_back(summarize(0, per_s, M, 1, Resolution::exact()));
  rep.work_units = static_cast<double>(S * M);
  rep.evaluations.integrand = S * M;
  finalize(rep);
  return rep;
}

PointSet shifted_inner_points(const DigitalNetGenerator& gen, std::size_t M, double shift) {
  const std::vector<double> sh(gen.dimension(), shift);
  return shift_mod1(generate(gen, M), sh);
}

double log_inner_mean(const NestedProblem& problem, std::span<const double> state,
                      const InnerBlock& inner, std::size_t count, std::vector<double>& scratch) {
  if (scratch.size() < count) scratch.resize(count);
  std::span<double> out(scratch.data(), count);
  problem.log_g_block(state, inner, count, out);
  return kernels::log_mean_exp(out);
}

double nested_term(const NestedProblem& problem, std::span<const double> state,
                   const InnerBlock& inner, std::size_t count, std::vector<double>& scratch) {
  return outer_map_value(problem.outer_map(),
                         log_inner_mean(problem, state, inner, count, scratch));
}

EstimateReport dlmc_estimate(const NestedProblem& problem, std::size_t N, std::size_t M,
                             Resolution res, std::uint64_t seed, unsigned threads) {
  if (N < 1 || M < 1) throw std::invalid_argument("dlmc_estimate: N and M must be >= 1");
  const std::size_t d1 = problem.outer_dim();
  const std::size_t d2 = problem.inner_dim();
  const CounterRng outer_rng(seed, stream_id("dlmc/outer", {}));
  std::vector<double> values(N);
  parallel_for_chunks(N, threads, [&](std::size_t b, std::size_t e) {
    std::vector<double> y(d1), scratch;
    PointSet x(M, d2);
    for (std::size_t n = b; n < e; ++n) {
      for (std::size_t j = 0; j < d1; ++j) y[j] = outer_rng.uniform(n * d1 + j);
      const CounterRng inner_rng(seed, stream_id("dlmc/inner", {n}));
      for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t j = 0; j < d2; ++j) x(m, j) = inner_rng.uniform(m * d2 + j);
      }
      const InnerBlock block = problem.inner_block(x, res);
      values[n] = problem.outer_offset(y) +
                  nested_term(problem, problem.outer_state(y, res), block, M, scratch);
    }
  });
  const MeanVar mv = sample_mean_var(values);
  EstimateReport rep;
  LevelStats st;
  st.mean = mv.mean;
  st.sample_variance = mv.variance;
  st.variance_of_mean = mv.variance / static_cast<double>(N);
  st.N = N;
  st.M = M;
  st.res = res;
  rep.per_level.push_back(st);
  const double n = static_cast<double>(N), m = static_cast<double>(M);
  rep.work_units = (n + n * m) * res.cost_factor(problem.gamma()) + n * m;
  rep.evaluations.model = N + N * M;
  rep.evaluations.integrand = N * M;
  finalize(rep);
  rep.variance_available = N >= 2;
  return rep;
}

EstimateReport rdlqmc_estimate(const NestedProblem& problem, std::size_t N, std::size_t M,
                               Resolution res, std::size_t S, std::size_t R, std::uint64_t seed,
                               unsigned threads) {
  if (!std::has_single_bit(N) || !std::has_single_bit(M)) {
    throw std::invalid_argument("rdlqmc_estimate: N and M must be powers of two");
  }
  if (S < 1 || R < 1) throw std::invalid_argument("rdlqmc_estimate: S and R must be >= 1");
  const DigitalNetGenerator gen_outer(problem.outer_dim());
  const DigitalNetGenerator gen_inner(problem.inner_dim());
  std::vector<double> per_s(S), values(N);
  for (std::size_t s = 0; s < S; ++s) {
    const PointSet y = owen_scramble(gen_outer, N, {seed, stream_id("rdlqmc/outer", {s})});
    parallel_for_chunks(N, threads, [&](std::size_t b, std::size_t e) {
      std::vector<double> scratch, logs(R);
      for (std::size_t n = b; n < e; ++n) {
        const auto state = problem.outer_state(y.row(n), res);
        for (std::size_t r = 0; r < R; ++r) {
          const PointSet x =
              owen_scramble(gen_inner, M, {seed, stream_id("rdlqmc/inner", {s, n, r})});
          logs[r] = log_inner_mean(problem, state, problem.inner_block(x, res), M, scratch);
        }
        values[n] = problem.outer_offset(y.row(n)) +
                    outer_map_value(problem.outer_map(), kernels::log_mean_exp(logs));
      }
    });
    per_s[s] = pairwise_sum(values) / static_cast<double>(N);
  }
  EstimateReport rep;
  rep.S = S;
  rep.R = R;
  rep.per_level.push_back(summarize(0, per_s, N, M, res));
  const double cf = res.cost_factor(problem.gamma());
  const double n = static_cast<double>(N), m = static_cast<double>(M * R);
  rep.work_units = static_cast<double>(S) * ((n + n * m) * cf + n * m);
  rep.evaluations.model = S * (N + N * M * R);
  rep.evaluations.integrand = S * N * M * R;
  finalize(rep);
  return rep;
}

EstimateReport mldlqmc_estimate(const NestedProblem& problem, const LevelSchedule& schedule,
                                const RunConfig& cfg) {
  if (cfg.S < 1 || cfg.R < 1) throw std::invalid_argument("mldlqmc_estimate: S and R must be >= 1");
  schedule.validate(problem.discretized(), /*strict=*/false);
  const std::size_t L = schedule.L();
  const DigitalNetGenerator gen_outer(problem.outer_dim());
  const DigitalNetGenerator gen_inner(problem.inner_dim());
  const OuterMap fmap = problem.outer_map();

  // Deterministic shifted inner blocks for levels 0..L-1, one per level; the
  // coarse term of level l+1 reuses the block of level l.
  std::vector<InnerBlock> det_blocks;
  EvaluationCounts counts;
  if (L > 0) {
    std::size_t m_max = 0;
    for (std::size_t l = 0; l < L; ++l) m_max = std::max(m_max, schedule[l].M);
    const PointSet det = shifted_inner_points(gen_inner, m_max, cfg.shift);
    for (std::size_t l = 0; l < L; ++l) {
      det_blocks.push_back(problem.inner_block(det.prefix(schedule[l].M), schedule[l].res));
      counts.model += schedule[l].M;
    }
  }

  EstimateReport rep;
  rep.S = cfg.S;
  rep.R = cfg.R;
  std::vector<double> final_log_means;  // (s, n, r) at level L, for bias_hat

  for (std::size_t l = 0; l <= L; ++l) {
    const LevelSpec& fine = schedule[l];
    const bool last = l == L;
    const std::size_t N = fine.N;
    std::vector<double> per_s(cfg.S), values(N);
    for (std::size_t s = 0; s < cfg.S; ++s) {
      const PointSet y =
          owen_scramble(gen_outer, N, {cfg.seed, stream_id("mldlqmc/outer", {l, s})});

      std::vector<InnerBlock> rand_blocks;
      if (last) {
        for (std::size_t r = 0; r < cfg.R; ++r) {
          const PointSet x =
              owen_scramble(gen_inner, fine.M, {cfg.seed, stream_id("mldlqmc/inner", {s, r})});
          rand_blocks.push_back(problem.inner_block(x, fine.res));
        }
      }
      std::vector<double> log_means(last ? N * cfg.R : 0);

      parallel_for_chunks(N, cfg.threads, [&](std::size_t b, std::size_t e) {
        std::vector<double> scratch;
        for (std::size_t n = b; n < e; ++n) {
          const auto yn = y.row(n);
          const auto state = problem.outer_state(yn, fine.res);
          double fine_term;
          if (last) {
            double* a = log_means.data() + n * cfg.R;
            for (std::size_t r = 0; r < cfg.R; ++r) {
              a[r] = log_inner_mean(problem, state, rand_blocks[r], fine.M, scratch);
            }
            fine_term =
                outer_map_value(fmap, kernels::log_mean_exp(std::span<const double>(a, cfg.R)));
          } else {
            fine_term = nested_term(problem, state, det_blocks[l], fine.M, scratch);
          }
          double v;
          if (l == 0) {
            v = problem.outer_offset(yn) + fine_term;
          } else {
            const LevelSpec& coarse = schedule[l - 1];
            const auto cstate =
                coarse.res == fine.res ? state : problem.outer_state(yn, coarse.res);
            v = fine_term - nested_term(problem, cstate, det_blocks[l - 1], coarse.M, scratch);
          }
          values[n] = v;
        }
      });
      per_s[s] = pairwise_sum(values) / static_cast<double>(N);
      if (last) final_log_means.insert(final_log_means.end(), log_means.begin(), log_means.end());

      const std::uint64_t states = (l > 0 && !(schedule[l - 1].res == fine.res)) ? 2 : 1;
      counts.model += N * states + (last ? fine.M * cfg.R : 0);
      counts.integrand += N * (fine.M * (last ? cfg.R : 1) + (l > 0 ? schedule[l - 1].M : 0));
    }
    rep.per_level.push_back(summarize(l, per_s, N, fine.M, fine.res));
  }

  rep.bias_hat = bias_hat(final_log_means, cfg.R, fmap);
  rep.work_units = static_cast<double>(cfg.S) * work_units(schedule, problem.gamma(), cfg.R);
  rep.evaluations = counts;
  finalize(rep);
  return rep;
}

std::optional<double> bias_hat(std::span<const double> log_inner_means, std::size_t R,
                               OuterMap map) {
  if (R < 2 || log_inner_means.empty()) return std::nullopt;
  if (log_inner_means.size() % R != 0) {
    throw std::invalid_argument("bias_hat: data length must be a multiple of R");
  }
  const double curvature = outer_map_curvature(map);
  const std::size_t groups = log_inner_means.size() / R;
  std::vector<double> terms(groups), b(R);
  for (std::size_t g = 0; g < groups; ++g) {
    const auto a = log_inner_means.subspan(g * R, R);
    const double top = *std::max_element(a.begin(), a.end());
    // Scale-free: v / mbar^2 is unchanged by the common factor exp(-top).
    for (std::size_t r = 0; r < R; ++r) b[r] = std::exp(a[r] - top);
    const MeanVar mv = sample_mean_var(b);
    terms[g] = curvature * (mv.variance / static_cast<double>(R)) / (mv.mean * mv.mean);
  }
  return 0.5 * pairwise_sum(terms) / static_cast<double>(groups);
}

double work_units(const LevelSchedule& schedule, double gamma, std::size_t R) {
  const std::size_t L = schedule.L();
  double evals = 0.0, products = 0.0;
  for (std::size_t l = 0; l <= L; ++l) {
    const auto& lv = schedule[l];
    const double N = static_cast<double>(lv.N);
    const double M = static_cast<double>(lv.M);
    evals += (N + M) * lv.res.cost_factor(gamma);
    double inner = M * (l == L ? static_cast<double>(R) : 1.0);
    if (l > 0) inner += static_cast<double>(schedule[l - 1].M);
    products += N * inner;
  }
  return evals + products;
}

}  // namespace mlqmc
