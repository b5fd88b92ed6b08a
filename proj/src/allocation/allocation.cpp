#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "mlqmc/allocation.hpp"

namespace mlqmc {

namespace {

// ceil that ignores floating noise just above an integer
double ceil_tol(double x) { return std::ceil(x - 1e-9); }

}  // namespace

void RateConstants::validate() const {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in [0,1)");
  if (!(a_max >= 0.0 && a_max < 0.5)) throw std::invalid_argument("A_max must lie in [0,1/2)");
  if (!(epsilon + a_max < 1.0)) throw std::invalid_argument("epsilon + A_max must be < 1");
  if (!(eta_w > 0.0) || !(eta_s > 0.0)) throw std::invalid_argument("rates must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(c0_var > 0.0) || !(cI_var > 0.0) || !(cIII_var > 0.0)) {
    throw std::invalid_argument("variance coefficients must be positive");
  }
  if (!(c_w >= 0.0) || !(c_h2 >= 0.0)) throw std::invalid_argument("C_w and c_h2 must be >= 0");
}

double ScheduleShape::log2_m_base(const RateConstants& c) const {
  if (m_base) {
    if (!(*m_base > 1.0)) throw std::invalid_argument("M schedule base must exceed 1");
    return std::log2(*m_base);
  }
  return h0 ? c.eta_w / (1.0 - c.epsilon) : 1.0;
}

std::string_view work_case_name(WorkCase c) {
  switch (c) {
    case WorkCase::kExact: return "exact";
    case WorkCase::kVarianceDominated: return "strong-rate-dominant";
    case WorkCase::kBoundary: return "boundary-log";
    case WorkCase::kBiasDominated: return "strong-rate-deficient";
  }
  return "unknown";
}

std::size_t ceil_pow2(double x) {
  if (!(x <= 0x1.0p62)) throw std::overflow_error("ceil_pow2: value too large");
  if (x <= 1.0) return 1;
  const double e = ceil_tol(std::log2(x));
  std::size_t p = std::size_t{1} << static_cast<unsigned>(e);
  while (static_cast<double>(p) < x * (1.0 - 1e-12)) p <<= 1;  // guard the tolerance above
  return p;
}

std::vector<std::size_t> m_schedule(std::size_t M0, double eta_w, double epsilon, std::size_t L,
                                    std::optional<double> base_override) {
  if (!std::has_single_bit(M0)) throw std::invalid_argument("m_schedule: M0 must be a power of two");
  const double log2_base = base_override ? std::log2(*base_override) : eta_w / (1.0 - epsilon);
  if (!(log2_base > 0.0)) throw std::invalid_argument("m_schedule: growth base must exceed 1");
  const int m0 = std::countr_zero(M0);
  std::vector<std::size_t> M(L + 1);
  for (std::size_t l = 0; l <= L; ++l) {
    const double e = ceil_tol(static_cast<double>(m0) + static_cast<double>(l) * log2_base);
    if (e > 62) throw std::overflow_error("m_schedule: M_l exceeds 2^62");
    M[l] = std::size_t{1} << static_cast<unsigned>(e);
  }
  return M;
}

std::vector<double> h_schedule(double h0, std::size_t L) {
  if (!(h0 > 0.0)) throw std::invalid_argument("h_schedule: h0 must be positive");
  std::vector<double> h(L + 1);
  for (std::size_t l = 0; l <= L; ++l) h[l] = std::ldexp(h0, -static_cast<int>(l));
  return h;
}

std::size_t choose_L(double tol, const RateConstants& c, std::optional<double> h0, std::size_t M0,
                     double log2_m_base) {
  if (!(tol > 0.0)) throw std::invalid_argument("choose_L: tol must be positive");
  double best = 0.0;
  if (h0 && c.c_w > 0.0) {
    // bias constraint C_w h0^eta_w 2^{-L eta_w} <= tol/4
    best = std::max(best, std::log2(4.0 * c.c_w * std::pow(*h0, c.eta_w) / tol) / c.eta_w);
  }
  // inner-variance constraint cIII M_L^{-2+2eps} <= tol^2 / (8 c_alpha^2)
  const double x = 2.0 * std::sqrt(2.0) * std::sqrt(c.cIII_var) * c.confidence.c_alpha() /
                   (tol * std::pow(static_cast<double>(M0), 1.0 - c.epsilon));
  best = std::max(best, std::log2(x) / (1.0 - c.epsilon) / log2_m_base);
  return static_cast<std::size_t>(std::max(0.0, ceil_tol(best)));
}

LevelWeights level_weights(const LevelSchedule& schedule, const RateConstants& c) {
  const std::size_t L = schedule.L();
  LevelWeights w;
  w.W.resize(L + 1);
  w.D.resize(L + 1);
  for (std::size_t l = 0; l <= L; ++l) {
    const auto& lv = schedule[l];
    w.W[l] = static_cast<double>(lv.M) * lv.res.cost_factor(c.gamma);
    const double h_term =
        lv.res.is_exact() ? 0.0 : c.c_h2 * std::pow(lv.res.h(), 2.0 * c.eta_s);
    // Level L keeps the M-term too: its fine inner points are scrambled, but the
    // difference against the coarse term still fluctuates with the outer sample.
    w.D[l] = l == 0 ? c.c0_var
                    : c.cI_var * (std::pow(static_cast<double>(lv.M), -2.0 + 2.0 * c.epsilon) +
                                  h_term);
  }
  return w;
}

std::vector<double> choose_N_continuous(double tol, const RateConstants& c,
                                        const LevelWeights& w) {
  if (!(tol > 0.0)) throw std::invalid_argument("choose_N: tol must be positive");
  if (w.W.size() != w.D.size() || w.W.empty()) throw std::invalid_argument("choose_N: bad weights");
  const double p = c.outer_exponent();
  double sum = 0.0;
  for (std::size_t k = 0; k < w.W.size(); ++k) {
    if (!(w.W[k] > 0.0) || w.D[k] < 0.0) throw std::invalid_argument("choose_N: bad weights");
    sum += std::pow(w.D[k] * std::pow(w.W[k], p), 1.0 / (p + 1.0));
  }
  const double lead = std::pow(std::sqrt(8.0) * c.confidence.c_alpha() / tol,
                               1.0 / (1.0 - c.epsilon - c.a_max)) *
                      std::pow(sum, 1.0 / p);
  std::vector<double> N(w.W.size());
  for (std::size_t l = 0; l < N.size(); ++l) {
    N[l] = lead * std::pow(w.D[l] / w.W[l], 1.0 / (p + 1.0));
  }
  return N;
}

std::vector<std::size_t> choose_N(double tol, const RateConstants& c, const LevelWeights& w) {
  const auto cont = choose_N_continuous(tol, c, w);
  std::vector<std::size_t> N(cont.size());
  for (std::size_t l = 0; l < N.size(); ++l) N[l] = ceil_pow2(std::ceil(cont[l] - 1e-9));
  return N;
}

double predicted_variance(const LevelSchedule& schedule, const RateConstants& c) {
  const auto w = level_weights(schedule, c);
  const double p = c.outer_exponent();
  double v = 0.0;
  for (std::size_t l = 0; l < w.D.size(); ++l) {
    v += w.D[l] / std::pow(static_cast<double>(schedule[l].N), p);
  }
  v += c.cIII_var * std::pow(static_cast<double>(schedule[schedule.L()].M), -2.0 + 2.0 * c.epsilon);
  return v;
}

AllocationPlan allocate(double tol, const RateConstants& c, const ScheduleShape& shape) {
  c.validate();
  const double log2_base = shape.log2_m_base(c);
  const std::size_t L = choose_L(tol, c, shape.h0, shape.M0, log2_base);
  const auto M = m_schedule(shape.M0, c.eta_w, c.epsilon, L, std::exp2(log2_base));
  std::vector<LevelSpec> levels(L + 1);
  if (shape.h0) {
    const auto h = h_schedule(*shape.h0, L);
    for (std::size_t l = 0; l <= L; ++l) levels[l].res = Resolution::mesh(h[l]);
  }
  for (std::size_t l = 0; l <= L; ++l) levels[l].M = M[l];
  LevelSchedule schedule(std::move(levels));
  const auto w = level_weights(schedule, c);

  AllocationPlan plan;
  plan.tol = tol;
  plan.N_continuous = choose_N_continuous(tol, c, w);
  const auto N = choose_N(tol, c, w);
  for (std::size_t l = 0; l <= L; ++l) schedule[l].N = N[l];
  schedule.validate(shape.h0.has_value(), /*strict=*/true);
  plan.predicted_variance = predicted_variance(schedule, c);
  plan.predicted_bias =
      shape.h0 ? c.c_w * std::pow(schedule[L].res.h(), c.eta_w) : 0.0;
  plan.predicted_work = work_units(schedule, c.gamma);
  plan.schedule = std::move(schedule);
  return plan;
}

WorkPrediction predict_work(const AllocationPlan& plan, const RateConstants& c) {
  WorkPrediction out;
  out.work = work_units(plan.schedule, c.gamma);
  const double e1 = 1.0 / (1.0 - c.epsilon - c.a_max);
  if (c.gamma == 0.0) {
    out.exponent = e1;
    out.work_case = WorkCase::kExact;
    return out;
  }
  const double q = 1.0 / (1.0 - c.epsilon) + c.gamma / c.eta_w;
  const double r = c.eta_s / (c.eta_w * (1.0 - c.epsilon - c.a_max));
  if (std::abs(r - q) <= 1e-12 * std::max(r, q)) {
    out.work_case = WorkCase::kBoundary;
    out.log_factor = true;
    out.exponent = std::max(q, e1);
  } else if (r > q) {
    out.work_case = WorkCase::kVarianceDominated;
    out.exponent = std::max(q, e1);
  } else {
    out.work_case = WorkCase::kBiasDominated;
    out.exponent = std::max(q, e1 - r + q);
  }
  return out;
}

}  // namespace mlqmc
