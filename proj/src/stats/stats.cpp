#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mlqmc/kernels.hpp"
#include "mlqmc/stats.hpp"

namespace mlqmc {

ConfidenceSpec::ConfidenceSpec(double alpha, ConfidenceMethod method)
    : alpha_(alpha), method_(method) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  c_alpha_ = method == ConfidenceMethod::kClt ? inverse_normal_cdf(1.0 - alpha / 2.0)
                                              : 1.0 / std::sqrt(alpha);
}

double LogLogFit::coeff() const { return std::exp2(intercept); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double erf(double x) { return std::erf(x); }

namespace {

// Acklam's rational approximation for the lower half, u in (0, 0.5].
double acklam_lower(double u) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (u < p_low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double inverse_lower(double u) {
  double x = acklam_lower(u);
  // One Halley step against the erfc-based CDF.
  const double e = normal_cdf(x) - u;
  const double g = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - g / (1.0 + 0.5 * x * g);
}

}  // namespace

double inverse_normal_cdf(double u) {
  if (!std::isfinite(u)) throw std::invalid_argument("inverse_normal_cdf: non-finite input");
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("inverse_normal_cdf: u outside [0,1]");
  constexpr double lo = 0x1.0p-53;
  u = std::clamp(u, lo, 1.0 - lo);
  if (u == 0.5) return 0.0;
  return u < 0.5 ? inverse_lower(u) : -inverse_lower(1.0 - u);
}

double truncated_inverse_normal_cdf(double u, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("truncated_inverse_normal_cdf: c must be > 0");
  if (!std::isfinite(u)) throw std::invalid_argument("truncated_inverse_normal_cdf: non-finite u");
  u = std::clamp(u, 0.0, 1.0);
  const double tail = normal_cdf(-c);
  const double width = 1.0 - 2.0 * tail;
  // Map the lower half directly and the upper half through the antisymmetry,
  // so both endpoints are resolved in the accurate lower tail.
  const double z = u <= 0.5 ? inverse_normal_cdf(tail + width * u)
                            : -inverse_normal_cdf(tail + width * (1.0 - u));
  return std::clamp(z, -c, c);
}

double truncation_radius(double tol, const TruncationSpec& spec) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("truncation_radius: tol must lie in (0,1)");
  if (!(spec.q_tilde > 0.0) || !(spec.p >= 0.0)) {
    throw std::invalid_argument("truncation_radius: q_tilde must be > 0 and p >= 0");
  }
  return spec.q_tilde * std::sqrt(2.0 * (1.0 + spec.p)) * std::sqrt(std::log(1.0 / tol));
}

double log_mean_exp(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("log_mean_exp: empty input");
  return kernels::log_mean_exp(values);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

MeanVar sample_mean_var(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("sample_mean_var: empty input");
  const double n = static_cast<double>(values.size());
  MeanVar r;
  r.mean = pairwise_sum(values) / n;
  if (values.size() == 1) {
    r.single_sample = true;
    return r;
  }
  double ss = 0.0;
  for (double x : values) ss += (x - r.mean) * (x - r.mean);
  r.variance = ss / (n - 1.0);
  return r;
}

LogLogFit loglog_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("loglog_fit: need equal lengths >= 2");
  }
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("loglog_fit: entries must be positive");
    }
    lx[i] = std::log2(xs[i]);
    ly[i] = std::log2(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_fit: degenerate xs");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / static_cast<double>(n));
  return fit;
}

}  // namespace mlqmc
