#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mlqmc {

enum class ConfidenceMethod { kClt, kChebyshev };

class ConfidenceSpec {
 public:
  ConfidenceSpec(double alpha = 0.05, ConfidenceMethod method = ConfidenceMethod::kClt);
  double alpha() const { return alpha_; }
  ConfidenceMethod method() const { return method_; }
  double c_alpha() const { return c_alpha_; }

 private:
  double alpha_;
  ConfidenceMethod method_;
  double c_alpha_;
};

struct TruncationSpec {
  double q_tilde = 1.0;
  double p = 0.5;
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // log2 of the fitted coefficient
  double residual_rms = 0.0;
  double coeff() const;
};

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
  bool single_sample = false;
};

double normal_cdf(double z);
double inverse_normal_cdf(double u);
double erf(double x);
double truncated_inverse_normal_cdf(double u, double c);
double truncation_radius(double tol, const TruncationSpec& spec);

// log((1/M) sum exp(v_i)), max-shifted.
double log_mean_exp(std::span<const double> values);
MeanVar sample_mean_var(std::span<const double> values);
// Pairwise summation; the reduction order depends only on the length.
double pairwise_sum(std::span<const double> values);
LogLogFit loglog_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace mlqmc
