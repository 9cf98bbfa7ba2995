#pragma once

#include <span>
#include <vector>

namespace painfair {

double mean(std::span<const double> xs);

// Unbiased sample variance (n-1 denominator), two-pass.
double sample_variance(std::span<const double> xs);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
};

// Two-sample Welch t statistic with Welch-Satterthwaite degrees of freedom.
// Requires n >= 2 per sample and a nonzero pooled variance.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

// One-sample t test of mean(diffs) against zero; df = n - 1.
WelchResult paired_t(std::span<const double> diffs);

double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);

// Student-t CDF at t with df degrees of freedom (df may be fractional).
double t_cdf(double t, double df);

// 2 * (1 - CDF(|t|)).
double two_sided_p(double t, double df);

// Inverse CDF by bisection; p in (0,1).
double t_quantile(double p, double df);

// Significance stars: * p<0.1, ** p<0.05, *** p<0.01.
const char* significance_stars(double p);

}  // namespace painfair
