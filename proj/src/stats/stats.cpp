#include "stats/stats.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace painfair {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ArgumentError("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw ArgumentError("sample variance needs n >= 2");
  double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw ArgumentError("welch_t needs n >= 2 per sample (got " + std::to_string(a.size()) +
                        ", " + std::to_string(b.size()) + ")");
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  double va = sample_variance(a) / na;
  double vb = sample_variance(b) / nb;
  double pooled = va + vb;
  if (pooled <= 0.0) throw NumericError("welch_t: zero variance in both samples");
  WelchResult r;
  r.t = (mean(a) - mean(b)) / std::sqrt(pooled);
  r.df = pooled * pooled / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  return r;
}

WelchResult paired_t(std::span<const double> diffs) {
  if (diffs.size() < 2) throw ArgumentError("paired_t needs n >= 2 differences");
  double n = static_cast<double>(diffs.size());
  double v = sample_variance(diffs);
  if (v <= 0.0) throw NumericError("paired_t: zero variance in differences");
  WelchResult r;
  r.t = mean(diffs) / std::sqrt(v / n);
  r.df = n - 1.0;
  return r;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

namespace {

// Continued fraction for the incomplete beta, modified Lentz algorithm.
double incomplete_beta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  const double eps = 1e-16;
  const int max_iter = 200000;

  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete_beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("incomplete_beta needs x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * incomplete_beta_cf(x, a, b) / a;
  return 1.0 - front * incomplete_beta_cf(1.0 - x, b, a) / b;
}

double t_cdf(double t, double df) {
  if (!(df > 0.0)) throw ArgumentError("t_cdf needs df > 0");
  if (t == 0.0) return 0.5;
  double x = df / (df + t * t);
  double half_tail = 0.5 * incomplete_beta(x, 0.5 * df, 0.5);
  return t > 0.0 ? 1.0 - half_tail : half_tail;
}

double two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ArgumentError("two_sided_p needs df > 0");
  if (t == 0.0) return 1.0;
  double x = df / (df + t * t);
  return incomplete_beta(x, 0.5 * df, 0.5);
}

double t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("t_quantile needs p in (0,1)");
  if (!(df > 0.0)) throw ArgumentError("t_quantile needs df > 0");
  double lo = -1.0, hi = 1.0;
  while (t_cdf(lo, df) > p) lo *= 2.0;
  while (t_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (t_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

const char* significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

}  // namespace painfair
