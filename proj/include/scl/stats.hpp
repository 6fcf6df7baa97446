// Welch's one-tailed t-test.
//
// The t CDF is evaluated through the regularized incomplete beta function
// I_x(a,b), computed with the standard continued-fraction expansion (modified
// Lentz). For t >= 0,  P(T_df > t) = I_x(df/2, 1/2) / 2  with x = df/(df+t^2);
// the continued fraction converges to well below the 1e-10 absolute error
// this module promises.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "scl/error.hpp"

namespace scl {

namespace detail {

inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Survival function P(T_df > t) of Student's t distribution.
inline double student_t_sf(double t, double df) {
  if (df <= 0.0) fail_arg("student_t_sf: df must be positive");
  const double x = df / (df + t * t);
  const double half_two_sided = 0.5 * reg_inc_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? half_two_sided : 1.0 - half_two_sided;
}

struct WelchResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value_one_tailed = 0.5;
  bool degenerate = false;  // both samples had zero variance, equal means
};

namespace detail {

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace detail

// One-tailed Welch test of mean(a) > mean(b), with Welch-Satterthwaite
// degrees of freedom. Two all-constant samples with equal means return the
// p = 0.5 convention flagged as degenerate; with unequal means the input is
// rejected outright.
inline WelchResult welch_one_tailed(const std::vector<double>& sample_a,
                                    const std::vector<double>& sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2)
    fail_arg("welch_one_tailed: each sample needs at least 2 values");
  const double na = static_cast<double>(sample_a.size());
  const double nb = static_cast<double>(sample_b.size());
  const double mean_a = detail::sample_mean(sample_a);
  const double mean_b = detail::sample_mean(sample_b);
  const double var_a = detail::sample_variance(sample_a, mean_a);
  const double var_b = detail::sample_variance(sample_b, mean_b);

  if (var_a == 0.0 && var_b == 0.0) {
    if (mean_a == mean_b) {
      WelchResult r;
      r.degrees_of_freedom = na + nb - 2.0;
      r.degenerate = true;
      return r;
    }
    fail_arg("welch_one_tailed: both samples have zero variance and unequal means");
  }

  const double sa = var_a / na;
  const double sb = var_b / nb;
  const double se = std::sqrt(sa + sb);
  WelchResult r;
  r.t_statistic = (mean_a - mean_b) / se;
  r.degrees_of_freedom =
      (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.p_value_one_tailed = student_t_sf(r.t_statistic, r.degrees_of_freedom);
  return r;
}

// matches / total.
inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& gold) {
  if (predictions.size() != gold.size())
    fail_arg("accuracy: length mismatch (", predictions.size(), " vs ", gold.size(), ")");
  if (predictions.empty()) fail_arg("accuracy: empty input");
  std::size_t matches = 0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (predictions[i] == gold[i]) ++matches;
  return static_cast<double>(matches) / static_cast<double>(gold.size());
}

}  // namespace scl
