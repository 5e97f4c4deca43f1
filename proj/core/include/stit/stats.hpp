#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stit::stats {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
/// E|x|^p over the sample.
double abs_moment(std::span<const double> x, double p);

/// mean ± z * sd / sqrt(n), z = 1.959963984540054.
Interval normal_ci(std::span<const double> x);

/// Percentile bootstrap interval of a statistic at the given level.
Interval bootstrap_ci(std::span<const double> x, const std::function<double(std::span<const double>)>& statistic,
                      int resamples, std::uint64_t seed, double level = 0.95);

/// Bootstrap replicates of a statistic computed on resampled indices 0..n-1.
std::vector<double> bootstrap_replicates(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                                         int resamples, std::uint64_t seed);

/// Empirical quantile with linear interpolation, q in [0, 1].
double quantile(std::vector<double> x, double q);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit ols(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// One-sample KS test against the uniform law on [0, 1].
TestResult ks_uniform(std::vector<double> x);
/// Pearson chi-squared goodness of fit against expected counts.
TestResult chi_squared(std::span<const double> observed, std::span<const double> expected);

/// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

} // namespace stit::stats
