#pragma once

// Small statistics toolkit for the experiments: descriptive statistics,
// least-squares slopes with t or bootstrap intervals, two-sample KS.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace levylab::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);
/// Linear-interpolation quantile of the sorted copy, u in [0, 1].
double quantile(std::span<const double> x, double u);
double median(std::span<const double> x);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // 0 when fewer than 3 points
  double residual_sd = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

double student_t_quantile(double df, double u);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// slope +- t_{df, (1+level)/2} * se.
Interval slope_t_interval(const LineFit& fit, std::size_t points, double level = 0.95);

/// Percentile bootstrap of statistic(resample). Resample indices are drawn
/// from the Philox bootstrap stream of `seed`, so the interval is reproducible.
Interval bootstrap_interval(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                            std::uint64_t seed, int resamples = 1000, double level = 0.95);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov distribution.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS against a continuous CDF.
KsResult ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

}  // namespace levylab::stats
