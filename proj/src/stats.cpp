#include "levylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "levylab/error.hpp"
#include "levylab/rng.hpp"

namespace levylab::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw ValidationError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile(std::span<const double> x, double u) {
  if (x.empty()) throw ValidationError("quantile of an empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double pos = std::clamp(u, 0.0, 1.0) * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= s.size()) return s.back();
  const double frac = pos - static_cast<double>(i);
  return s[i] + frac * (s[i + 1] - s[i]);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("line fit needs at least two (x, y) pairs");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("line fit: all x values coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.residual_sd = std::sqrt(rss / static_cast<double>(x.size() - 2));
    f.slope_se = f.residual_sd / std::sqrt(sxx);
  }
  return f;
}

double student_t_quantile(double df, double u) {
  boost::math::students_t dist(df);
  return boost::math::quantile(dist, u);
}

Interval slope_t_interval(const LineFit& fit, std::size_t points, double level) {
  if (points < 3) return {fit.slope, fit.slope};
  const double t = student_t_quantile(static_cast<double>(points - 2), 0.5 * (1.0 + level));
  return {fit.slope - t * fit.slope_se, fit.slope + t * fit.slope_se};
}

Interval bootstrap_interval(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                            std::uint64_t seed, int resamples, double level) {
  if (n == 0 || resamples < 1) throw ValidationError("bootstrap needs data and at least one resample");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(resamples));
  std::vector<std::size_t> idx(n);
  for (int b = 0; b < resamples; ++b) {
    CounterRng rng(StreamId{seed, StreamPurpose::bootstrap, 0, 0, static_cast<std::uint32_t>(b)});
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    const double v = statistic(idx);
    if (std::isfinite(v)) values.push_back(v);
  }
  if (values.empty()) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const double tail = 0.5 * (1.0 - level);
  return {quantile(values, tail), quantile(values, 1.0 - tail)};
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; the value is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

KsResult finish(double d, double ne) {
  const double root = std::sqrt(ne);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ValidationError("KS test needs two non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return finish(d, na * nb / (na + nb));
}

KsResult ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw ValidationError("KS test needs a non-empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return finish(d, n);
}

}  // namespace levylab::stats
