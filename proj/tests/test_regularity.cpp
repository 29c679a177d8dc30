#include "doctest.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "levylab/error.hpp"
#include "levylab/regularity.hpp"
#include "levylab/stats.hpp"

using namespace levylab;

namespace {

std::vector<LevelRow> rows_of(std::vector<double> s) {
  std::vector<LevelRow> rows;
  std::uint32_t J = 3;
  for (double v : s) rows.push_back({J++, v, {v, v}, 1, 0});
  return rows;
}

ExperimentPlan gaussian_plan_1d(std::vector<NormSpec> specs) {
  ExperimentPlan plan;
  plan.triplet = LevyTriplet::gaussian(1.0);
  plan.n = 1;
  plan.T = 16.0;
  plan.specs = std::move(specs);
  plan.levels = {6, 7, 8, 9, 10};
  plan.replicates = 60;
  plan.seed = 2024;
  plan.bootstrap_resamples = 300;
  return plan;
}

}  // namespace

TEST_CASE("stats: descriptive values, line fit, t quantiles") {
  const std::vector<double> x{1, 2, 3, 4, 10};
  CHECK(stats::mean(x) == doctest::Approx(4.0));
  CHECK(stats::median(x) == doctest::Approx(3.0));
  CHECK(stats::quantile(x, 0.25) == doctest::Approx(2.0));
  CHECK(stats::stddev(x) == doctest::Approx(std::sqrt(12.5)));
  const std::vector<double> xs{0, 1, 2, 3}, ys{1, 3, 5, 7};
  const auto fit = stats::fit_line(xs, ys);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.slope_se == doctest::Approx(0.0));
  CHECK(stats::student_t_quantile(10, 0.975) == doctest::Approx(2.228138852).epsilon(1e-8));
  CHECK_THROWS_AS(stats::fit_line(std::vector<double>{1, 1}, std::vector<double>{0, 1}), ValidationError);
}

TEST_CASE("stats: Kolmogorov tail and KS tests") {
  CHECK(stats::kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(stats::kolmogorov_survival(0.0) == 1.0);
  std::vector<double> a, b, c;
  for (int i = 0; i < 2000; ++i) {
    CounterRng r(StreamId{1, StreamPurpose::generic, 0, 0, static_cast<std::uint32_t>(i)});
    a.push_back(r.normal());
    b.push_back(r.normal());
    c.push_back(r.normal() + 0.3);
  }
  CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
  CHECK(stats::ks_two_sample(a, c).p_value < 1e-6);
  const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  CHECK(stats::ks_one_sample(a, phi).p_value > 0.01);
}

TEST_CASE("stats: bootstrap interval is reproducible and covers the mean") {
  std::vector<double> v;
  for (int i = 0; i < 400; ++i) v.push_back(std::sin(i * 1.7) + 2.0);
  auto stat = [&](std::span<const std::size_t> idx) {
    double s = 0;
    for (auto i : idx) s += v[i];
    return s / static_cast<double>(idx.size());
  };
  const auto a = stats::bootstrap_interval(v.size(), stat, 5, 500);
  const auto b = stats::bootstrap_interval(v.size(), stat, 5, 500);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.lo < stats::mean(v));
  CHECK(a.hi > stats::mean(v));
}

TEST_CASE("classify_threshold on fixed tables") {
  auto flat = classify_threshold(rows_of({1, 1, 1, 1, 1}));
  CHECK(flat.slope == doctest::Approx(0.0));
  CHECK(flat.verdict == Verdict::bounded);
  auto dbl = classify_threshold(rows_of({1, 2, 4, 8, 16}));
  CHECK(dbl.slope == doctest::Approx(1.0));
  CHECK(dbl.verdict == Verdict::diverging);
  CHECK(classify_threshold(rows_of({0, 0, 0, 0})).verdict == Verdict::bounded);
  CHECK(classify_threshold(rows_of({1, 2, std::numeric_limits<double>::infinity(), 4})).verdict == Verdict::inconclusive);
  CHECK(classify_threshold(rows_of({1, 2, std::nan(""), 4})).verdict == Verdict::inconclusive);
  CHECK(classify_threshold(rows_of({1.0, 1.05, 0.97, 1.1})).verdict == Verdict::inconclusive);
  CHECK_THROWS_AS(classify_threshold(rows_of({1, 1, 1})), ValidationError);
}

TEST_CASE("pool statistic skips dropped replicates") {
  const std::vector<double> v{1.0, std::nan(""), 3.0, 2.0};
  CHECK(pool_statistic(v, Statistic::median, 2.0) == doctest::Approx(2.0));
  CHECK(pool_statistic(v, Statistic::mean_pth_power, 2.0) == doctest::Approx(std::sqrt(14.0 / 3.0)));
}

TEST_CASE("gaussian thresholds") {
  CHECK(gaussian_threshold(NormSpec::isotropic(0, 2, 2), 2) == -1.0);
  CHECK(gaussian_threshold(NormSpec::mixed({0, 0}, {1, 1}, 2), 2) == -0.5);
  CHECK(near_gaussian_threshold(NormSpec::isotropic(-0.95, 2, 2), 2));
  CHECK_FALSE(near_gaussian_threshold(NormSpec::isotropic(-0.75, 2, 2), 2));
  CHECK_FALSE(near_gaussian_threshold(NormSpec::mixed({-0.6, -0.6}, {1, 1}, 2), 2));
  CHECK(near_gaussian_threshold(NormSpec::mixed({-0.5, -0.5}, {1, 1}, 2), 2));
}

TEST_CASE("gaussian oracle: closed form and Monte Carlo") {
  const auto grid = GridSpec::cube(1, 1.0, 8);
  const auto spec = NormSpec::isotropic(-0.75, 2.0, 2.0);
  CHECK(gaussian_oracle(spec, grid, 0.0) == 0.0);
  CHECK_THROWS_AS(gaussian_oracle(spec, grid, LevyTriplet{0.0, 1.0, LevyMeasure::atoms({{1.0, 1.0}})}), ValidationError);
  CHECK_THROWS_AS(gaussian_oracle(NormSpec::isotropic(0, 2, 3), grid, 1.0), ValidationError);

  // p = 2, n = 1: sum_k 2^{2sk} T v_k with v_k = sigma^2 / h * (1/N) sum phi_k^2.
  const Lattice lat = Lattice::from_grid(grid);
  FilterBank bank(lat, {0});
  double direct = 0.0;
  for (int k = 0; k < bank.blocks(); ++k) {
    double s2 = 0.0;
    for (double xi : axis_frequencies(lat, 0)) s2 += std::pow(bank.mask(k, std::abs(xi)), 2);
    direct += std::exp2(2 * -0.75 * k) * 1.0 * (3.0 / grid.h(0) * s2 / 256.0);
  }
  CHECK(gaussian_oracle(spec, grid, 3.0) == doctest::Approx(direct).epsilon(1e-12));

  for (double p : {2.0, 3.0}) {
    const auto sp = NormSpec::isotropic(-0.75, p, p);
    const double oracle = gaussian_oracle(sp, grid, 1.0);
    double acc = 0.0;
    const int R = 500;
    for (int r = 0; r < R; ++r) {
      const auto s = sample_white_noise(LevyTriplet::gaussian(1.0), grid, 77, static_cast<std::uint32_t>(r));
      acc += std::pow(besov_norm(s.density(), lat, sp), p);
    }
    CHECK(std::abs(acc / R / oracle - 1.0) < 0.05);
  }
}

TEST_CASE("mixed oracle series converges below -1/2") {
  const auto spec = NormSpec::mixed({-0.6, -0.6}, {1, 1}, 2.0);
  double prev = 0.0, prev_inc = std::numeric_limits<double>::infinity();
  for (std::uint32_t J = 5; J <= 9; ++J) {
    const double o = gaussian_oracle(spec, GridSpec::cube(2, 1.0, J), 1.0);
    if (J > 5) {
      const double inc = o - prev;
      CHECK(inc > 0.0);
      CHECK(inc < prev_inc);
      prev_inc = inc;
    }
    prev = o;
  }
}

TEST_CASE("zero noise is bounded at every spec") {
  auto plan = gaussian_plan_1d({NormSpec::isotropic(1.0, 2.0, 2.0), NormSpec::isotropic(0.0, 3.0, 2.0)});
  plan.triplet = LevyTriplet{};
  plan.replicates = 5;
  const auto res = norm_growth_experiment(plan);
  for (const auto& s : res.series) {
    for (const auto& r : s.rows) CHECK(r.statistic == 0.0);
    CHECK(s.verdict.verdict == Verdict::bounded);
  }
}

TEST_CASE("gaussian n = 1 verdicts on either side of -1/2") {
  auto plan = gaussian_plan_1d({NormSpec::isotropic(-1.0, 2.0, 2.0), NormSpec::isotropic(-0.75, 2.0, 2.0),
                                NormSpec::isotropic(-0.25, 2.0, 2.0)});
  plan.replicates = 150;
  const auto res = norm_growth_experiment(plan);
  CHECK(res.series[0].verdict.verdict == Verdict::bounded);
  CHECK(res.series[1].verdict.verdict == Verdict::bounded);
  CHECK(res.series[2].verdict.verdict == Verdict::diverging);
  CHECK(res.monotonicity_violations.empty());
  CHECK(res.dropped == 0);
  CHECK_FALSE(res.flagged);

  const auto again = norm_growth_experiment(plan);
  for (std::size_t s = 0; s < res.series.size(); ++s) {
    CHECK(res.series[s].verdict.slope == again.series[s].verdict.slope);
    CHECK(res.series[s].verdict.slope_ci.lo == again.series[s].verdict.slope_ci.lo);
    for (std::size_t l = 0; l < res.series[s].pools.size(); ++l)
      CHECK(std::memcmp(res.series[s].pools[l].data(), again.series[s].pools[l].data(),
                        res.series[s].pools[l].size() * sizeof(double)) == 0);
  }
}

TEST_CASE("reference kernel gives the same verdict pools") {
  auto plan = gaussian_plan_1d({NormSpec::isotropic(-0.75, 2.0, 2.0)});
  plan.replicates = 8;
  plan.levels = {5, 6, 7, 8};
  const auto par = norm_growth_experiment(plan);
  plan.kernel = Kernel::reference;
  const auto ref = norm_growth_experiment(plan);
  for (std::size_t l = 0; l < 4; ++l)
    for (std::size_t r = 0; r < 8; ++r)
      CHECK(std::abs(par.series[0].pools[l][r] / ref.series[0].pools[l][r] - 1.0) < 1e-10);
}

TEST_CASE("plan validation") {
  auto plan = gaussian_plan_1d({NormSpec::isotropic(-1.0, 2.0, 2.0)});
  plan.replicates = 0;
  CHECK_THROWS_AS(plan.validate(), ValidationError);
  plan.replicates = 10;
  plan.levels = {5, 4, 6, 7};
  CHECK_THROWS_AS(plan.validate(), ValidationError);
  plan.levels = {5, 6, 7};
  CHECK_NOTHROW(plan.validate());
  CHECK_FALSE(plan.verdict_grade());
  plan.n = 2;
  plan.specs = {NormSpec::mixed({0.0}, {1}, 2.0)};
  CHECK_THROWS_AS(plan.validate(), ValidationError);
}

TEST_CASE("spacetime experiment: zero noise and path construction") {
  SpacetimePlan plan;
  plan.triplet = LevyTriplet{};
  plan.n = 2;
  plan.spatial = NormSpec::isotropic(-1.0, 2.0, 2.0);
  plan.path_specs = {path_level(-0.5, 2.0, std::numeric_limits<double>::infinity())};
  CHECK(plan.path_specs[0].t == 0.5);
  plan.levels = {3, 4, 5, 6};
  plan.replicates = 3;
  const auto res = spacetime_regularity_experiment(plan);
  CHECK(res.series[0].verdict.verdict == Verdict::bounded);

  const auto s = sample_white_noise(LevyTriplet::gaussian(1.0), GridSpec::cube(2, 2.0, 3), 1);
  const auto path = slab_path(s);
  CHECK(path.steps() == 8);
  CHECK(path.T == 2.0);
  // last row is the full column sum over the spatial cell volume
  for (std::size_t c = 0; c < 8; ++c) {
    double col = 0.0;
    for (std::size_t i = 0; i < 8; ++i) col += s.cells[i * 8 + c];
    CHECK(path.values[8 * 8 + c] == doctest::Approx(col / 0.25));
  }
  plan.n = 1;
  CHECK_THROWS_AS(plan.validate(), ValidationError);
}
