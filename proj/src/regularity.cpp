#include "levylab/regularity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "levylab/error.hpp"
#include "levylab/rng.hpp"

namespace levylab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Level codes for bootstrap streams, kept clear of dyadic levels.
constexpr std::uint32_t kSlopeStream = 1u << 20;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::vector<double> valid(std::span<const double> pool) {
  std::vector<double> out;
  for (double v : pool)
    if (!std::isnan(v)) out.push_back(v);
  return out;
}

double stat_of_indices(std::span<const double> pool, std::span<const std::size_t> idx, Statistic st, double p,
                       std::vector<double>& scratch) {
  scratch.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) scratch[i] = pool[idx[i]];
  return pool_statistic(scratch, st, p);
}

void resample(std::vector<std::size_t>& idx, std::size_t m, const StreamId& id) {
  CounterRng rng(id);
  idx.resize(m);
  for (auto& i : idx) i = std::min(m - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(m)));
}

Verdict decide(const stats::Interval& ci, double thr) {
  if (ci.hi < thr) return Verdict::bounded;
  if (ci.lo > thr) return Verdict::diverging;
  return Verdict::inconclusive;
}

// Shared handling of degenerate statistics; returns true when it settled the verdict.
bool degenerate(const std::vector<LevelRow>& rows, RegularityVerdict& v) {
  bool all_zero = true, usable = true;
  for (const auto& r : rows) {
    if (r.statistic != 0.0) all_zero = false;
    if (!std::isfinite(r.statistic) || r.statistic <= 0.0) usable = false;
  }
  if (all_zero) {
    v.slope = 0.0;
    v.slope_ci = {0.0, 0.0};
    v.verdict = Verdict::bounded;
    v.note = "all statistics are zero";
    return true;
  }
  if (!usable) {
    v.slope = kNaN;
    v.slope_ci = {kNaN, kNaN};
    v.verdict = Verdict::inconclusive;
    v.note = "non-finite or zero statistic at some level";
    return true;
  }
  return false;
}

std::vector<double> log_stats(const std::vector<LevelRow>& rows, std::vector<double>& x) {
  std::vector<double> y;
  x.clear();
  for (const auto& r : rows) {
    x.push_back(static_cast<double>(r.J));
    y.push_back(std::log2(r.statistic));
  }
  return y;
}

using Evaluator = std::function<std::vector<double>(std::uint32_t J, std::uint32_t rep)>;

// pools[series][level][replicate]
std::vector<std::vector<std::vector<double>>> run_levels(const std::vector<std::uint32_t>& levels, int replicates,
                                                         std::size_t nseries, const Evaluator& eval,
                                                         ExperimentResult& res) {
  std::vector<std::vector<std::vector<double>>> pools(
      nseries, std::vector<std::vector<double>>(levels.size(), std::vector<double>(static_cast<std::size_t>(replicates), kNaN)));
  std::exception_ptr failure;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const std::uint32_t J = levels[li];
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < replicates; ++r) {
      try {
        const auto v = eval(J, static_cast<std::uint32_t>(r));
        for (std::size_t s = 0; s < nseries; ++s) pools[s][li][static_cast<std::size_t>(r)] = v[s];
      } catch (const NumericFailure&) {
        // left as NaN: counted as a drop below
      } catch (...) {
#pragma omp critical(levylab_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (int r = 0; r < replicates; ++r) {
      ++res.evaluations;
      for (std::size_t s = 0; s < nseries; ++s) {
        if (std::isnan(pools[s][li][static_cast<std::size_t>(r)])) {
          ++res.dropped;
          break;
        }
      }
    }
  }
  res.flagged = res.evaluations > 0 && res.dropped > 0.05 * res.evaluations;
  return pools;
}

NormSeries build_series(std::string label, std::vector<double> smoothness, double p,
                        const std::vector<std::uint32_t>& levels, std::vector<std::vector<double>> pools,
                        Statistic st, std::uint64_t seed, std::uint32_t series_index, double thr, int resamples) {
  NormSeries s;
  s.label = std::move(label);
  s.smoothness = std::move(smoothness);
  s.p = p;
  s.pools = std::move(pools);
  std::vector<double> scratch;
  std::vector<std::size_t> idx;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto pool = valid(s.pools[li]);
    LevelRow row;
    row.J = levels[li];
    row.used = static_cast<int>(pool.size());
    row.dropped = static_cast<int>(s.pools[li].size() - pool.size());
    if (pool.empty()) {
      row.statistic = kNaN;
      row.ci = {kNaN, kNaN};
    } else {
      row.statistic = pool_statistic(pool, st, p);
      std::vector<double> boot;
      for (int b = 0; b < resamples; ++b) {
        resample(idx, pool.size(), StreamId{seed, StreamPurpose::bootstrap, levels[li], series_index, static_cast<std::uint32_t>(b)});
        boot.push_back(stat_of_indices(pool, idx, st, p, scratch));
      }
      row.ci = boot.empty() ? stats::Interval{row.statistic, row.statistic}
                            : stats::Interval{stats::quantile(boot, 0.025), stats::quantile(boot, 0.975)};
    }
    s.rows.push_back(row);
  }
  if (levels.size() < 4) {
    s.verdict.threshold = thr;
    s.verdict.note = "fewer than 4 levels; no slope fit";
    return s;
  }
  std::vector<std::vector<double>> clean;
  for (const auto& pl : s.pools) clean.push_back(valid(pl));
  s.verdict = classify_threshold(s.rows, clean, st, p, seed ^ (std::uint64_t{series_index} << 40), thr, resamples);
  return s;
}

bool dominated(const std::vector<double>& a, const std::vector<double>& b) {
  // a <= b componentwise
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

void check_monotone(const std::vector<NormSpec>& specs, ExperimentResult& res) {
  for (std::size_t a = 0; a < specs.size(); ++a) {
    for (std::size_t b = 0; b < specs.size(); ++b) {
      if (a == b) continue;
      const auto& A = specs[a];
      const auto& B = specs[b];
      if (A.kind != B.kind || A.p != B.p || A.q != B.q || A.rho != B.rho || A.splitting != B.splitting) continue;
      // B smoother than A in every group; B bounded forces A bounded.
      if (dominated(res.series[a].smoothness, res.series[b].smoothness) &&
          res.series[b].verdict.verdict == Verdict::bounded && res.series[a].verdict.verdict != Verdict::bounded) {
        res.monotonicity_violations.push_back(res.series[b].label + " bounded but " + res.series[a].label + " " +
                                              to_string(res.series[a].verdict.verdict));
      }
    }
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void validate_levels(const std::vector<std::uint32_t>& levels, int replicates, int resamples, double thr) {
  require(!levels.empty(), "plan: no resolution levels");
  require(replicates >= 1, "plan: replicates must be >= 1");
  require(resamples >= 1, "plan: bootstrap resamples must be >= 1");
  require(std::isfinite(thr), "plan: slope threshold must be finite");
  for (std::size_t i = 1; i < levels.size(); ++i) require(levels[i] > levels[i - 1], "plan: levels must be increasing");
  for (auto J : levels) require(J >= 1 && J < 31, "plan: levels must lie in [1, 30]");
}

}  // namespace

std::string to_string(Statistic s) { return s == Statistic::median ? "median" : "mean-of-p-th-power"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::diverging: return "diverging";
    default: return "inconclusive";
  }
}

Statistic statistic_from_string(const std::string& s) {
  if (s == "median") return Statistic::median;
  if (s == "mean-of-p-th-power") return Statistic::mean_pth_power;
  throw ValidationError("unknown statistic '" + s + "' (expected median or mean-of-p-th-power)");
}

double pool_statistic(std::span<const double> values, Statistic st, double p) {
  const auto v = valid(values);
  if (v.empty()) return kNaN;
  if (st == Statistic::median) return stats::median(v);
  double acc = 0.0;
  for (double x : v) acc += std::pow(std::abs(x), p);
  return std::pow(acc / static_cast<double>(v.size()), 1.0 / p);
}

void ExperimentPlan::validate() const {
  require(n >= 1 && n <= 4, "plan: dimension must lie in [1, 4]");
  require(T > 0.0 && std::isfinite(T), "plan: T must be positive");
  require(!specs.empty(), "plan: no norm specs");
  for (const auto& s : specs) s.validate(n);
  validate_levels(levels, replicates, bootstrap_resamples, slope_threshold);
  grid(levels.back()).validate(max_cells);
}

bool ExperimentPlan::verdict_grade() const { return levels.size() >= 4 && replicates >= 50; }

GridSpec ExperimentPlan::grid(std::uint32_t J) const { return GridSpec::cube(n, T, J); }

RegularityVerdict classify_threshold(const std::vector<LevelRow>& rows, double slope_threshold) {
  require(rows.size() >= 4, "classify_threshold: need at least 4 levels");
  RegularityVerdict v;
  v.threshold = slope_threshold;
  if (degenerate(rows, v)) return v;
  std::vector<double> x;
  const auto y = log_stats(rows, x);
  const auto fit = stats::fit_line(x, y);
  v.slope = fit.slope;
  v.slope_ci = stats::slope_t_interval(fit, x.size());
  v.verdict = decide(v.slope_ci, slope_threshold);
  v.note = "OLS t-interval";
  return v;
}

RegularityVerdict classify_threshold(const std::vector<LevelRow>& rows, const std::vector<std::vector<double>>& pools,
                                     Statistic st, double p, std::uint64_t seed, double slope_threshold, int resamples) {
  require(rows.size() >= 4, "classify_threshold: need at least 4 levels");
  require(pools.size() == rows.size(), "classify_threshold: one pool per level");
  RegularityVerdict v;
  v.threshold = slope_threshold;
  if (degenerate(rows, v)) return v;
  std::vector<double> x;
  const auto y = log_stats(rows, x);
  v.slope = stats::fit_line(x, y).slope;
  std::vector<double> slopes, yb(rows.size()), scratch;
  std::vector<std::size_t> idx;
  for (int b = 0; b < resamples; ++b) {
    bool ok = true;
    for (std::size_t li = 0; li < rows.size() && ok; ++li) {
      const auto& pool = pools[li];
      if (pool.empty()) {
        ok = false;
        break;
      }
      resample(idx, pool.size(),
               StreamId{seed, StreamPurpose::bootstrap, kSlopeStream + static_cast<std::uint32_t>(li), 0, static_cast<std::uint32_t>(b)});
      const double s = stat_of_indices(pool, idx, st, p, scratch);
      ok = std::isfinite(s) && s > 0.0;
      yb[li] = std::log2(s);
    }
    if (ok) slopes.push_back(stats::fit_line(x, yb).slope);
  }
  if (slopes.size() < static_cast<std::size_t>(resamples) / 2) {
    v.slope_ci = {kNaN, kNaN};
    v.verdict = Verdict::inconclusive;
    v.note = "bootstrap failed on most resamples";
    return v;
  }
  v.slope_ci = {stats::quantile(slopes, 0.025), stats::quantile(slopes, 0.975)};
  v.verdict = decide(v.slope_ci, slope_threshold);
  v.note = "percentile bootstrap over replicates";
  return v;
}

double gaussian_threshold(const NormSpec& spec, std::size_t n) {
  return spec.kind == NormKind::isotropic ? -0.5 * static_cast<double>(n) : -0.5;
}

bool near_gaussian_threshold(const NormSpec& spec, std::size_t n, double band) {
  const double star = gaussian_threshold(spec, n);
  const double tol = band - 1e-9;
  if (spec.kind == NormKind::isotropic) return std::abs(spec.s - star) < tol;
  for (double s : spec.s_bar)
    if (std::abs(s - star) < tol) return true;
  return false;
}

ExperimentResult norm_growth_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;

  // Banks depend on J only through the lattice; build them once per level.
  struct LevelBanks {
    Lattice lat;
    std::vector<std::vector<FilterBank>> per_spec;
  };
  std::vector<LevelBanks> banks;
  for (auto J : plan.levels) {
    LevelBanks lb;
    lb.lat = Lattice::from_grid(plan.grid(J));
    for (const auto& spec : plan.specs) {
      if (spec.kind == NormKind::isotropic) {
        std::vector<std::size_t> axes(plan.n);
        for (std::size_t a = 0; a < plan.n; ++a) axes[a] = a;
        lb.per_spec.push_back({FilterBank(lb.lat, axes, plan.profile)});
      } else {
        lb.per_spec.push_back(mixed_banks(lb.lat, spec, plan.profile));
      }
    }
    banks.push_back(std::move(lb));
  }
  auto level_index = [&](std::uint32_t J) {
    return static_cast<std::size_t>(std::find(plan.levels.begin(), plan.levels.end(), J) - plan.levels.begin());
  };

  const Evaluator eval = [&](std::uint32_t J, std::uint32_t rep) {
    const auto& lb = banks[level_index(J)];
    const auto sample = sample_white_noise(plan.triplet, plan.grid(J), plan.seed, rep, {plan.sampler, plan.max_cells});
    const auto f = sample.density();
    std::vector<std::complex<double>> hat;
    std::vector<double> out;
    for (std::size_t s = 0; s < plan.specs.size(); ++s) {
      const auto& spec = plan.specs[s];
      const auto smooth = spec.smoothness(plan.n);
      BlockNorms bn;
      if (spec.p == 2.0 && !spec.rho && plan.kernel == Kernel::parallel) {
        if (hat.empty()) hat = spectrum(f, lb.lat);
        bn = block_norms_from_spectrum(hat, lb.lat, lb.per_spec[s]);
      } else {
        bn = block_norms(f, lb.lat, lb.per_spec[s], spec.p, spec.rho, plan.kernel);
      }
      out.push_back(besov_from_blocks(bn, smooth, spec.q));
    }
    return out;
  };

  auto pools = run_levels(plan.levels, plan.replicates, plan.specs.size(), eval, res);
  const bool gaussian = plan.triplet.is_gaussian();
  for (std::size_t s = 0; s < plan.specs.size(); ++s) {
    const auto& spec = plan.specs[s];
    auto series = build_series(spec.label(), spec.smoothness(plan.n), spec.p, plan.levels, std::move(pools[s]),
                               plan.statistic, plan.seed, static_cast<std::uint32_t>(s), plan.slope_threshold,
                               plan.bootstrap_resamples);
    if (gaussian && near_gaussian_threshold(spec, plan.n)) {
      series.verdict.near_threshold = true;
      series.verdict.note += "; within 0.1 of the Gaussian threshold";
    }
    if (!plan.verdict_grade()) series.verdict.note += "; not verdict-grade (need >= 4 levels and >= 50 replicates)";
    res.series.push_back(std::move(series));
  }
  check_monotone(plan.specs, res);
  res.wall_seconds = seconds_since(t0);
  return res;
}

double gaussian_oracle(const NormSpec& spec, const GridSpec& grid, double sigma2, const CutoffProfile& profile) {
  require(sigma2 >= 0.0, "gaussian oracle: sigma2 must be >= 0");
  spec.validate(grid.dim());
  require(spec.p == spec.q, "gaussian oracle: requires p = q");
  grid.validate();
  if (sigma2 == 0.0) return 0.0;
  const Lattice lat = Lattice::from_grid(grid);
  std::vector<FilterBank> banks;
  if (spec.kind == NormKind::isotropic) {
    std::vector<std::size_t> axes(lat.dim());
    for (std::size_t a = 0; a < axes.size(); ++a) axes[a] = a;
    banks.emplace_back(lat, axes, profile);
  } else {
    banks = mixed_banks(lat, spec, profile);
  }
  // A flat spectrum turns the Parseval block energies into (h^n / N) sum_xi w_k(xi)^2.
  const std::vector<std::complex<double>> ones(lat.size(), {1.0, 0.0});
  const auto bn = block_norms_from_spectrum(ones, lat, banks);
  const double vol = lat.cell_volume();
  const double p = spec.p;
  const double cp = std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) / std::sqrt(std::numbers::pi);
  double mass = 0.0;
  if (spec.rho) {
    for (double w : japanese_weight(lat, *spec.rho)) mass += w * vol;
  } else {
    mass = grid.box_volume();
  }
  const auto s = spec.smoothness(grid.dim());
  double total = 0.0;
  for (std::size_t b = 0; b < bn.values.size(); ++b) {
    const double mean_w2 = bn.values[b] * bn.values[b] / vol;
    if (mean_w2 == 0.0) continue;
    const double v = sigma2 / vol * mean_w2;  // per-site variance of S_k applied to the density
    const auto k = bn.multi_index(b);
    double expo = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) expo += s[i] * k[i];
    total += std::exp2(p * expo) * cp * std::pow(v, 0.5 * p) * mass;
  }
  return total;
}

double gaussian_oracle(const NormSpec& spec, const GridSpec& grid, const LevyTriplet& tr, const CutoffProfile& profile) {
  require(tr.gamma == 0.0 && tr.nu.is_zero(), "gaussian oracle: triplet has a drift or jump part; the oracle covers centred Gaussian noise only");
  return gaussian_oracle(spec, grid, tr.sigma2, profile);
}

void SpacetimePlan::validate() const {
  require(n >= 2 && n <= 4, "spacetime plan: dimension must lie in [2, 4]");
  require(T > 0.0 && std::isfinite(T), "spacetime plan: T must be positive");
  spatial.validate(n - 1);
  require(!path_specs.empty(), "spacetime plan: no time norm specs");
  for (const auto& t : path_specs) {
    require(t.p >= 1.0 && std::isfinite(t.p), "spacetime plan: time p must lie in [1, inf)");
    require(t.q >= 1.0, "spacetime plan: time q must be >= 1");
  }
  validate_levels(levels, replicates, bootstrap_resamples, slope_threshold);
  grid(levels.back()).validate(max_cells);
}

GridSpec SpacetimePlan::grid(std::uint32_t J) const { return GridSpec::cube(n, T, J); }

TimeNormSpec path_level(double noise_t, double p, double q) { return {noise_t + 1.0, p, q}; }

TimePath slab_path(const WhiteNoiseSample& sample) {
  const SlabProcess slab(sample, 0);
  TimePath path;
  path.spatial = Lattice::from_grid(slab.spatial_grid());
  path.T = sample.grid.T[0];
  const double inv = 1.0 / slab.spatial_grid().cell_volume();
  const std::size_t S = path.spatial.size();
  path.values.resize(slab.levels() * S);
  for (std::size_t l = 0; l < slab.levels(); ++l) {
    const auto c = slab.cumulative(l);
    for (std::size_t i = 0; i < S; ++i) path.values[l * S + i] = c[i] * inv;
  }
  return path;
}

ExperimentResult spacetime_regularity_experiment(const SpacetimePlan& plan) {
  plan.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  const Evaluator eval = [&](std::uint32_t J, std::uint32_t rep) {
    const auto sample = sample_white_noise(plan.triplet, plan.grid(J), plan.seed, rep, {plan.sampler, plan.max_cells});
    const auto path = slab_path(sample);
    std::vector<double> out;
    for (const auto& t : plan.path_specs) out.push_back(besov_norm_time_valued(path, t, plan.spatial, plan.profile, plan.kernel));
    return out;
  };
  auto pools = run_levels(plan.levels, plan.replicates, plan.path_specs.size(), eval, res);
  for (std::size_t s = 0; s < plan.path_specs.size(); ++s) {
    const auto& t = plan.path_specs[s];
    std::ostringstream label;
    label << "time(t=" << t.t << ",p=" << t.p << ",q=" << t.q << ")[" << plan.spatial.label() << "]";
    res.series.push_back(build_series(label.str(), {t.t}, t.p, plan.levels, std::move(pools[s]), plan.statistic, plan.seed,
                                      static_cast<std::uint32_t>(s), plan.slope_threshold, plan.bootstrap_resamples));
  }
  res.wall_seconds = seconds_since(t0);
  return res;
}

}  // namespace levylab
