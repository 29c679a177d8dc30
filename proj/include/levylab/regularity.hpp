#pragma once

// Multi-resolution Monte Carlo: sample noise at several dyadic levels, take
// norms, and decide from the growth of a norm statistic in J whether the
// norm stays bounded as the grid is refined.

#include <cstdint>
#include <string>
#include <vector>

#include "levylab/besov.hpp"
#include "levylab/field.hpp"
#include "levylab/stats.hpp"

namespace levylab {

enum class Statistic { median, mean_pth_power };
enum class Verdict { bounded, diverging, inconclusive };

std::string to_string(Statistic s);
std::string to_string(Verdict v);
Statistic statistic_from_string(const std::string& s);

/// Level statistic of a pool of norms. mean_pth_power is (mean |v|^p)^{1/p},
/// which keeps slopes on the scale of the norm itself. NaN entries are skipped.
double pool_statistic(std::span<const double> values, Statistic st, double p);

struct ExperimentPlan {
  LevyTriplet triplet;
  std::size_t n = 2;
  double T = 1.0;  // cube side
  std::vector<NormSpec> specs;
  std::vector<std::uint32_t> levels;
  int replicates = 100;
  std::uint64_t seed = 0;
  Statistic statistic = Statistic::median;
  double slope_threshold = 0.05;
  int bootstrap_resamples = 1000;
  SamplerConfig sampler;
  CutoffProfile profile;
  Kernel kernel = Kernel::parallel;
  std::size_t max_cells = GridSpec::kDefaultMaxCells;

  void validate() const;
  /// At least 4 levels and 50 replicates.
  bool verdict_grade() const;
  GridSpec grid(std::uint32_t J) const;
};

struct LevelRow {
  std::uint32_t J = 0;
  double statistic = 0.0;
  stats::Interval ci;
  int used = 0;
  int dropped = 0;
};

struct RegularityVerdict {
  double slope = 0.0;  // d log2(statistic) / dJ
  stats::Interval slope_ci;
  Verdict verdict = Verdict::inconclusive;
  double threshold = 0.05;
  bool near_threshold = false;  // Gaussian noise with |s - s*| < 0.1; annotation only
  std::string note;
};

struct NormSeries {
  std::string label;
  std::vector<double> smoothness;  // s, s_bar, or the time exponent
  double p = 2.0;
  std::vector<LevelRow> rows;
  std::vector<std::vector<double>> pools;  // [level][replicate], NaN when dropped
  RegularityVerdict verdict;
};

struct ExperimentResult {
  std::vector<NormSeries> series;
  int evaluations = 0;
  int dropped = 0;
  bool flagged = false;  // drop rate above 5%
  double wall_seconds = 0.0;
  std::vector<std::string> monotonicity_violations;
};

/// Fits log2(statistic) against J. Without pools the interval is the OLS
/// t-interval; with pools it is a percentile bootstrap over replicates.
RegularityVerdict classify_threshold(const std::vector<LevelRow>& rows, double slope_threshold = 0.05);
RegularityVerdict classify_threshold(const std::vector<LevelRow>& rows, const std::vector<std::vector<double>>& pools,
                                     Statistic st, double p, std::uint64_t seed, double slope_threshold = 0.05,
                                     int resamples = 1000);

/// Gaussian threshold per group: -n/2 for an isotropic spec, -1/2 for each mixed group.
double gaussian_threshold(const NormSpec& spec, std::size_t n);
bool near_gaussian_threshold(const NormSpec& spec, std::size_t n, double band = 0.1);

ExperimentResult norm_growth_experiment(const ExperimentPlan& plan);

/// E ||eta_J||^p for Gaussian noise of variance sigma2 on `grid` (p = q).
double gaussian_oracle(const NormSpec& spec, const GridSpec& grid, double sigma2, const CutoffProfile& profile = {});
/// Refuses triplets with a drift or jump part.
double gaussian_oracle(const NormSpec& spec, const GridSpec& grid, const LevyTriplet& tr,
                       const CutoffProfile& profile = {});

struct SpacetimePlan {
  LevyTriplet triplet;
  std::size_t n = 2;
  double T = 1.0;
  NormSpec spatial;                     // inner norm on the (n-1)-dim slabs
  std::vector<TimeNormSpec> path_specs;  // path-level exponents (noise exponent + 1)
  std::vector<std::uint32_t> levels;
  int replicates = 100;
  std::uint64_t seed = 0;
  Statistic statistic = Statistic::median;
  double slope_threshold = 0.05;
  int bootstrap_resamples = 1000;
  SamplerConfig sampler;
  CutoffProfile profile;
  Kernel kernel = Kernel::parallel;
  std::size_t max_cells = GridSpec::kDefaultMaxCells;

  void validate() const;
  GridSpec grid(std::uint32_t J) const;
};

/// Path-level spec for a noise-level time exponent t: the slab path is probed at t + 1.
TimeNormSpec path_level(double noise_t, double p, double q);

/// Builds the slab process along axis 0, takes time-Besov norms of the
/// spatial-norm-valued path and classifies their growth in J.
ExperimentResult spacetime_regularity_experiment(const SpacetimePlan& plan);

/// The slab path of a sample: cumulative cells along axis 0 divided by the
/// spatial cell volume, at every level.
TimePath slab_path(const WhiteNoiseSample& sample);

}  // namespace levylab
