#pragma once

// Half-space problems with noise on the boundary, solved mode by mode:
//   Poisson  lambda u - Laplace u = 0,        d_n^j u = eta on x_n = 0
//   heat     d_t u + u - Laplace u = 0,       d_n^j u = phi eta
// Each tangential (and temporal) frequency gives an ODE in x_n whose decaying
// solution is e^{-omega x_n} (j = 0) or -e^{-omega x_n} / omega (j = 1).

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "levylab/besov.hpp"
#include "levylab/field.hpp"
#include "levylab/stats.hpp"

namespace levylab {

/// Boundary lattice (axis 0 is time for the heat problem) plus a normal grid
/// of cell centres x_m = (m + 1/2) h_n, m < normal_points, covering (0, depth).
struct HalfSpaceGrid {
  Lattice boundary;
  bool has_time = false;
  double depth = 1.0;
  std::size_t normal_points = 1;

  double h_n() const { return depth / static_cast<double>(normal_points); }
  double x(std::size_t m) const { return (static_cast<double>(m) + 0.5) * h_n(); }
  void validate() const;
};

/// exp(1 - 1/(1 - u^2)) with u = (t - center) / half_width; zero for |u| >= 1.
struct TimeCutoff {
  double center = 0.5;
  double half_width = 0.25;
  double operator()(double t) const;
  friend bool operator==(const TimeCutoff&, const TimeCutoff&) = default;
};

enum class BoundaryKind { poisson, heat };

struct BoundaryProblem {
  BoundaryKind kind = BoundaryKind::poisson;
  std::complex<double> lambda{1.0, 0.0};  // poisson only
  TimeCutoff cutoff;                      // heat only
  int bc_order = 0;                       // 0 Dirichlet, 1 Neumann

  static BoundaryProblem poisson(std::complex<double> lambda, int j = 0);
  static BoundaryProblem heat(TimeCutoff cutoff, int j = 0);
  /// Refuses lambda on (-inf, 0] and bc orders other than 0, 1.
  void validate() const;
};

/// Spectral representation of the solution: boundary data spectrum and the
/// per-mode symbol omega.
class HalfSpaceField {
public:
  HalfSpaceField(HalfSpaceGrid grid, int bc_order, std::vector<std::complex<double>> data,
                 std::vector<std::complex<double>> omega, std::vector<std::complex<double>> symbol);

  const HalfSpaceGrid& grid() const { return grid_; }
  int bc_order() const { return bc_order_; }
  std::size_t modes() const { return data_.size(); }
  std::complex<double> data(std::size_t mode) const { return data_[mode]; }
  std::complex<double> omega(std::size_t mode) const { return omega_[mode]; }

  /// Transfer from the boundary datum to d_n^derivative u at depth x.
  std::complex<double> multiplier(std::size_t mode, double x, int derivative = 0) const;

  /// d_n^derivative u(., x) on the boundary lattice (real part).
  std::vector<double> slice(double x, int derivative = 0) const;
  /// d_n^derivative u at x = 0, evaluated spectrally.
  std::vector<double> trace(int derivative = 0) const;
  /// u at every normal node, normal index slowest.
  std::vector<double> values() const;

  /// Largest per-mode relative residual |omega^2 - symbol| / |symbol|, where
  /// symbol = lambda + |xi'|^2 (Poisson) or 1 + i tau + |xi'|^2 (heat).
  double pde_residual() const;
  bool zero_data() const;

private:
  HalfSpaceGrid grid_;
  int bc_order_;
  std::vector<std::complex<double>> data_;
  std::vector<std::complex<double>> omega_;
  std::vector<std::complex<double>> symbol_;
};

/// Principal square root; Re >= 0 off the cut.
std::complex<double> principal_sqrt(std::complex<double> z);

/// Datum given as point values (densities) on grid.boundary.
HalfSpaceField solve_poisson_boundary(std::span<const double> datum, const BoundaryProblem& prob,
                                      const HalfSpaceGrid& grid);
HalfSpaceField solve_poisson_boundary(const WhiteNoiseSample& noise, const BoundaryProblem& prob,
                                      const HalfSpaceGrid& grid);
/// Datum on the (time, tangential) lattice; the cutoff multiplies it in time.
HalfSpaceField solve_heat_boundary(std::span<const double> datum, const BoundaryProblem& prob,
                                   const HalfSpaceGrid& grid);
HalfSpaceField solve_heat_boundary(const WhiteNoiseSample& noise, const BoundaryProblem& prob,
                                   const HalfSpaceGrid& grid);

/// (sum_{i<=k} sum_m x_m^r ||d_n^i u(., x_m)||^q_inner h_n)^{1/q}. For fields
/// with a time axis the tangential inner norm is taken inside a time-Besov
/// norm with smoothness time->t and sequence index time->q (time->p = 2).
struct WeightedNormSpec {
  double r = 0.0;
  double q = 2.0;
  int k = 0;
  NormSpec inner = NormSpec::isotropic(0.0, 2.0, 2.0);
  std::optional<TimeNormSpec> time;
};

struct WeightedNorm {
  double value = 0.0;
  bool finite = true;  // false: r <= -1 with nonzero boundary data
};

WeightedNorm weighted_power_norm(const HalfSpaceField& u, const WeightedNormSpec& spec,
                                 const CutoffProfile& profile = {});

/// Same norm for several r at once.
std::vector<WeightedNorm> weighted_power_norms(const HalfSpaceField& u, const WeightedNormSpec& spec,
                                               std::span<const double> r_values, const CutoffProfile& profile = {});

/// sum_m x_m^r h_n e^{-a x_m} for every r, truncated once the remaining terms are negligible.
std::vector<double> normal_weight_sums(double a, const HalfSpaceGrid& grid, std::span<const double> r_values);

struct ProfileRow {
  double r = 0.0;
  double norm = 0.0;
  bool finite = true;
};

std::vector<ProfileRow> weighted_norm_profile(const HalfSpaceField& u, std::span<const double> r_values,
                                              const WeightedNormSpec& spec, const CutoffProfile& profile = {});

/// Refinement study: fields at increasing levels and the mean q-th power of
/// the norm per r. Increments of that statistic between consecutive levels
/// scale like 2^{(r* - r) J} on both sides of the boundary r*, so r is J-stable
/// when their fitted exponent is below -threshold. The boundary is the
/// smallest r from which every larger r in the sweep is stable. Factories
/// should couple levels (coarsen one fine draw) or the increments drown in
/// sampling noise.
struct FinitenessBoundary {
  std::vector<double> r_values;
  std::vector<std::uint32_t> levels;
  std::vector<std::vector<double>> statistic;  // [r][level], (mean ||u||^q)^{1/q}
  std::vector<double> slopes;                  // d log2 statistic / dJ
  std::vector<double> increment_exponents;     // d log2 |increment of statistic^q| / dJ
  std::vector<bool> stable;
  double r_boundary = 0.0;  // NaN when no r is stable
  double predicted = 0.0;
};

using FieldFactory = std::function<HalfSpaceField(std::uint32_t level, std::uint32_t replicate)>;

FinitenessBoundary empirical_finiteness_boundary(const FieldFactory& make, const std::vector<std::uint32_t>& levels,
                                                 int replicates, std::span<const double> r_values,
                                                 const WeightedNormSpec& spec, double slope_threshold = 0.05,
                                                 const CutoffProfile& profile = {});

/// Predicted boundaries: r* = q [t + k - j - s]_+ - 1 (Poisson) and
/// r* = 2 q (l - s2) + q (k - j) + q [t0 - s1]_+ - 1 (heat).
double poisson_predicted_boundary(double q, double t, int k, int j, double s);
double heat_predicted_boundary(double q, double l, double s2, int k, int j, double t0, double s1);

struct LambdaScaling {
  std::vector<std::complex<double>> lambdas;
  std::vector<double> norms;
  std::vector<double> oracle;  // per-mode closed-form integrals (Parseval specs only)
  double slope = 0.0;          // d log norm / d log |lambda|
  stats::Interval slope_ci;
  double oracle_slope = 0.0;
  double predicted = 0.0;      // (-1 - r + q(k - j) + q[t - s]_+) / (2q)
};

/// Solves the Poisson problem for each lambda and fits the norm against |lambda|.
/// `datum_smoothness` is the s of the finiteness condition r - q[t + k - j - s]_+ > -1.
LambdaScaling lambda_scaling_experiment(std::span<const double> datum, const HalfSpaceGrid& grid, int j,
                                        const WeightedNormSpec& spec, double datum_smoothness,
                                        const std::vector<std::complex<double>>& lambdas,
                                        const CutoffProfile& profile = {});

/// Throws ValidationError echoing r - q[t + k - j - s]_+ > -1 when it fails.
void check_poisson_finiteness(double r, double q, double t, int k, int j, double s);

}  // namespace levylab
