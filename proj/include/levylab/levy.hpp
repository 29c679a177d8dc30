#pragma once

// Levy triplets (gamma, sigma^2, nu), their exponents and indices, and
// samplers for the infinitely divisible laws they generate.
//
// Conventions:
//   Psi(xi) = i gamma xi - sigma^2 xi^2 / 2
//             + int (e^{i x xi} - 1 - i xi x 1_{|x|<=1}) nu(dx)
//   E exp(i xi X_v) = exp(v Psi(xi)) for the increment X_v over volume v.

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "levylab/rng.hpp"

namespace levylab {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Symmetric alpha-stable jump measure, normalised so that its exponent is
/// -(scale |xi|)^alpha.
struct AlphaStableMeasure {
  double alpha = 1.0;
  double scale = 1.0;

  /// Density constant c in nu(dx) = c |x|^{-1-alpha} dx.
  double density_constant() const;
};

/// Jump measure given by a density on R \ {0}.
struct DensityMeasure {
  std::function<double(double)> density;
  /// Declared upper bound for int min(1, x^2) nu(dx).
  double integrability_bound = 0.0;
  /// Declared total mass; present iff the measure is finite.
  std::optional<double> total_mass;
  /// Beyond this radius the density is nonincreasing in |x|.
  double monotone_beyond = 1.0;
  /// Multiplies the density; volume scaling only touches this.
  double weight = 1.0;
  /// Family name and parameters; needed to serialise the measure.
  std::string family;
  std::vector<double> params;
  /// Signed locations of narrow features; quadrature splits there.
  std::vector<double> breaks;

  double operator()(double x) const { return weight * density(x); }
};

/// Two-sided power law c|x|^{-1-alpha} on |x|<=1 and c|x|^{-1-tail} on |x|>1.
DensityMeasure power_law_density(double c, double alpha, double tail_index);
/// Finite Gaussian-shaped jump measure rate * N(mean, sd^2) (Merton jumps).
DensityMeasure merton_density(double rate, double mean, double sd);

class LevyMeasure {
public:
  using Storage = std::variant<std::monostate, std::vector<Atom>, AlphaStableMeasure, DensityMeasure>;

  LevyMeasure() = default;
  static LevyMeasure zero() { return {}; }
  static LevyMeasure atoms(std::vector<Atom> atoms);
  static LevyMeasure alpha_stable(double alpha, double scale);
  static LevyMeasure density(DensityMeasure measure);

  bool is_zero() const;
  /// Compound-Poisson eligibility: finite total mass.
  bool has_finite_mass() const;
  std::optional<double> total_mass() const;
  bool is_symmetric() const;

  LevyMeasure scaled(double factor) const;

  const Storage& storage() const { return storage_; }
  const std::vector<Atom>* as_atoms() const { return std::get_if<std::vector<Atom>>(&storage_); }
  const AlphaStableMeasure* as_alpha_stable() const { return std::get_if<AlphaStableMeasure>(&storage_); }
  const DensityMeasure* as_density() const { return std::get_if<DensityMeasure>(&storage_); }

private:
  explicit LevyMeasure(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

struct LevyTriplet {
  double gamma = 0.0;
  double sigma2 = 0.0;
  LevyMeasure nu;

  static LevyTriplet gaussian(double sigma2) { return {0.0, sigma2, LevyMeasure::zero()}; }

  /// Triplet of the volume-v increment: (v gamma, v sigma^2, v nu).
  LevyTriplet scaled(double volume) const;
  bool is_gaussian() const { return nu.is_zero(); }
  bool is_zero() const { return gamma == 0.0 && sigma2 == 0.0 && nu.is_zero(); }
};

struct QuadratureConfig {
  /// Absolute while |Psi| <= 1, relative to the size of Psi beyond.
  double abs_tol = 1e-9;
};

std::complex<double> levy_exponent(const LevyTriplet& tr, double xi, const QuadratureConfig& cfg = {});

/// Returns +infinity when the defining integral diverges.
double rajput_rosinski_exponent(const LevyTriplet& tr, double p, double xi,
                                const QuadratureConfig& cfg = {});

struct IndexDiagnostics {
  double residual_upper = 0.0;
  double residual_lower = 0.0;
  bool low_confidence = false;
  std::string note;
};

struct IndexEstimate {
  double beta_upper = 0.0;
  double beta_lower = 0.0;
  double p_max = std::numeric_limits<double>::infinity();
  IndexDiagnostics diagnostics;
};

struct IndexOptions {
  /// RMS log-residual above which the envelope fit is flagged.
  double residual_tolerance = 0.15;
  /// Envelopes only need a few digits.
  QuadratureConfig quadrature{1e-6};
};

/// Log-spaced grid from lo to hi (both > 0) with `per_decade` points per decade.
std::vector<double> log_grid(double lo, double hi, int per_decade);

IndexEstimate blumenthal_getoor(const LevyTriplet& tr, std::span<const double> xi_grid,
                                const IndexOptions& opt = {});

struct MomentIndex {
  double value = std::numeric_limits<double>::infinity();
  bool low_confidence = false;
  double residual = 0.0;
};

MomentIndex moment_index(const LevyTriplet& tr);

struct SamplerConfig {
  /// Jumps with |x| <= epsilon are replaced by a centred Gaussian of equal variance.
  double small_jump_epsilon = 1e-3;
  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

/// Draws the infinitely divisible law with triplet tr.scaled(volume).
/// Construction does the per-triplet setup (jump tables, compensators) once.
class IncrementSampler {
public:
  IncrementSampler(const LevyTriplet& tr, double volume, const SamplerConfig& cfg = {});

  double operator()(CounterRng& rng) const;

  double volume() const { return volume_; }
  /// Deterministic part: volume * (gamma - jump compensator).
  double drift() const { return drift_; }
  /// Standard deviation of the Gaussian part, small-jump surrogate included.
  double gaussian_sd() const { return gaussian_sd_; }

private:
  struct JumpTable {
    std::vector<double> lower;       // interval lower |x|
    std::vector<double> upper;       // interval upper |x|
    std::vector<double> sign;        // +1 / -1
    std::vector<double> cumulative;  // cumulative mass, last = total
  };

  double volume_;
  double drift_ = 0.0;
  double gaussian_sd_ = 0.0;
  std::vector<Atom> atoms_;                 // unit-volume masses
  std::optional<AlphaStableMeasure> stable_;  // scaled
  std::optional<JumpTable> table_;
  double jump_rate_ = 0.0;                  // total rate of tabulated jumps
};

double sample_increment(const LevyTriplet& tr, double volume, CounterRng& rng,
                        const SamplerConfig& cfg = {});

/// Uncompensated sum of atom jumps over a region of the given volume.
double compound_poisson_sum(std::span<const Atom> atoms, double volume, CounterRng& rng);

/// Symmetric alpha-stable variate with E e^{i xi X} = exp(-|xi|^alpha)
/// (Chambers-Mallows-Stuck).
double standard_symmetric_stable(double alpha, CounterRng& rng);

void to_json(nlohmann::json& j, const LevyTriplet& tr);
void from_json(const nlohmann::json& j, LevyTriplet& tr);

bool operator==(const LevyTriplet& a, const LevyTriplet& b);

}  // namespace levylab
