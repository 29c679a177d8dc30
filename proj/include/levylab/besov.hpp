#pragma once

// Discrete Littlewood-Paley analysis on periodised boxes: dyadic filter
// banks, block norms, and isotropic / dominating-mixed / time-valued Besov
// norms. Fields are real arrays of point values (densities) on a lattice,
// row-major with the last axis fastest.

#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "levylab/field.hpp"

namespace levylab {

/// Periodic box with N_i points over length L_i per axis. Unlike GridSpec the
/// point counts need not be powers of two.
struct Lattice {
  std::vector<double> L;
  std::vector<std::size_t> N;

  static Lattice from_grid(const GridSpec& grid);

  std::size_t dim() const { return N.size(); }
  std::size_t size() const;
  double h(std::size_t axis) const { return L[axis] / static_cast<double>(N[axis]); }
  double cell_volume() const;

  friend bool operator==(const Lattice&, const Lattice&) = default;
};

/// Angular frequencies 2 pi m / L of one axis, in DFT order.
std::vector<double> axis_frequencies(const Lattice& lat, std::size_t axis);

/// phi_0: 1 on r <= inner, 0 on r >= outer, smoothstep of odd degree `order` between.
struct CutoffProfile {
  int order = 7;
  double inner = 1.0;
  double outer = 1.5;

  double operator()(double r) const;
  friend bool operator==(const CutoffProfile&, const CutoffProfile&) = default;
};

/// Smooth dyadic resolution of unity on the frequencies of a group of axes.
/// phi_0(r) = profile(r), phi_k(r) = profile(2^-k r) - profile(2^{1-k} r).
class FilterBank {
public:
  FilterBank(const Lattice& lat, std::vector<std::size_t> axes, CutoffProfile profile = {});

  const std::vector<std::size_t>& axes() const { return axes_; }
  int k_max() const { return k_max_; }
  int blocks() const { return k_max_ + 1; }
  const CutoffProfile& profile() const { return profile_; }

  /// phi_k at radius r.
  double mask(int k, double r) const;

  /// Every radius lies in at most two adjacent blocks: `first` and first+1.
  struct Split {
    int first = 0;
    double w_first = 1.0;
    double w_next = 0.0;
  };
  Split split(double r) const;

  /// |xi| restricted to the bank's axes, for a flat index of the full lattice.
  double radius(std::size_t flat) const { return radius_[flat]; }

private:
  std::vector<std::size_t> axes_;
  CutoffProfile profile_;
  int k_max_ = 0;
  std::vector<double> radius_;
};

FilterBank build_filter_bank(const GridSpec& grid, const CutoffProfile& profile = {});

enum class NormKind { isotropic, mixed };

struct NormSpec {
  NormKind kind = NormKind::isotropic;
  double s = 0.0;                       // isotropic smoothness
  std::vector<double> s_bar;            // mixed smoothness per axis group
  std::vector<std::size_t> splitting;   // group sizes, sum = dimension
  double p = 2.0;
  double q = 2.0;                       // may be +infinity
  std::optional<double> rho;            // weight <x>^rho (isotropic only)

  static NormSpec isotropic(double s, double p, double q, std::optional<double> rho = std::nullopt);
  static NormSpec mixed(std::vector<double> s_bar, std::vector<std::size_t> splitting, double p,
                        double q = std::numeric_limits<double>::quiet_NaN());

  /// Throws ValidationError when this norm does not fit a field of dimension n.
  void validate(std::size_t n) const;
  /// Axis groups implied by this norm for dimension n.
  std::vector<std::vector<std::size_t>> groups(std::size_t n) const;
  /// Smoothness per group.
  std::vector<double> smoothness(std::size_t n) const;
  std::string label() const;
  friend bool operator==(const NormSpec&, const NormSpec&) = default;
};

/// Parallel kernels versus the serial reference they are tested against.
enum class Kernel { parallel, reference };

/// ||S_k f||_{L_p(w)} for every multi-index k over the given banks.
struct BlockNorms {
  std::vector<int> blocks;     // blocks per group
  std::vector<double> values;  // flat, first group slowest
  double p = 2.0;

  std::size_t flat(const std::vector<int>& k) const;
  std::vector<int> multi_index(std::size_t flat) const;
};

/// Spectrum (unnormalised forward DFT) of a real field.
std::vector<std::complex<double>> spectrum(std::span<const double> field, const Lattice& lat);

/// Block norms. p = 2 without weight takes the Parseval route on the
/// parallel kernel; everything else inverts each block and sums |S_k f|^p.
BlockNorms block_norms(std::span<const double> field, const Lattice& lat, const std::vector<FilterBank>& banks,
                       double p, std::optional<double> rho = std::nullopt, Kernel kernel = Kernel::parallel);

/// Parseval block energies from a precomputed spectrum (p = 2, no weight).
BlockNorms block_norms_from_spectrum(std::span<const std::complex<double>> spec, const Lattice& lat,
                                     const std::vector<FilterBank>& banks);

/// (sum_k 2^{q s.k} v_k^q)^{1/q}, or the supremum when q is infinite.
double besov_from_blocks(const BlockNorms& bn, const std::vector<double>& s, double q);

/// S_k f for k = 0..K (real parts; the masks are even so the blocks are real).
std::vector<std::vector<double>> lp_blocks(std::span<const double> field, const Lattice& lat, const FilterBank& bank);

double besov_norm_iso(std::span<const double> field, const Lattice& lat, const NormSpec& spec,
                      const CutoffProfile& profile = {}, Kernel kernel = Kernel::parallel);

std::vector<FilterBank> mixed_banks(const Lattice& lat, const NormSpec& spec, const CutoffProfile& profile = {});

double besov_norm_mixed(std::span<const double> field, const Lattice& lat, const NormSpec& spec,
                        const CutoffProfile& profile = {}, Kernel kernel = Kernel::parallel);

/// Mixed norm with p = q computed as an iterated norm, applying one group's
/// blocks at a time in the given group order (partial transforms per group).
double besov_norm_mixed_iterated(std::span<const double> field, const Lattice& lat, const NormSpec& spec,
                                 const std::vector<std::size_t>& group_order, const CutoffProfile& profile = {});

/// Any NormSpec.
double besov_norm(std::span<const double> field, const Lattice& lat, const NormSpec& spec,
                  const CutoffProfile& profile = {}, Kernel kernel = Kernel::parallel);

/// Path X(t_i), i = 0..M, of spatial fields at equally spaced times on [0, T].
struct TimePath {
  Lattice spatial;
  double T = 1.0;
  std::vector<double> values;  // (M+1) x spatial size, time slowest

  std::size_t steps() const;   // M
};

struct TimeNormSpec {
  double t = 0.5;
  double p = 2.0;
  double q = std::numeric_limits<double>::infinity();
  friend bool operator==(const TimeNormSpec&, const TimeNormSpec&) = default;
};

/// Outer Besov norm in time of the spatial-Besov-valued path. The path is
/// bridge-detrended, X(t) - (t/T)(X(T) - X(0)), and periodised on [0, T).
/// p = p_tilde = 2 without weight uses a joint (time, space) Parseval route.
double besov_norm_time_valued(const TimePath& path, const TimeNormSpec& outer, const NormSpec& inner,
                              const CutoffProfile& profile = {}, Kernel kernel = Kernel::parallel);

/// Per-time-block values ||S_k X||_{L_p(0,T; E)}, k = 0..K.
std::vector<double> time_block_norms(const TimePath& path, const TimeNormSpec& outer, const NormSpec& inner,
                                     const CutoffProfile& profile = {}, Kernel kernel = Kernel::parallel);

/// <x>^rho at the cell centres of the lattice box.
std::vector<double> japanese_weight(const Lattice& lat, double rho);

}  // namespace levylab
