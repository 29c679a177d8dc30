#pragma once

// White noise on dyadic grids over boxes [0,T_1] x ... x [0,T_n]. A sample
// stores the cell increments eta(1_cell); everything else (pairings, slab
// processes, coarsening) is built from those.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "levylab/levy.hpp"

namespace levylab {

struct GridSpec {
  std::vector<double> T;         // box side per axis
  std::vector<std::uint32_t> J;  // dyadic level per axis

  static constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 26;

  static GridSpec cube(std::size_t n, double side, std::uint32_t level);

  std::size_t dim() const { return J.size(); }
  std::size_t cells(std::size_t axis) const { return std::size_t{1} << J[axis]; }
  double h(std::size_t axis) const { return T[axis] / static_cast<double>(cells(axis)); }
  std::size_t total_cells() const;
  double cell_volume() const;
  double box_volume() const;
  std::vector<std::size_t> shape() const;

  /// Throws ValidationError for malformed specs and CapacityError past the cap.
  void validate(std::size_t max_cells = kDefaultMaxCells) const;

  /// Grid with one axis removed.
  GridSpec without_axis(std::size_t axis) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Cell-center coordinates of the flat (row-major, last axis fastest) index.
std::vector<double> cell_center(const GridSpec& grid, std::size_t flat);

/// Evaluates f at every cell center; f receives a span of n coordinates.
template <class F>
std::vector<double> grid_function(const GridSpec& grid, const F& f) {
  std::vector<double> out(grid.total_cells());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = cell_center(grid, i);
    out[i] = f(std::span<const double>(x));
  }
  return out;
}

struct WhiteNoiseSample {
  GridSpec grid;
  std::vector<double> cells;  // eta(1_cell), row-major
  LevyTriplet triplet;        // unit-volume triplet of the noise
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;

  /// Cell values divided by the cell volume: the field whose Besov norms are taken.
  std::vector<double> density() const;
};

struct SampleOptions {
  SamplerConfig sampler;
  std::size_t max_cells = GridSpec::kDefaultMaxCells;
};

/// Draws every cell from the volume-scaled triplet. Cell i of replicate r uses
/// the stream (seed, level code of J, r, i), so the result does not depend on
/// the worker count.
WhiteNoiseSample sample_white_noise(const LevyTriplet& tr, const GridSpec& grid, std::uint64_t seed,
                                    std::uint32_t replicate = 0, const SampleOptions& opt = {});

/// Single-threaded reference; bitwise identical to sample_white_noise.
WhiteNoiseSample sample_white_noise_serial(const LevyTriplet& tr, const GridSpec& grid, std::uint64_t seed,
                                           std::uint32_t replicate = 0, const SampleOptions& opt = {});

/// Discrete <eta, phi> = sum_cells eta(1_cell) phi(center).
double pair(const WhiteNoiseSample& sample, std::span<const double> phi);

/// Sums blocks of 2^n children: a level-J sample from a level-(J+1) sample.
WhiteNoiseSample coarsen(const WhiteNoiseSample& sample);
/// Drops drop[a] levels on axis a (sums 2^drop[a] cells along it).
WhiteNoiseSample coarsen(const WhiteNoiseSample& sample, std::span<const std::uint32_t> drop);

/// Axis permutation and per-axis reflection. out axis i takes input axis permutation[i].
struct GridMotion {
  std::vector<std::size_t> permutation;
  std::vector<bool> reflect;

  static GridMotion identity(std::size_t n);
};

WhiteNoiseSample apply_euclidean_motion(const WhiteNoiseSample& sample, const GridMotion& motion);

/// eta_{(0,t]} along one axis. Level l in [0, 2^J_axis] is t = l h_axis.
/// Cumulative sums are kept as exact floating-point expansions, so the
/// difference of consecutive levels is exactly the slab's cells.
class SlabProcess {
public:
  SlabProcess(const WhiteNoiseSample& sample, std::size_t axis);

  std::size_t axis() const { return axis_; }
  std::size_t levels() const { return levels_; }  // number of time points, 2^J + 1
  double time(std::size_t level) const { return static_cast<double>(level) * step_; }
  double step() const { return step_; }
  const GridSpec& spatial_grid() const { return spatial_; }

  /// eta(1_{(0,t]} x 1_cell') for every spatial cell, rounded to double.
  std::vector<double> cumulative(std::size_t level) const;
  /// eta(1_{(t_s, t_l]} x 1_cell'), computed exactly then rounded once.
  std::vector<double> increment(std::size_t from, std::size_t to) const;

  /// The cumulative field as an (n-1)-dimensional sample with triplet scaled by t.
  WhiteNoiseSample cumulative_sample(std::size_t level) const;
  /// One slab as an (n-1)-dimensional sample with triplet scaled by the slab thickness.
  WhiteNoiseSample slab_sample(std::size_t level) const;

private:
  std::size_t axis_;
  std::size_t levels_;
  double step_;
  GridSpec spatial_;
  LevyTriplet triplet_;
  std::uint64_t seed_;
  std::uint32_t replicate_;
  // Flat expansion storage: components of entry (level, cell') live in
  // components_[offsets_[e], offsets_[e+1]).
  std::vector<std::size_t> offsets_;
  std::vector<double> components_;

  std::span<const double> expansion(std::size_t level, std::size_t cell) const;
};

SlabProcess slab_process(const WhiteNoiseSample& sample, std::size_t axis);

/// Field dump: `<stem>.bin` holds little-endian float64 cells in row-major
/// order, `<stem>.json` the header {n, T, J, triplet, seed, replicate, rng}.
void write_field_dump(const WhiteNoiseSample& sample, const std::filesystem::path& stem);
WhiteNoiseSample read_field_dump(const std::filesystem::path& stem);

}  // namespace levylab
