#include "levylab/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "levylab/error.hpp"

namespace levylab {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

// Error-free transformations (Shewchuk). Expansions are kept with components
// in increasing magnitude, zeros removed.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  e = (a - av) + (b - bv);
}

void grow_expansion(std::vector<double>& e, double b) {
  double q = b;
  std::size_t out = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double s, err;
    two_sum(q, e[i], s, err);
    q = s;
    if (err != 0.0) e[out++] = err;
  }
  e.resize(out);
  if (q != 0.0 || e.empty()) e.push_back(q);
}

void compress(std::vector<double>& e) {
  if (e.size() < 2) return;
  // Top-down pass.
  std::vector<double> g(e.size());
  std::size_t bottom = e.size() - 1;
  double q = e.back();
  for (std::size_t i = e.size() - 1; i-- > 0;) {
    const double sum = q + e[i];
    const double small = e[i] - (sum - q);
    if (small != 0.0) {
      g[bottom--] = sum;
      q = small;
    } else {
      q = sum;
    }
  }
  g[bottom] = q;
  // Bottom-up pass.
  std::vector<double> h;
  h.reserve(e.size());
  q = g[bottom];
  for (std::size_t i = bottom + 1; i < g.size(); ++i) {
    const double sum = g[i] + q;
    const double small = q - (sum - g[i]);
    if (small != 0.0) h.push_back(small);
    q = sum;
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  e.swap(h);
}

// Value of the expansion rounded to double. Refines until the residual is
// exactly zero or stops changing; exact whenever the value is representable.
double round_expansion(std::vector<double> e) {
  compress(e);
  double r = 0.0;
  for (double c : e) r += c;
  for (int iter = 0; iter < 8; ++iter) {
    std::vector<double> res = e;
    grow_expansion(res, -r);
    compress(res);
    double delta = 0.0;
    for (double c : res) delta += c;
    if (delta == 0.0) break;
    const double next = r + delta;
    if (next == r) break;
    r = next;
  }
  return r;
}

// Row-major strides for a shape.
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> st(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) st[i - 1] = st[i] * shape[i];
  return st;
}

WhiteNoiseSample sample_impl(const LevyTriplet& tr, const GridSpec& grid, std::uint64_t seed,
                             std::uint32_t replicate, const SampleOptions& opt, bool parallel) {
  grid.validate(opt.max_cells);
  require(grid.total_cells() <= std::numeric_limits<std::uint32_t>::max(),
          "grid has more cells than the stream index can address");
  WhiteNoiseSample out;
  out.grid = grid;
  out.triplet = tr;
  out.seed = seed;
  out.replicate = replicate;
  const std::size_t count = grid.total_cells();
  out.cells.assign(count, 0.0);
  if (tr.is_zero()) return out;

  const IncrementSampler sampler(tr, grid.cell_volume(), opt.sampler);
  const std::uint32_t level = level_code(grid.J.data(), grid.J.size());
  auto draw = [&](std::size_t i) {
    CounterRng rng(StreamId{seed, StreamPurpose::cell, level, replicate, static_cast<std::uint32_t>(i)});
    out.cells[i] = sampler(rng);
  };
  const auto n = static_cast<std::ptrdiff_t>(count);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) draw(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) draw(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace

GridSpec GridSpec::cube(std::size_t n, double side, std::uint32_t level) {
  return {std::vector<double>(n, side), std::vector<std::uint32_t>(n, level)};
}

std::size_t GridSpec::total_cells() const {
  std::size_t c = 1;
  for (std::size_t i = 0; i < dim(); ++i) c *= cells(i);
  return c;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= h(i);
  return v;
}

double GridSpec::box_volume() const {
  double v = 1.0;
  for (double t : T) v *= t;
  return v;
}

std::vector<std::size_t> GridSpec::shape() const {
  std::vector<std::size_t> s(dim());
  for (std::size_t i = 0; i < dim(); ++i) s[i] = cells(i);
  return s;
}

void GridSpec::validate(std::size_t max_cells) const {
  require(T.size() == J.size(), "grid: T and J must have the same length");
  for (double t : T) require(t > 0.0 && std::isfinite(t), "grid: box sides must be positive and finite");
  std::uint64_t bits = 0;
  for (std::uint32_t j : J) {
    require(j <= 30, "grid: dyadic level must be <= 30");
    bits += j;
  }
  if (bits >= 63) throw CapacityError(std::numeric_limits<std::size_t>::max(), max_cells);
  const std::size_t total = std::size_t{1} << bits;
  if (total > max_cells) throw CapacityError(total, max_cells);
}

GridSpec GridSpec::without_axis(std::size_t axis) const {
  require(axis < dim(), "grid: axis out of range");
  GridSpec g = *this;
  g.T.erase(g.T.begin() + static_cast<std::ptrdiff_t>(axis));
  g.J.erase(g.J.begin() + static_cast<std::ptrdiff_t>(axis));
  return g;
}

std::vector<double> cell_center(const GridSpec& grid, std::size_t flat) {
  std::vector<double> x(grid.dim());
  for (std::size_t i = grid.dim(); i-- > 0;) {
    const std::size_t c = grid.cells(i);
    x[i] = (static_cast<double>(flat % c) + 0.5) * grid.h(i);
    flat /= c;
  }
  return x;
}

std::vector<double> WhiteNoiseSample::density() const {
  const double inv = 1.0 / grid.cell_volume();
  std::vector<double> out(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) out[i] = cells[i] * inv;
  return out;
}

WhiteNoiseSample sample_white_noise(const LevyTriplet& tr, const GridSpec& grid, std::uint64_t seed,
                                    std::uint32_t replicate, const SampleOptions& opt) {
  return sample_impl(tr, grid, seed, replicate, opt, true);
}

WhiteNoiseSample sample_white_noise_serial(const LevyTriplet& tr, const GridSpec& grid, std::uint64_t seed,
                                           std::uint32_t replicate, const SampleOptions& opt) {
  return sample_impl(tr, grid, seed, replicate, opt, false);
}

double pair(const WhiteNoiseSample& sample, std::span<const double> phi) {
  if (phi.size() != sample.cells.size()) {
    throw ValidationError("pair: test function has " + std::to_string(phi.size()) + " values, grid has " +
                          std::to_string(sample.cells.size()) + " cells");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) acc += sample.cells[i] * phi[i];
  return acc;
}

WhiteNoiseSample coarsen(const WhiteNoiseSample& sample, std::span<const std::uint32_t> drop) {
  const GridSpec& fine = sample.grid;
  require(drop.size() == fine.dim(), "coarsen: need one level drop per axis");
  for (std::size_t a = 0; a < fine.dim(); ++a)
    require(drop[a] <= fine.J[a], "coarsen: axis " + std::to_string(a) + " cannot drop below level 0");
  WhiteNoiseSample out = sample;
  for (std::size_t a = 0; a < fine.dim(); ++a) out.grid.J[a] -= drop[a];
  const auto coarse_strides = strides_of(out.grid.shape());
  out.cells.assign(out.grid.total_cells(), 0.0);
  const auto fine_shape = fine.shape();
  std::vector<std::size_t> idx(fine.dim(), 0);
  for (std::size_t i = 0; i < sample.cells.size(); ++i) {
    std::size_t rem = i;
    std::size_t target = 0;
    for (std::size_t a = fine.dim(); a-- > 0;) {
      idx[a] = rem % fine_shape[a];
      rem /= fine_shape[a];
      target += (idx[a] >> drop[a]) * coarse_strides[a];
    }
    out.cells[target] += sample.cells[i];
  }
  return out;
}

WhiteNoiseSample coarsen(const WhiteNoiseSample& sample) {
  for (std::uint32_t j : sample.grid.J) require(j >= 1, "coarsen: every axis needs level >= 1");
  const std::vector<std::uint32_t> ones(sample.grid.dim(), 1);
  return coarsen(sample, ones);
}

GridMotion GridMotion::identity(std::size_t n) {
  GridMotion m;
  m.permutation.resize(n);
  std::iota(m.permutation.begin(), m.permutation.end(), std::size_t{0});
  m.reflect.assign(n, false);
  return m;
}

WhiteNoiseSample apply_euclidean_motion(const WhiteNoiseSample& sample, const GridMotion& motion) {
  const GridSpec& g = sample.grid;
  const std::size_t n = g.dim();
  require(motion.permutation.size() == n && motion.reflect.size() == n,
          "euclidean motion: permutation and reflection must cover every axis");
  std::vector<bool> seen(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t src = motion.permutation[a];
    require(src < n && !seen[src], "euclidean motion: not a permutation");
    seen[src] = true;
    require(g.J[src] == g.J[a] && g.T[src] == g.T[a],
            "euclidean motion: permutation must map the grid to itself (equal T and J on swapped axes)");
  }
  WhiteNoiseSample out = sample;
  const auto shape = g.shape();
  const auto strides = strides_of(shape);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < sample.cells.size(); ++i) {
    std::size_t rem = i;
    for (std::size_t a = n; a-- > 0;) {
      idx[a] = rem % shape[a];
      rem /= shape[a];
    }
    std::size_t src = 0;
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t k = motion.reflect[a] ? shape[a] - 1 - idx[a] : idx[a];
      src += k * strides[motion.permutation[a]];
    }
    out.cells[i] = sample.cells[src];
  }
  return out;
}

SlabProcess::SlabProcess(const WhiteNoiseSample& sample, std::size_t axis)
    : axis_(axis), triplet_(sample.triplet), seed_(sample.seed), replicate_(sample.replicate) {
  const GridSpec& g = sample.grid;
  require(g.dim() >= 2, "slab process needs dimension >= 2");
  require(axis < g.dim(), "slab process: axis " + std::to_string(axis) + " out of range");
  spatial_ = g.without_axis(axis);
  step_ = g.h(axis);
  const std::size_t slabs = g.cells(axis);
  levels_ = slabs + 1;
  const std::size_t spatial_cells = spatial_.total_cells();

  const auto shape = g.shape();
  const auto strides = strides_of(shape);
  // Spatial index s maps to the full index with the axis coordinate set to 0.
  std::vector<std::size_t> base(spatial_cells);
  {
    const auto sshape = spatial_.shape();
    for (std::size_t s = 0; s < spatial_cells; ++s) {
      std::size_t rem = s;
      std::size_t full = 0;
      for (std::size_t a = spatial_.dim(); a-- > 0;) {
        const std::size_t src_axis = a < axis ? a : a + 1;
        full += (rem % sshape[a]) * strides[src_axis];
        rem /= sshape[a];
      }
      base[s] = full;
    }
  }

  std::vector<std::vector<double>> running(spatial_cells);
  offsets_.reserve(levels_ * spatial_cells + 1);
  offsets_.push_back(0);
  // Level 0: empty expansions (value 0).
  for (std::size_t s = 0; s < spatial_cells; ++s) offsets_.push_back(0);
  for (std::size_t l = 0; l < slabs; ++l) {
    for (std::size_t s = 0; s < spatial_cells; ++s) {
      auto& e = running[s];
      grow_expansion(e, sample.cells[base[s] + l * strides[axis]]);
      compress(e);
      for (double c : e) {
        if (c != 0.0) components_.push_back(c);
      }
      offsets_.push_back(components_.size());
    }
  }
}

std::span<const double> SlabProcess::expansion(std::size_t level, std::size_t cell) const {
  const std::size_t e = level * spatial_.total_cells() + cell;
  return {components_.data() + offsets_[e], offsets_[e + 1] - offsets_[e]};
}

std::vector<double> SlabProcess::cumulative(std::size_t level) const {
  require(level < levels_, "slab process: level out of range");
  const std::size_t m = spatial_.total_cells();
  std::vector<double> out(m);
  for (std::size_t s = 0; s < m; ++s) {
    const auto e = expansion(level, s);
    out[s] = round_expansion(std::vector<double>(e.begin(), e.end()));
  }
  return out;
}

std::vector<double> SlabProcess::increment(std::size_t from, std::size_t to) const {
  require(from <= to && to < levels_, "slab process: need 0 <= from <= to < levels");
  const std::size_t m = spatial_.total_cells();
  std::vector<double> out(m);
  std::vector<double> work;
  for (std::size_t s = 0; s < m; ++s) {
    const auto hi = expansion(to, s);
    const auto lo = expansion(from, s);
    work.assign(hi.begin(), hi.end());
    for (double c : lo) grow_expansion(work, -c);
    out[s] = round_expansion(work);
  }
  return out;
}

WhiteNoiseSample SlabProcess::cumulative_sample(std::size_t level) const {
  WhiteNoiseSample out;
  out.grid = spatial_;
  out.cells = cumulative(level);
  out.triplet = level == 0 ? LevyTriplet{} : triplet_.scaled(time(level));
  out.seed = seed_;
  out.replicate = replicate_;
  return out;
}

WhiteNoiseSample SlabProcess::slab_sample(std::size_t level) const {
  require(level >= 1 && level < levels_, "slab process: slab index must lie in [1, levels)");
  WhiteNoiseSample out;
  out.grid = spatial_;
  out.cells = increment(level - 1, level);
  out.triplet = triplet_.scaled(step_);
  out.seed = seed_;
  out.replicate = replicate_;
  return out;
}

SlabProcess slab_process(const WhiteNoiseSample& sample, std::size_t axis) { return SlabProcess(sample, axis); }

void write_field_dump(const WhiteNoiseSample& sample, const std::filesystem::path& stem) {
  nlohmann::json header = {
      {"n", sample.grid.dim()},
      {"T", sample.grid.T},
      {"J", sample.grid.J},
      {"triplet", sample.triplet},
      {"seed", sample.seed},
      {"replicate", sample.replicate},
      {"rng", kRngName},
      {"dtype", "float64-le"},
      {"order", "row-major"},
  };
  auto json_path = stem;
  json_path += ".json";
  auto bin_path = stem;
  bin_path += ".bin";
  {
    std::ofstream js(json_path);
    if (!js) throw ValidationError("cannot write " + json_path.string());
    js << header.dump(2) << '\n';
  }
  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw ValidationError("cannot write " + bin_path.string());
  for (double v : sample.cells) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    bin.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

WhiteNoiseSample read_field_dump(const std::filesystem::path& stem) {
  auto json_path = stem;
  json_path += ".json";
  auto bin_path = stem;
  bin_path += ".bin";
  std::ifstream js(json_path);
  if (!js) throw ValidationError("cannot read " + json_path.string());
  const nlohmann::json header = nlohmann::json::parse(js);
  WhiteNoiseSample out;
  out.grid.T = header.at("T").get<std::vector<double>>();
  out.grid.J = header.at("J").get<std::vector<std::uint32_t>>();
  out.grid.validate();
  out.triplet = header.at("triplet").get<LevyTriplet>();
  out.seed = header.at("seed").get<std::uint64_t>();
  out.replicate = header.at("replicate").get<std::uint32_t>();
  require(header.value("rng", std::string{}) == kRngName, "field dump: unknown rng");
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw ValidationError("cannot read " + bin_path.string());
  out.cells.resize(out.grid.total_cells());
  for (double& v : out.cells) {
    unsigned char bytes[8];
    if (!bin.read(reinterpret_cast<char*>(bytes), 8)) throw ValidationError("field dump: truncated " + bin_path.string());
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    v = std::bit_cast<double>(bits);
  }
  return out;
}

}  // namespace levylab
