#include "levylab/besov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "levylab/error.hpp"
#include "levylab/fft.hpp"

namespace levylab {

namespace {

using cd = std::complex<double>;
constexpr std::size_t kMaxGroups = 8;
// Fixed chunking keeps the Parseval reduction order independent of the
// number of threads.
constexpr std::size_t kChunk = 16384;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> st(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) st[i - 1] = st[i] * shape[i];
  return st;
}

bool is_infinite(double q) { return std::isinf(q); }

struct GroupSplits {
  std::size_t groups = 0;
  std::array<FilterBank::Split, kMaxGroups> s{};
};

inline GroupSplits splits_at(const std::vector<FilterBank>& banks, std::size_t flat) {
  GroupSplits g;
  g.groups = banks.size();
  for (std::size_t i = 0; i < banks.size(); ++i) g.s[i] = banks[i].split(banks[i].radius(flat));
  return g;
}

// Calls f(block_flat, weight) for every block with nonzero weight at this frequency.
template <class F>
inline void for_each_block(const GroupSplits& g, const std::vector<std::size_t>& block_strides, F&& f) {
  const std::size_t combos = std::size_t{1} << g.groups;
  for (std::size_t c = 0; c < combos; ++c) {
    double w = 1.0;
    std::size_t b = 0;
    for (std::size_t i = 0; i < g.groups; ++i) {
      const bool next = (c >> i) & 1u;
      const double wi = next ? g.s[i].w_next : g.s[i].w_first;
      if (wi == 0.0) {
        w = 0.0;
        break;
      }
      w *= wi;
      b += static_cast<std::size_t>(g.s[i].first + (next ? 1 : 0)) * block_strides[i];
    }
    if (w != 0.0) f(b, w);
  }
}

std::vector<std::size_t> block_strides_of(const std::vector<int>& blocks) {
  std::vector<std::size_t> shape(blocks.begin(), blocks.end());
  return strides_of(shape);
}

std::vector<int> blocks_of(const std::vector<FilterBank>& banks) {
  std::vector<int> b;
  for (const auto& bank : banks) b.push_back(bank.blocks());
  return b;
}

void check_banks(const Lattice& lat, const std::vector<FilterBank>& banks) {
  require(!banks.empty() && banks.size() <= kMaxGroups, "block norms: need between 1 and 8 filter banks");
  std::vector<bool> used(lat.dim(), false);
  for (const auto& bank : banks) {
    for (std::size_t a : bank.axes()) {
      require(a < lat.dim() && !used[a], "block norms: banks must cover disjoint axes");
      used[a] = true;
    }
  }
  for (bool u : used) require(u, "block norms: every axis must belong to a bank");
}

// Weight of block b at a frequency, from the closed mask formula (reference path).
double block_weight_reference(const std::vector<FilterBank>& banks, const std::vector<int>& k, std::size_t flat) {
  double w = 1.0;
  for (std::size_t i = 0; i < banks.size(); ++i) w *= banks[i].mask(k[i], banks[i].radius(flat));
  return w;
}

double lp_sum(std::span<const cd> block, double p, const std::vector<double>* weight, double cell_volume) {
  double acc = 0.0;
  for (std::size_t i = 0; i < block.size(); ++i) {
    const double v = std::fabs(block[i].real());
    const double term = p == 2.0 ? v * v : std::pow(v, p);
    acc += weight ? term * (*weight)[i] : term;
  }
  return acc * cell_volume;
}

}  // namespace

Lattice Lattice::from_grid(const GridSpec& grid) {
  Lattice lat;
  lat.L = grid.T;
  for (std::size_t i = 0; i < grid.dim(); ++i) lat.N.push_back(grid.cells(i));
  return lat;
}

std::size_t Lattice::size() const {
  std::size_t s = 1;
  for (std::size_t n : N) s *= n;
  return s;
}

double Lattice::cell_volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= h(i);
  return v;
}

std::vector<double> axis_frequencies(const Lattice& lat, std::size_t axis) {
  const std::size_t n = lat.N[axis];
  std::vector<double> xi(n);
  for (std::size_t m = 0; m < n; ++m) {
    xi[m] = 2.0 * std::numbers::pi * static_cast<double>(fft::signed_index(m, n)) / lat.L[axis];
  }
  return xi;
}

double CutoffProfile::operator()(double r) const {
  const double x = (r - inner) / (outer - inner);
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  const int n = (order - 1) / 2;
  double poly = 0.0;
  double xk = 1.0;
  for (int k = 0; k <= n; ++k) {
    poly += binomial(n + k, k) * binomial(2 * n + 1, n - k) * xk;
    xk *= -x;
  }
  return 1.0 - std::pow(x, n + 1) * poly;
}

FilterBank::FilterBank(const Lattice& lat, std::vector<std::size_t> axes, CutoffProfile profile)
    : axes_(std::move(axes)), profile_(profile) {
  require(profile_.order >= 1 && profile_.order % 2 == 1, "cutoff profile: order must be odd and >= 1");
  require(profile_.inner == 1.0 && profile_.outer > 1.0 && profile_.outer <= 2.0,
          "cutoff profile: need inner = 1 and 1 < outer <= 2 for a dyadic resolution");
  require(!axes_.empty(), "filter bank: no axes");
  for (std::size_t a : axes_) require(a < lat.dim(), "filter bank: axis out of range");
  const auto shape = lat.N;
  const auto strides = strides_of(shape);
  std::vector<std::vector<double>> xi2(lat.dim());
  for (std::size_t a : axes_) {
    const auto f = axis_frequencies(lat, a);
    xi2[a].resize(f.size());
    for (std::size_t m = 0; m < f.size(); ++m) xi2[a][m] = f[m] * f[m];
  }
  radius_.resize(lat.size());
  double r_max = 0.0;
  for (std::size_t flat = 0; flat < radius_.size(); ++flat) {
    double r2 = 0.0;
    for (std::size_t a : axes_) r2 += xi2[a][(flat / strides[a]) % shape[a]];
    radius_[flat] = std::sqrt(r2);
    r_max = std::max(r_max, radius_[flat]);
  }
  const Split top = split(r_max);
  k_max_ = top.w_next > 0.0 ? top.first + 1 : top.first;
}

double FilterBank::mask(int k, double r) const {
  if (k == 0) return profile_(r);
  return profile_(std::ldexp(r, -k)) - profile_(std::ldexp(r, 1 - k));
}

FilterBank::Split FilterBank::split(double r) const {
  if (r < 1.0) return {0, 1.0, 0.0};
  int e = 0;
  std::frexp(r, &e);  // r = m 2^e with m in [0.5, 1), so floor(log2 r) = e - 1
  const int j = e - 1;
  const double w = profile_(std::ldexp(r, -j));
  return {j, w, 1.0 - w};
}

FilterBank build_filter_bank(const GridSpec& grid, const CutoffProfile& profile) {
  const Lattice lat = Lattice::from_grid(grid);
  std::vector<std::size_t> axes(lat.dim());
  std::iota(axes.begin(), axes.end(), std::size_t{0});
  return FilterBank(lat, axes, profile);
}

NormSpec NormSpec::isotropic(double s, double p, double q, std::optional<double> rho) {
  NormSpec spec;
  spec.kind = NormKind::isotropic;
  spec.s = s;
  spec.p = p;
  spec.q = q;
  spec.rho = rho;
  return spec;
}

NormSpec NormSpec::mixed(std::vector<double> s_bar, std::vector<std::size_t> splitting, double p, double q) {
  NormSpec spec;
  spec.kind = NormKind::mixed;
  spec.s_bar = std::move(s_bar);
  spec.splitting = std::move(splitting);
  spec.p = p;
  spec.q = std::isnan(q) ? p : q;
  return spec;
}

void NormSpec::validate(std::size_t n) const {
  require(p > 1.0 && std::isfinite(p), "norm spec: p must lie in (1, inf)");
  require(q > 1.0, "norm spec: q must be > 1");
  require(std::isfinite(s), "norm spec: s must be finite");
  if (kind == NormKind::mixed) {
    require(!splitting.empty(), "norm spec: mixed norm needs a splitting");
    require(splitting.size() == s_bar.size(), "norm spec: s_bar and splitting must have equal length");
    require(splitting.size() <= kMaxGroups, "norm spec: at most 8 axis groups");
    std::size_t total = 0;
    for (std::size_t d : splitting) {
      require(d >= 1, "norm spec: splitting entries must be >= 1");
      total += d;
    }
    require(total == n, "norm spec: splitting sums to " + std::to_string(total) + ", field dimension is " +
                            std::to_string(n));
    require(!rho.has_value(), "norm spec: weights are only supported for isotropic norms");
  }
}

std::vector<std::vector<std::size_t>> NormSpec::groups(std::size_t n) const {
  std::vector<std::vector<std::size_t>> g;
  if (kind == NormKind::isotropic) {
    g.emplace_back(n);
    std::iota(g.back().begin(), g.back().end(), std::size_t{0});
    return g;
  }
  std::size_t next = 0;
  for (std::size_t d : splitting) {
    g.emplace_back();
    for (std::size_t i = 0; i < d; ++i) g.back().push_back(next++);
  }
  return g;
}

std::vector<double> NormSpec::smoothness(std::size_t) const {
  return kind == NormKind::isotropic ? std::vector<double>{s} : s_bar;
}

std::string NormSpec::label() const {
  std::ostringstream os;
  if (kind == NormKind::isotropic) {
    os << "iso(" << s << ")";
  } else {
    os << "mixed(";
    for (std::size_t i = 0; i < s_bar.size(); ++i) os << (i ? ";" : "") << s_bar[i];
    os << ")";
  }
  return os.str();
}

std::size_t BlockNorms::flat(const std::vector<int>& k) const {
  std::size_t f = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) f = f * static_cast<std::size_t>(blocks[i]) + static_cast<std::size_t>(k[i]);
  return f;
}

std::vector<int> BlockNorms::multi_index(std::size_t f) const {
  std::vector<int> k(blocks.size());
  for (std::size_t i = blocks.size(); i-- > 0;) {
    k[i] = static_cast<int>(f % static_cast<std::size_t>(blocks[i]));
    f /= static_cast<std::size_t>(blocks[i]);
  }
  return k;
}

std::vector<cd> spectrum(std::span<const double> field, const Lattice& lat) {
  require(field.size() == lat.size(), "spectrum: field size does not match the lattice");
  std::vector<cd> out(field.begin(), field.end());
  fft::transform(out.data(), lat.N, fft::Direction::forward);
  return out;
}

BlockNorms block_norms_from_spectrum(std::span<const cd> spec, const Lattice& lat, const std::vector<FilterBank>& banks) {
  check_banks(lat, banks);
  require(spec.size() == lat.size(), "block norms: spectrum size does not match the lattice");
  BlockNorms bn;
  bn.blocks = blocks_of(banks);
  bn.p = 2.0;
  const auto bstrides = block_strides_of(bn.blocks);
  std::size_t nb = 1;
  for (int b : bn.blocks) nb *= static_cast<std::size_t>(b);
  const std::size_t total = spec.size();
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks * nb, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    double* acc = partial.data() + static_cast<std::size_t>(c) * nb;
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(total, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const double e = std::norm(spec[i]);
      if (e == 0.0) continue;
      for_each_block(splits_at(banks, i), bstrides, [&](std::size_t b, double w) { acc[b] += w * w * e; });
    }
  }
  bn.values.assign(nb, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t b = 0; b < nb; ++b) bn.values[b] += partial[c * nb + b];
  }
  const double scale = lat.cell_volume() / static_cast<double>(total);
  for (double& v : bn.values) v = std::sqrt(v * scale);
  return bn;
}

std::vector<double> japanese_weight(const Lattice& lat, double rho) {
  std::vector<double> w(lat.size());
  const auto strides = strides_of(lat.N);
  for (std::size_t flat = 0; flat < w.size(); ++flat) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < lat.dim(); ++a) {
      const double x = (static_cast<double>((flat / strides[a]) % lat.N[a]) + 0.5) * lat.h(a);
      r2 += x * x;
    }
    w[flat] = std::pow(1.0 + r2, 0.5 * rho);
  }
  return w;
}

BlockNorms block_norms(std::span<const double> field, const Lattice& lat, const std::vector<FilterBank>& banks,
                       double p, std::optional<double> rho, Kernel kernel) {
  require(p >= 1.0 && std::isfinite(p), "block norms: p must lie in [1, inf)");
  check_banks(lat, banks);
  const auto spec = spectrum(field, lat);
  if (p == 2.0 && !rho && kernel == Kernel::parallel) return block_norms_from_spectrum(spec, lat, banks);

  BlockNorms bn;
  bn.blocks = blocks_of(banks);
  bn.p = p;
  std::size_t nb = 1;
  for (int b : bn.blocks) nb *= static_cast<std::size_t>(b);
  bn.values.assign(nb, 0.0);
  std::optional<std::vector<double>> weight;
  if (rho) weight = japanese_weight(lat, *rho);
  const std::size_t total = lat.size();
  const double inv_n = 1.0 / static_cast<double>(total);
  const double vol = lat.cell_volume();

  auto one_block = [&](std::size_t b, std::vector<cd>& buf) {
    const std::vector<int> k = bn.multi_index(b);
    bool any = false;
    for (std::size_t i = 0; i < total; ++i) {
      const double w = block_weight_reference(banks, k, i);
      buf[i] = spec[i] * (w * inv_n);
      any = any || (w != 0.0 && spec[i] != cd{});
    }
    if (!any) return 0.0;
    fft::transform(buf.data(), lat.N, fft::Direction::backward);
    return std::pow(lp_sum(buf, p, weight ? &*weight : nullptr, vol), 1.0 / p);
  };

  if (kernel == Kernel::parallel) {
#pragma omp parallel
    {
      std::vector<cd> buf(total);
#pragma omp for schedule(dynamic)
      for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        bn.values[static_cast<std::size_t>(b)] = one_block(static_cast<std::size_t>(b), buf);
      }
    }
  } else {
    std::vector<cd> buf(total);
    for (std::size_t b = 0; b < nb; ++b) bn.values[b] = one_block(b, buf);
  }
  return bn;
}

double besov_from_blocks(const BlockNorms& bn, const std::vector<double>& s, double q) {
  require(s.size() == bn.blocks.size(), "besov: smoothness vector does not match the block layout");
  double acc = 0.0;
  for (std::size_t b = 0; b < bn.values.size(); ++b) {
    const double v = bn.values[b];
    if (v == 0.0) continue;
    const auto k = bn.multi_index(b);
    double expo = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) expo += s[i] * k[i];
    if (is_infinite(q)) {
      acc = std::max(acc, std::exp2(expo) * v);
    } else {
      acc += std::exp2(q * expo) * std::pow(v, q);
    }
  }
  return is_infinite(q) ? acc : std::pow(acc, 1.0 / q);
}

std::vector<std::vector<double>> lp_blocks(std::span<const double> field, const Lattice& lat, const FilterBank& bank) {
  const auto spec = spectrum(field, lat);
  const std::size_t total = lat.size();
  std::vector<std::vector<double>> out(static_cast<std::size_t>(bank.blocks()), std::vector<double>(total));
  std::vector<cd> buf(total);
  for (int k = 0; k < bank.blocks(); ++k) {
    for (std::size_t i = 0; i < total; ++i) buf[i] = spec[i] * (bank.mask(k, bank.radius(i)) / static_cast<double>(total));
    fft::transform(buf.data(), lat.N, fft::Direction::backward);
    for (std::size_t i = 0; i < total; ++i) out[static_cast<std::size_t>(k)][i] = buf[i].real();
  }
  return out;
}

double besov_norm_iso(std::span<const double> field, const Lattice& lat, const NormSpec& spec,
                      const CutoffProfile& profile, Kernel kernel) {
  require(spec.kind == NormKind::isotropic, "besov_norm_iso: spec is not isotropic");
  spec.validate(lat.dim());
  std::vector<std::size_t> axes(lat.dim());
  std::iota(axes.begin(), axes.end(), std::size_t{0});
  const std::vector<FilterBank> banks{FilterBank(lat, axes, profile)};
  return besov_from_blocks(block_norms(field, lat, banks, spec.p, spec.rho, kernel), {spec.s}, spec.q);
}

std::vector<FilterBank> mixed_banks(const Lattice& lat, const NormSpec& spec, const CutoffProfile& profile) {
  std::vector<FilterBank> banks;
  for (auto& g : spec.groups(lat.dim())) banks.emplace_back(lat, g, profile);
  return banks;
}

double besov_norm_mixed(std::span<const double> field, const Lattice& lat, const NormSpec& spec,
                        const CutoffProfile& profile, Kernel kernel) {
  require(spec.kind == NormKind::mixed, "besov_norm_mixed: spec is not mixed");
  spec.validate(lat.dim());
  const auto banks = mixed_banks(lat, spec, profile);
  return besov_from_blocks(block_norms(field, lat, banks, spec.p, std::nullopt, kernel), spec.s_bar, spec.q);
}

double besov_norm(std::span<const double> field, const Lattice& lat, const NormSpec& spec,
                  const CutoffProfile& profile, Kernel kernel) {
  return spec.kind == NormKind::isotropic ? besov_norm_iso(field, lat, spec, profile, kernel)
                                          : besov_norm_mixed(field, lat, spec, profile, kernel);
}

namespace {

double iterated_level(const std::vector<cd>& data, const Lattice& lat, const std::vector<FilterBank>& banks,
                      const std::vector<double>& s, const std::vector<std::size_t>& order, std::size_t level, double p) {
  const FilterBank& bank = banks[order[level]];
  std::vector<cd> hat = data;
  fft::transform_axes(hat.data(), lat.N, bank.axes(), fft::Direction::forward);
  double points = 1.0;
  for (std::size_t a : bank.axes()) points *= static_cast<double>(lat.N[a]);
  std::vector<cd> block(hat.size());
  double total = 0.0;
  for (int k = 0; k < bank.blocks(); ++k) {
    bool any = false;
    for (std::size_t i = 0; i < hat.size(); ++i) {
      const double w = bank.mask(k, bank.radius(i));
      block[i] = hat[i] * (w / points);
      any = any || (w != 0.0 && hat[i] != cd{});
    }
    if (!any) continue;
    fft::transform_axes(block.data(), lat.N, bank.axes(), fft::Direction::backward);
    const double inner = level + 1 == order.size()
                             ? lp_sum(block, p, nullptr, lat.cell_volume())
                             : iterated_level(block, lat, banks, s, order, level + 1, p);
    total += std::exp2(p * s[order[level]] * k) * inner;
  }
  return total;
}

}  // namespace

double besov_norm_mixed_iterated(std::span<const double> field, const Lattice& lat, const NormSpec& spec,
                                 const std::vector<std::size_t>& group_order, const CutoffProfile& profile) {
  require(spec.kind == NormKind::mixed, "iterated norm: spec is not mixed");
  spec.validate(lat.dim());
  require(spec.p == spec.q, "iterated norm: requires p = q");
  require(field.size() == lat.size(), "iterated norm: field size does not match the lattice");
  const auto banks = mixed_banks(lat, spec, profile);
  std::vector<std::size_t> sorted = group_order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) require(sorted[i] == i, "iterated norm: order must permute the groups");
  require(sorted.size() == banks.size(), "iterated norm: order must list every group");
  std::vector<cd> data(field.begin(), field.end());
  return std::pow(iterated_level(data, lat, banks, spec.s_bar, group_order, 0, spec.p), 1.0 / spec.p);
}

std::size_t TimePath::steps() const {
  const std::size_t m = spatial.size();
  require(m > 0 && values.size() % m == 0 && values.size() / m >= 2, "time path: need at least two time points");
  return values.size() / m - 1;
}

std::vector<double> time_block_norms(const TimePath& path, const TimeNormSpec& outer, const NormSpec& inner,
                                     const CutoffProfile& profile, Kernel kernel) {
  const std::size_t M = path.steps();
  const std::size_t S = path.spatial.size();
  require(path.T > 0.0, "time path: T must be > 0");
  require(outer.p >= 1.0 && std::isfinite(outer.p), "time norm: p must lie in [1, inf)");
  inner.validate(path.spatial.dim());

  // Bridge-detrended, periodic samples at t_i = i T / M, i < M.
  std::vector<double> y(M * S);
  for (std::size_t i = 0; i < M; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(M);
    for (std::size_t c = 0; c < S; ++c) {
      const double x0 = path.values[c];
      const double xT = path.values[M * S + c];
      y[i * S + c] = path.values[i * S + c] - frac * (xT - x0);
    }
  }
  Lattice joint;
  joint.L.push_back(path.T);
  joint.N.push_back(M);
  for (std::size_t a = 0; a < path.spatial.dim(); ++a) {
    joint.L.push_back(path.spatial.L[a]);
    joint.N.push_back(path.spatial.N[a]);
  }
  const FilterBank time_bank(joint, {0}, profile);
  const double dt = path.T / static_cast<double>(M);

  const bool parseval = kernel == Kernel::parallel && outer.p == 2.0 && inner.p == 2.0 && inner.q == 2.0 && !inner.rho;
  if (parseval) {
    std::vector<FilterBank> banks{time_bank};
    for (const auto& g : inner.groups(path.spatial.dim())) {
      std::vector<std::size_t> shifted;
      for (std::size_t a : g) shifted.push_back(a + 1);
      banks.emplace_back(joint, shifted, profile);
    }
    const BlockNorms bn = block_norms(y, joint, banks, 2.0);
    const auto s_inner = inner.smoothness(path.spatial.dim());
    std::vector<double> out(static_cast<std::size_t>(time_bank.blocks()), 0.0);
    for (std::size_t b = 0; b < bn.values.size(); ++b) {
      const auto k = bn.multi_index(b);
      double expo = 0.0;
      for (std::size_t i = 1; i < k.size(); ++i) expo += s_inner[i - 1] * k[i];
      out[static_cast<std::size_t>(k[0])] += std::exp2(2.0 * expo) * bn.values[b] * bn.values[b];
    }
    for (double& v : out) v = std::sqrt(v);
    return out;
  }

  std::vector<cd> hat(y.begin(), y.end());
  fft::transform_axes(hat.data(), joint.N, {0}, fft::Direction::forward);
  std::vector<double> out(static_cast<std::size_t>(time_bank.blocks()), 0.0);
  std::vector<cd> block(hat.size());
  std::vector<double> slice(S);
  for (int k = 0; k < time_bank.blocks(); ++k) {
    bool any = false;
    for (std::size_t i = 0; i < hat.size(); ++i) {
      const double w = time_bank.mask(k, time_bank.radius(i));
      block[i] = hat[i] * (w / static_cast<double>(M));
      any = any || (w != 0.0 && hat[i] != cd{});
    }
    if (!any) continue;
    fft::transform_axes(block.data(), joint.N, {0}, fft::Direction::backward);
    double acc = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      for (std::size_t c = 0; c < S; ++c) slice[c] = block[i * S + c].real();
      const double e = besov_norm(slice, path.spatial, inner, profile, kernel);
      acc += std::pow(e, outer.p) * dt;
    }
    out[static_cast<std::size_t>(k)] = std::pow(acc, 1.0 / outer.p);
  }
  return out;
}

double besov_norm_time_valued(const TimePath& path, const TimeNormSpec& outer, const NormSpec& inner,
                              const CutoffProfile& profile, Kernel kernel) {
  const auto v = time_block_norms(path, outer, inner, profile, kernel);
  BlockNorms bn;
  bn.blocks = {static_cast<int>(v.size())};
  bn.values = v;
  bn.p = outer.p;
  return besov_from_blocks(bn, {outer.t}, outer.q);
}

}  // namespace levylab
