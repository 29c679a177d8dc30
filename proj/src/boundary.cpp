#include "levylab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levylab/error.hpp"
#include "levylab/fft.hpp"

namespace levylab {

namespace {

using cd = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kModeChunk = 1024;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> st(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) st[i - 1] = st[i] * shape[i];
  return st;
}

// Squared frequency of the tangential axes and the temporal frequency of each mode.
struct ModeFrequencies {
  std::vector<double> xi2;
  std::vector<double> tau;
};

ModeFrequencies mode_frequencies(const HalfSpaceGrid& grid) {
  const Lattice& lat = grid.boundary;
  const auto strides = strides_of(lat.N);
  std::vector<std::vector<double>> f(lat.dim());
  for (std::size_t a = 0; a < lat.dim(); ++a) f[a] = axis_frequencies(lat, a);
  ModeFrequencies m;
  m.xi2.assign(lat.size(), 0.0);
  m.tau.assign(lat.size(), 0.0);
  const std::size_t first = grid.has_time ? 1 : 0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    for (std::size_t a = first; a < lat.dim(); ++a) {
      const double v = f[a][(i / strides[a]) % lat.N[a]];
      m.xi2[i] += v * v;
    }
    if (grid.has_time) m.tau[i] = f[0][i / strides[0]];
  }
  return m;
}

double pos(double v) { return v > 0.0 ? v : 0.0; }

bool parseval_eligible(const WeightedNormSpec& spec) {
  return spec.q == 2.0 && spec.inner.p == 2.0 && spec.inner.q == 2.0 && !spec.inner.rho &&
         (!spec.time || spec.time->p == 2.0);
}

void validate_spec(const HalfSpaceField& u, const WeightedNormSpec& spec) {
  require(spec.q >= 1.0 && std::isfinite(spec.q), "weighted norm: q must lie in [1, inf)");
  require(spec.k >= 0, "weighted norm: k must be >= 0");
  const std::size_t tdim = u.grid().boundary.dim() - (u.grid().has_time ? 1 : 0);
  require(tdim >= 1, "weighted norm: no tangential axes");
  spec.inner.validate(tdim);
  if (u.grid().has_time) {
    require(spec.time.has_value(), "weighted norm: a field with a time axis needs a time norm");
    require(parseval_eligible(spec),
            "weighted norm: with a time axis only q = 2 and inner p = q = 2 without weights are supported");
  } else {
    require(!spec.time.has_value(), "weighted norm: time norm given but the field has no time axis");
  }
}

// Tangential banks on the boundary lattice, shifted past the time axis.
std::vector<FilterBank> tangential_banks(const HalfSpaceGrid& grid, const NormSpec& inner, const CutoffProfile& profile) {
  const std::size_t first = grid.has_time ? 1 : 0;
  const std::size_t tdim = grid.boundary.dim() - first;
  std::vector<FilterBank> banks;
  for (const auto& g : inner.groups(tdim)) {
    std::vector<std::size_t> axes;
    for (std::size_t a : g) axes.push_back(a + first);
    banks.emplace_back(grid.boundary, axes, profile);
  }
  return banks;
}

// sum_k 2^{2 s k} w_k^2 per group, multiplied over groups.
double besov_weight(const std::vector<FilterBank>& banks, const std::vector<double>& s, std::size_t mode) {
  double a = 1.0;
  for (std::size_t g = 0; g < banks.size(); ++g) {
    const auto sp = banks[g].split(banks[g].radius(mode));
    a *= std::exp2(2.0 * s[g] * sp.first) * sp.w_first * sp.w_first +
         std::exp2(2.0 * s[g] * (sp.first + 1)) * sp.w_next * sp.w_next;
  }
  return a;
}

// Per-mode factor from the boundary condition and the derivative orders, without the x-dependence.
double mode_factor(cd omega, int bc_order, int k) {
  const double w2 = std::norm(omega);
  double deriv = 0.0, p = 1.0;
  for (int i = 0; i <= k; ++i) {
    deriv += p;
    p *= w2;
  }
  return bc_order == 1 ? deriv / w2 : deriv;
}

double combine_time(const std::vector<double>& energy, const TimeNormSpec& t) {
  double acc = 0.0;
  for (std::size_t l = 0; l < energy.size(); ++l) {
    if (energy[l] == 0.0) continue;
    const double v = std::exp2(t.t * static_cast<double>(l)) * std::sqrt(energy[l]);
    acc = std::isinf(t.q) ? std::max(acc, v) : acc + std::pow(v, t.q);
  }
  return std::isinf(t.q) ? acc : std::pow(acc, 1.0 / t.q);
}

std::vector<WeightedNorm> parseval_norms(const HalfSpaceField& u, const WeightedNormSpec& spec,
                                         std::span<const double> r_values, const CutoffProfile& profile) {
  const HalfSpaceGrid& grid = u.grid();
  const Lattice& lat = grid.boundary;
  const std::size_t tdim = lat.dim() - (grid.has_time ? 1 : 0);
  const auto banks = tangential_banks(grid, spec.inner, profile);
  const auto s = spec.inner.smoothness(tdim);
  std::optional<FilterBank> time_bank;
  if (grid.has_time) time_bank.emplace(lat, std::vector<std::size_t>{0}, profile);
  const std::size_t blocks = time_bank ? static_cast<std::size_t>(time_bank->blocks()) : 1;
  const std::size_t nr = r_values.size();
  const std::size_t modes = u.modes();
  const std::size_t chunks = (modes + kModeChunk - 1) / kModeChunk;
  std::vector<double> partial(chunks * blocks * nr, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    double* acc = partial.data() + static_cast<std::size_t>(c) * blocks * nr;
    const std::size_t lo = static_cast<std::size_t>(c) * kModeChunk;
    const std::size_t hi = std::min(modes, lo + kModeChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const double e = std::norm(u.data(i));
      if (e == 0.0) continue;
      const cd om = u.omega(i);
      const double base = e * besov_weight(banks, s, i) * mode_factor(om, u.bc_order(), spec.k);
      if (base == 0.0) continue;
      const auto sums = normal_weight_sums(2.0 * om.real(), grid, r_values);
      auto add = [&](std::size_t l, double w) {
        for (std::size_t r = 0; r < nr; ++r) acc[l * nr + r] += w * base * sums[r];
      };
      if (time_bank) {
        const auto sp = time_bank->split(time_bank->radius(i));
        if (sp.w_first != 0.0) add(static_cast<std::size_t>(sp.first), sp.w_first * sp.w_first);
        if (sp.w_next != 0.0) add(static_cast<std::size_t>(sp.first + 1), sp.w_next * sp.w_next);
      } else {
        add(0, 1.0);
      }
    }
  }
  std::vector<double> total(blocks * nr, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t j = 0; j < blocks * nr; ++j) total[j] += partial[c * blocks * nr + j];
  const double scale = lat.cell_volume() / static_cast<double>(modes);
  std::vector<WeightedNorm> out(nr);
  for (std::size_t r = 0; r < nr; ++r) {
    std::vector<double> energy(blocks);
    for (std::size_t l = 0; l < blocks; ++l) energy[l] = total[l * nr + r] * scale;
    out[r].value = spec.time ? combine_time(energy, *spec.time) : std::sqrt(energy[0]);
  }
  return out;
}

std::vector<WeightedNorm> sliced_norms(const HalfSpaceField& u, const WeightedNormSpec& spec,
                                       std::span<const double> r_values, const CutoffProfile& profile) {
  const HalfSpaceGrid& grid = u.grid();
  const std::size_t nr = r_values.size();
  std::vector<double> acc(nr, 0.0);
  double peak = 0.0;
  for (double r : r_values) peak = std::max(peak, r);
  // slowest decay rate among the modes that carry data
  double rate = kInf;
  for (std::size_t i = 0; i < u.modes(); ++i)
    if (u.data(i) != cd{}) rate = std::min(rate, u.omega(i).real());
  const double h = grid.h_n();
  for (int i = 0; i <= spec.k; ++i) {
    for (std::size_t m = 0; m < grid.normal_points; ++m) {
      const double x = grid.x(m);
      const double norm = besov_norm(u.slice(x, i), grid.boundary, spec.inner, profile);
      const double nq = std::pow(norm, spec.q);
      bool negligible = spec.q * rate * x > peak;
      for (std::size_t r = 0; r < nr; ++r) {
        const double term = std::pow(x, r_values[r]) * nq * h;
        acc[r] += term;
        if (term > 1e-17 * acc[r]) negligible = false;
      }
      if (negligible || nq == 0.0) break;
    }
  }
  std::vector<WeightedNorm> out(nr);
  for (std::size_t r = 0; r < nr; ++r) out[r].value = std::pow(acc[r], 1.0 / spec.q);
  return out;
}

}  // namespace

void HalfSpaceGrid::validate() const {
  require(boundary.dim() >= 1, "half-space grid: empty boundary lattice");
  require(!has_time || boundary.dim() >= 2, "half-space grid: time axis needs at least one tangential axis");
  for (std::size_t a = 0; a < boundary.dim(); ++a)
    require(boundary.N[a] >= 1 && boundary.L[a] > 0.0, "half-space grid: bad boundary lattice");
  require(depth > 0.0 && std::isfinite(depth), "half-space grid: depth must be positive");
  require(normal_points >= 1, "half-space grid: need at least one normal node");
}

double TimeCutoff::operator()(double t) const {
  const double u = (t - center) / half_width;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

BoundaryProblem BoundaryProblem::poisson(std::complex<double> lambda, int j) {
  BoundaryProblem p;
  p.kind = BoundaryKind::poisson;
  p.lambda = lambda;
  p.bc_order = j;
  return p;
}

BoundaryProblem BoundaryProblem::heat(TimeCutoff cutoff, int j) {
  BoundaryProblem p;
  p.kind = BoundaryKind::heat;
  p.cutoff = cutoff;
  p.bc_order = j;
  return p;
}

void BoundaryProblem::validate() const {
  require(bc_order == 0 || bc_order == 1, "boundary problem: bc order must be 0 (Dirichlet) or 1 (Neumann)");
  if (kind == BoundaryKind::poisson) {
    require(std::isfinite(lambda.real()) && std::isfinite(lambda.imag()), "boundary problem: lambda must be finite");
    if (lambda.imag() == 0.0 && lambda.real() <= 0.0) {
      std::ostringstream os;
      os << "boundary problem: lambda = " << lambda.real() << " lies on the cut (-inf, 0]; need lambda not in (-inf, 0]";
      throw ValidationError(os.str());
    }
  } else {
    require(cutoff.half_width > 0.0, "boundary problem: cutoff half-width must be positive");
  }
}

std::complex<double> principal_sqrt(std::complex<double> z) { return std::sqrt(z); }

HalfSpaceField::HalfSpaceField(HalfSpaceGrid grid, int bc_order, std::vector<cd> data, std::vector<cd> omega,
                               std::vector<cd> symbol)
    : grid_(std::move(grid)), bc_order_(bc_order), data_(std::move(data)), omega_(std::move(omega)),
      symbol_(std::move(symbol)) {}

cd HalfSpaceField::multiplier(std::size_t mode, double x, int derivative) const {
  const cd om = omega_[mode];
  cd m = std::exp(-om * x);
  if (bc_order_ == 1) m = -m / om;
  for (int i = 0; i < derivative; ++i) m *= -om;
  return m;
}

std::vector<double> HalfSpaceField::slice(double x, int derivative) const {
  const std::size_t n = data_.size();
  std::vector<cd> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = data_[i] * multiplier(i, x, derivative) / static_cast<double>(n);
  fft::transform(buf.data(), grid_.boundary.N, fft::Direction::backward);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
  return out;
}

std::vector<double> HalfSpaceField::trace(int derivative) const { return slice(0.0, derivative); }

std::vector<double> HalfSpaceField::values() const {
  const std::size_t S = data_.size();
  if (grid_.normal_points > GridSpec::kDefaultMaxCells / std::max<std::size_t>(S, 1))
    throw CapacityError(grid_.normal_points * S, GridSpec::kDefaultMaxCells);
  std::vector<double> out(grid_.normal_points * S);
  for (std::size_t m = 0; m < grid_.normal_points; ++m) {
    const auto s = slice(grid_.x(m));
    std::copy(s.begin(), s.end(), out.begin() + static_cast<std::ptrdiff_t>(m * S));
  }
  return out;
}

double HalfSpaceField::pde_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < omega_.size(); ++i)
    worst = std::max(worst, std::abs(omega_[i] * omega_[i] - symbol_[i]) / std::abs(symbol_[i]));
  return worst;
}

bool HalfSpaceField::zero_data() const {
  return std::all_of(data_.begin(), data_.end(), [](cd c) { return c == cd{}; });
}

HalfSpaceField solve_poisson_boundary(std::span<const double> datum, const BoundaryProblem& prob,
                                      const HalfSpaceGrid& grid) {
  prob.validate();
  grid.validate();
  require(prob.kind == BoundaryKind::poisson, "solve_poisson_boundary: problem is not a Poisson problem");
  require(!grid.has_time, "solve_poisson_boundary: grid has a time axis");
  auto data = spectrum(datum, grid.boundary);
  const auto freq = mode_frequencies(grid);
  std::vector<cd> omega(data.size()), symbol(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    symbol[i] = prob.lambda + freq.xi2[i];
    omega[i] = principal_sqrt(symbol[i]);
  }
  return HalfSpaceField(grid, prob.bc_order, std::move(data), std::move(omega), std::move(symbol));
}

HalfSpaceField solve_poisson_boundary(const WhiteNoiseSample& noise, const BoundaryProblem& prob,
                                      const HalfSpaceGrid& grid) {
  require(Lattice::from_grid(noise.grid) == grid.boundary,
          "solve_poisson_boundary: noise grid does not match the tangential grid");
  return solve_poisson_boundary(noise.density(), prob, grid);
}

HalfSpaceField solve_heat_boundary(std::span<const double> datum, const BoundaryProblem& prob,
                                   const HalfSpaceGrid& grid) {
  prob.validate();
  grid.validate();
  require(prob.kind == BoundaryKind::heat, "solve_heat_boundary: problem is not a heat problem");
  require(grid.has_time, "solve_heat_boundary: grid has no time axis");
  require(datum.size() == grid.boundary.size(), "solve_heat_boundary: datum size does not match the grid");
  const double Tw = grid.boundary.L[0];
  require(prob.cutoff.center - prob.cutoff.half_width >= 0.0 && prob.cutoff.center + prob.cutoff.half_width <= Tw,
          "solve_heat_boundary: cutoff support must lie inside the time window");
  const std::size_t per_time = grid.boundary.size() / grid.boundary.N[0];
  std::vector<double> cut(datum.begin(), datum.end());
  for (std::size_t i = 0; i < cut.size(); ++i) {
    const double t = (static_cast<double>(i / per_time) + 0.5) * grid.boundary.h(0);
    cut[i] *= prob.cutoff(t);
  }
  auto data = spectrum(cut, grid.boundary);
  const auto freq = mode_frequencies(grid);
  std::vector<cd> omega(data.size()), symbol(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    symbol[i] = cd(1.0 + freq.xi2[i], freq.tau[i]);
    omega[i] = principal_sqrt(symbol[i]);
  }
  return HalfSpaceField(grid, prob.bc_order, std::move(data), std::move(omega), std::move(symbol));
}

HalfSpaceField solve_heat_boundary(const WhiteNoiseSample& noise, const BoundaryProblem& prob,
                                   const HalfSpaceGrid& grid) {
  require(Lattice::from_grid(noise.grid) == grid.boundary,
          "solve_heat_boundary: noise grid does not match the (time, tangential) grid");
  return solve_heat_boundary(noise.density(), prob, grid);
}

std::vector<double> normal_weight_sums(double a, const HalfSpaceGrid& grid, std::span<const double> r_values) {
  const std::size_t nr = r_values.size();
  std::vector<double> sums(nr, 0.0);
  double peak = 0.0;
  for (double r : r_values) peak = std::max(peak, r);
  const double h = grid.h_n();
  const double g = std::exp(-a * h);
  double e = std::exp(-a * 0.5 * h);
  for (std::size_t m = 0; m < grid.normal_points && e > 0.0; ++m) {
    const double x = grid.x(m);
    const double lx = std::log(x);
    bool negligible = a * x > peak;
    for (std::size_t r = 0; r < nr; ++r) {
      const double term = std::exp(r_values[r] * lx) * e * h;
      sums[r] += term;
      if (term > 1e-17 * sums[r]) negligible = false;
    }
    if (negligible) break;
    e *= g;
  }
  return sums;
}

std::vector<WeightedNorm> weighted_power_norms(const HalfSpaceField& u, const WeightedNormSpec& spec,
                                               std::span<const double> r_values, const CutoffProfile& profile) {
  validate_spec(u, spec);
  std::vector<WeightedNorm> out(r_values.size());
  if (u.zero_data()) return out;
  std::vector<double> finite_r;
  for (double r : r_values)
    if (r > -1.0) finite_r.push_back(r);
  const auto vals = parseval_eligible(spec) ? parseval_norms(u, spec, finite_r, profile)
                                            : sliced_norms(u, spec, finite_r, profile);
  std::size_t next = 0;
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    if (r_values[i] > -1.0) {
      out[i] = vals[next++];
    } else {
      out[i] = {kInf, false};
    }
  }
  return out;
}

WeightedNorm weighted_power_norm(const HalfSpaceField& u, const WeightedNormSpec& spec, const CutoffProfile& profile) {
  const double r[1] = {spec.r};
  return weighted_power_norms(u, spec, r, profile)[0];
}

std::vector<ProfileRow> weighted_norm_profile(const HalfSpaceField& u, std::span<const double> r_values,
                                              const WeightedNormSpec& spec, const CutoffProfile& profile) {
  const auto norms = weighted_power_norms(u, spec, r_values, profile);
  std::vector<ProfileRow> rows;
  for (std::size_t i = 0; i < r_values.size(); ++i) rows.push_back({r_values[i], norms[i].value, norms[i].finite});
  return rows;
}

FinitenessBoundary empirical_finiteness_boundary(const FieldFactory& make, const std::vector<std::uint32_t>& levels,
                                                 int replicates, std::span<const double> r_values,
                                                 const WeightedNormSpec& spec, double slope_threshold,
                                                 const CutoffProfile& profile) {
  require(levels.size() >= 3, "finiteness boundary: need at least three levels (two increments)");
  require(replicates >= 1, "finiteness boundary: replicates must be >= 1");
  require(!r_values.empty(), "finiteness boundary: empty r sweep");
  require(std::is_sorted(r_values.begin(), r_values.end()), "finiteness boundary: r sweep must be increasing");
  FinitenessBoundary fb;
  fb.r_values.assign(r_values.begin(), r_values.end());
  fb.levels = levels;
  fb.predicted = std::numeric_limits<double>::quiet_NaN();
  const std::size_t nr = r_values.size();
  fb.statistic.assign(nr, std::vector<double>(levels.size(), 0.0));
  for (std::size_t li = 0; li < levels.size(); ++li) {
    std::vector<double> acc(nr, 0.0);
    for (int rep = 0; rep < replicates; ++rep) {
      const auto u = make(levels[li], static_cast<std::uint32_t>(rep));
      const auto norms = weighted_power_norms(u, spec, r_values, profile);
      for (std::size_t r = 0; r < nr; ++r) acc[r] += std::pow(norms[r].value, spec.q);
    }
    for (std::size_t r = 0; r < nr; ++r)
      fb.statistic[r][li] = std::pow(acc[r] / replicates, 1.0 / spec.q);
  }
  std::vector<double> x;
  for (auto J : levels) x.push_back(static_cast<double>(J));
  for (std::size_t r = 0; r < nr; ++r) {
    const auto& st = fb.statistic[r];
    const bool ok = std::all_of(st.begin(), st.end(), [](double v) { return std::isfinite(v) && v > 0.0; });
    std::vector<double> y;
    for (double v : st) y.push_back(ok ? std::log2(v) : 0.0);
    fb.slopes.push_back(ok ? stats::fit_line(x, y).slope : kInf);

    double exponent = kInf;
    if (ok) {
      std::vector<double> xi, yi;
      bool flat = true;
      for (std::size_t li = 0; li + 1 < st.size(); ++li) {
        const double d = std::abs(std::pow(st[li + 1], spec.q) - std::pow(st[li], spec.q));
        flat = flat && d == 0.0;
        if (d == 0.0) continue;
        xi.push_back(x[li]);
        yi.push_back(std::log2(d));
      }
      if (flat) exponent = -kInf;
      else if (xi.size() >= 2) exponent = stats::fit_line(xi, yi).slope;
      // a single nonzero increment among zeros: converged
      else exponent = -kInf;
    }
    fb.increment_exponents.push_back(exponent);
    fb.stable.push_back(exponent < -slope_threshold);
  }
  fb.r_boundary = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = nr; r-- > 0;) {
    if (!fb.stable[r]) break;
    fb.r_boundary = r_values[r];
  }
  return fb;
}

double poisson_predicted_boundary(double q, double t, int k, int j, double s) {
  return q * pos(t + k - j - s) - 1.0;
}

double heat_predicted_boundary(double q, double l, double s2, int k, int j, double t0, double s1) {
  return 2.0 * q * (l - s2) + q * (k - j) + q * pos(t0 - s1) - 1.0;
}

void check_poisson_finiteness(double r, double q, double t, int k, int j, double s) {
  const double lhs = r - q * pos(t + k - j - s);
  if (!(lhs > -1.0)) {
    std::ostringstream os;
    os << "finiteness condition r - q[t + k - j - s]_+ > -1 fails: r=" << r << ", q=" << q << ", t=" << t << ", k=" << k
       << ", j=" << j << ", s=" << s << " gives " << lhs;
    throw ValidationError(os.str());
  }
}

LambdaScaling lambda_scaling_experiment(std::span<const double> datum, const HalfSpaceGrid& grid, int j,
                                        const WeightedNormSpec& spec, double datum_smoothness,
                                        const std::vector<std::complex<double>>& lambdas,
                                        const CutoffProfile& profile) {
  require(lambdas.size() >= 2, "lambda scaling: need at least two lambda values to fit a slope");
  require(spec.inner.kind == NormKind::isotropic, "lambda scaling: inner norm must be isotropic");
  require(!spec.time, "lambda scaling: Poisson fields have no time axis");
  check_poisson_finiteness(spec.r, spec.q, spec.inner.s, spec.k, j, datum_smoothness);
  LambdaScaling out;
  out.lambdas = lambdas;
  out.predicted = (-1.0 - spec.r + spec.q * (spec.k - j) + spec.q * pos(spec.inner.s - datum_smoothness)) / (2.0 * spec.q);
  std::vector<double> x, y, yo;
  const bool oracle = parseval_eligible(spec);
  for (const auto& lam : lambdas) {
    const auto u = solve_poisson_boundary(datum, BoundaryProblem::poisson(lam, j), grid);
    const auto w = weighted_power_norm(u, spec, profile);
    out.norms.push_back(w.value);
    x.push_back(std::log(std::abs(lam)));
    y.push_back(std::log(w.value));
    if (oracle) {
      // Per-mode closed form: int_0^inf x^r e^{-2 Re(omega) x} dx = Gamma(r+1) / (2 Re omega)^{r+1}.
      const auto banks = tangential_banks(grid, spec.inner, profile);
      const auto s = spec.inner.smoothness(grid.boundary.dim());
      double acc = 0.0;
      for (std::size_t i = 0; i < u.modes(); ++i) {
        const double e = std::norm(u.data(i));
        if (e == 0.0) continue;
        const cd om = u.omega(i);
        acc += e * besov_weight(banks, s, i) * mode_factor(om, j, spec.k) * std::tgamma(spec.r + 1.0) /
               std::pow(2.0 * om.real(), spec.r + 1.0);
      }
      const double v = std::sqrt(acc * grid.boundary.cell_volume() / static_cast<double>(u.modes()));
      out.oracle.push_back(v);
      yo.push_back(std::log(v));
    }
  }
  const auto fit = stats::fit_line(x, y);
  out.slope = fit.slope;
  out.slope_ci = stats::slope_t_interval(fit, x.size());
  out.oracle_slope = oracle ? stats::fit_line(x, yo).slope : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace levylab
