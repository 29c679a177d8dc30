#include "levylab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "levylab/error.hpp"
#include "levylab/quadrature.hpp"

namespace levylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - cos(y) without cancellation for small y.
inline double one_minus_cos(double y) {
  const double s = std::sin(0.5 * y);
  return 2.0 * s * s;
}

inline double sin_minus_identity(double y) {
  if (std::fabs(y) < 1e-3) {
    const double y3 = y * y * y;
    return -y3 / 6.0 + y3 * y * y / 120.0;
  }
  return std::sin(y) - y;
}


void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

// Feature points of d on the side sign s, mapped to |x|.
std::vector<double> side_breaks(const DensityMeasure& d, double s) {
  std::vector<double> out;
  for (double b : d.breaks) {
    if (s * b > 0.0) out.push_back(s * b);
  }
  return out;
}

double stable_constant(double alpha) {
  return std::tgamma(1.0 + alpha) * std::sin(0.5 * std::numbers::pi * alpha) / std::numbers::pi;
}

// Shell masses of f over [1, inf) on one side, kept per shell so that tail
// masses int_{2^m}^inf f are available to the oscillatory tail bound.
struct TailShells {
  std::vector<double> shell_mass;  // shell m covers [2^m, 2^{m+1}]
  double remainder = 0.0;          // estimate beyond the last shell

  double tail_from(double radius) const {
    const int m = static_cast<int>(std::floor(std::log2(radius) + 1e-9));
    if (m < 0) return kInf;
    double t = remainder;
    for (std::size_t i = static_cast<std::size_t>(m); i < shell_mass.size(); ++i) t += shell_mass[i];
    return t;
  }
};

template <class F>
TailShells tail_shells(const F& f, double tol, const std::vector<double>& breaks) {
  TailShells out;
  double prev = -1.0;
  double lo = 1.0;
  for (int m = 0; m < 1000; ++m) {
    const double hi = 2.0 * lo;
    const auto r = quad::integrate_with_breaks(f, lo, hi, tol * 1e-3, breaks);
    out.shell_mass.push_back(std::max(0.0, r.value));
    const double mag = std::fabs(r.value);
    if (m >= 2) {
      if (mag == 0.0) return out;
      if (prev > 0.0) {
        const double ratio = mag / prev;
        if (ratio < 0.999) {
          const double rem = mag * ratio / (1.0 - ratio);
          if (rem < 1e-3 * tol) {
            out.remainder = rem;
            return out;
          }
        }
      }
    }
    prev = mag;
    lo = hi;
    if (!std::isfinite(lo * 2.0)) break;
  }
  throw NumericFailure("Levy measure tail mass does not converge", prev);
}

// Rough size of |Psi(xi)|: int min(1, (x xi)^2) nu(dx). Non-oscillatory and cheap.
double exponent_scale(const DensityMeasure& d, double a) {
  quad::ShellOptions opt;
  opt.abs_tol = 1e-12;
  double m = 0.0;
  for (const double s : {1.0, -1.0}) {
    auto f = [&](double x) { return d(s * x); };
    opt.breaks = side_breaks(d, s);
    m += a * a * quad::integrate_toward_zero([&](double x) { return x * x * f(x); }, 1.0 / a, opt).value;
    m += quad::integrate_to_infinity(f, 1.0 / a, opt, [](double) { return -1.0; }).value;
  }
  return m;
}

// Absolute tolerance below |Psi| = 1, relative above.
std::complex<double> density_exponent(const DensityMeasure& d, double xi, double abs_tol) {
  if (xi == 0.0) return {0.0, 0.0};
  const double a = std::fabs(xi);
  const double tol = abs_tol * std::max(1.0, exponent_scale(d, a));
  quad::ShellOptions opt;
  opt.abs_tol = tol / 8.0;
  opt.chunk = 8.0 * std::numbers::pi / a;
  double re = 0.0;
  double im = 0.0;
  for (const double s : {1.0, -1.0}) {
    auto f = [&](double x) { return d(s * x); };
    opt.breaks = side_breaks(d, s);
    const auto inner_re = quad::integrate_toward_zero(
        [&](double x) { return -one_minus_cos(x * xi) * f(x); }, 1.0, opt, std::min(1.0, 1.0 / a));
    const auto inner_im = quad::integrate_toward_zero(
        [&](double x) { return sin_minus_identity(x * xi) * f(x); }, 1.0, opt, std::min(1.0, 1.0 / a));
    const TailShells tails = tail_shells(f, tol, opt.breaks);
    const double tail_mass = tails.tail_from(1.0);
    auto bound = [&](double radius) {
      double b = tails.tail_from(radius);
      if (radius >= d.monotone_beyond) b = std::min(b, 2.0 * f(radius) / a);
      return b;
    };
    const auto outer_cos = quad::integrate_to_infinity(
        [&](double x) { return std::cos(x * xi) * f(x); }, 1.0, opt, bound);
    const auto outer_sin = quad::integrate_to_infinity(
        [&](double x) { return std::sin(x * xi) * f(x); }, 1.0, opt, bound);
    const double err = inner_re.error + inner_im.error + outer_cos.error + outer_sin.error;
    if (err > tol) throw NumericFailure("Levy exponent quadrature", err);
    re += inner_re.value + outer_cos.value - tail_mass;
    im += s * (inner_im.value + outer_sin.value);
  }
  return {re, im};
}

}  // namespace

double AlphaStableMeasure::density_constant() const {
  return std::pow(scale, alpha) * stable_constant(alpha);
}

DensityMeasure power_law_density(double c, double alpha, double tail_index) {
  require(c > 0.0, "power-law density: c must be > 0");
  require(alpha > 0.0 && alpha < 2.0, "power-law density: alpha must lie in (0,2)");
  require(tail_index > 0.0, "power-law density: tail_index must be > 0");
  DensityMeasure d;
  d.density = [c, alpha, tail_index](double x) {
    const double ax = std::fabs(x);
    if (ax == 0.0) return 0.0;
    return ax <= 1.0 ? c * std::pow(ax, -1.0 - alpha) : c * std::pow(ax, -1.0 - tail_index);
  };
  d.integrability_bound = 2.0 * c * (1.0 / (2.0 - alpha) + 1.0 / tail_index);
  d.monotone_beyond = 0.0;
  d.family = "power";
  d.params = {c, alpha, tail_index};
  return d;
}

DensityMeasure merton_density(double rate, double mean, double sd) {
  require(rate > 0.0, "merton density: rate must be > 0");
  require(sd > 0.0, "merton density: sd must be > 0");
  DensityMeasure d;
  d.density = [rate, mean, sd](double x) {
    if (x == 0.0) return 0.0;
    const double z = (x - mean) / sd;
    return rate * std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
  };
  d.integrability_bound = rate;
  d.total_mass = rate;
  d.monotone_beyond = std::fabs(mean) + 10.0 * sd;
  for (double k : {-9.0, -3.0, -1.0, 0.0, 1.0, 3.0, 9.0}) d.breaks.push_back(mean + k * sd);
  d.family = "merton";
  d.params = {rate, mean, sd};
  return d;
}

LevyMeasure LevyMeasure::atoms(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    require(a.location != 0.0 && std::isfinite(a.location), "atom location must be finite and nonzero");
    require(a.mass > 0.0 && std::isfinite(a.mass), "atom mass must be finite and positive");
  }
  if (atoms.empty()) return zero();
  return LevyMeasure(Storage(std::move(atoms)));
}

LevyMeasure LevyMeasure::alpha_stable(double alpha, double scale) {
  require(alpha > 0.0 && alpha < 2.0, "alpha-stable: alpha must lie strictly in (0,2)");
  require(scale > 0.0 && std::isfinite(scale), "alpha-stable: scale must be > 0");
  return LevyMeasure(Storage(AlphaStableMeasure{alpha, scale}));
}

LevyMeasure LevyMeasure::density(DensityMeasure measure) {
  require(static_cast<bool>(measure.density), "density measure needs a density");
  require(measure.integrability_bound > 0.0 && std::isfinite(measure.integrability_bound),
          "density measure needs a finite integrability bound");
  require(measure.weight > 0.0, "density weight must be > 0");
  if (measure.total_mass) require(*measure.total_mass > 0.0, "declared total mass must be > 0");
  return LevyMeasure(Storage(std::move(measure)));
}

bool LevyMeasure::is_zero() const { return std::holds_alternative<std::monostate>(storage_); }

std::optional<double> LevyMeasure::total_mass() const {
  if (is_zero()) return 0.0;
  if (const auto* a = as_atoms()) {
    double m = 0.0;
    for (const Atom& atom : *a) m += atom.mass;
    return m;
  }
  if (const auto* d = as_density(); d && d->total_mass) return d->weight * *d->total_mass;
  return std::nullopt;
}

bool LevyMeasure::has_finite_mass() const { return total_mass().has_value(); }

bool LevyMeasure::is_symmetric() const {
  if (is_zero() || as_alpha_stable()) return true;
  if (const auto* a = as_atoms()) {
    std::vector<std::pair<double, double>> pos, neg;
    for (const Atom& atom : *a) {
      (atom.location > 0 ? pos : neg).emplace_back(std::fabs(atom.location), atom.mass);
    }
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    return pos == neg;
  }
  const auto* d = as_density();
  if (d->family == "power") return true;
  if (d->family == "merton") return d->params[1] == 0.0;
  return false;
}

LevyMeasure LevyMeasure::scaled(double factor) const {
  require(factor > 0.0 && std::isfinite(factor), "scaling volume must be > 0");
  if (is_zero()) return {};
  if (const auto* a = as_atoms()) {
    std::vector<Atom> out = *a;
    for (Atom& atom : out) atom.mass *= factor;
    return LevyMeasure(Storage(std::move(out)));
  }
  if (const auto* s = as_alpha_stable()) {
    return LevyMeasure(Storage(AlphaStableMeasure{s->alpha, s->scale * std::pow(factor, 1.0 / s->alpha)}));
  }
  DensityMeasure d = *as_density();
  d.weight *= factor;
  return LevyMeasure(Storage(std::move(d)));
}

LevyTriplet LevyTriplet::scaled(double volume) const {
  require(volume > 0.0 && std::isfinite(volume), "scaling volume must be > 0");
  return {gamma * volume, sigma2 * volume, nu.scaled(volume)};
}

std::complex<double> levy_exponent(const LevyTriplet& tr, double xi, const QuadratureConfig& cfg) {
  require(std::isfinite(xi), "levy_exponent: xi must be finite");
  std::complex<double> psi{-0.5 * tr.sigma2 * xi * xi, tr.gamma * xi};
  if (const auto* atoms = tr.nu.as_atoms()) {
    for (const Atom& a : *atoms) {
      const double y = a.location * xi;
      const double comp = std::fabs(a.location) <= 1.0 ? y : 0.0;
      psi += a.mass * std::complex<double>(-one_minus_cos(y), std::sin(y) - comp);
    }
  } else if (const auto* st = tr.nu.as_alpha_stable()) {
    psi -= std::pow(st->scale * std::fabs(xi), st->alpha);
  } else if (const auto* d = tr.nu.as_density()) {
    psi += density_exponent(*d, xi, cfg.abs_tol);
  }
  return psi;
}

double rajput_rosinski_exponent(const LevyTriplet& tr, double p, double xi, const QuadratureConfig& cfg) {
  require(p >= 0.0, "rajput_rosinski_exponent: p must be >= 0");
  require(std::isfinite(xi), "rajput_rosinski_exponent: xi must be finite");
  const double a = std::fabs(xi);
  double drift = tr.gamma * xi;
  double jumps = 0.0;
  if (const auto* atoms = tr.nu.as_atoms()) {
    for (const Atom& at : *atoms) {
      const double y = std::fabs(at.location * xi);
      const double in_unit = std::fabs(at.location) <= 1.0 ? 1.0 : 0.0;
      const double in_scaled = y <= 1.0 ? 1.0 : 0.0;
      drift += at.mass * at.location * xi * (in_scaled - in_unit);
      jumps += at.mass * (y > 1.0 ? std::pow(y, p) : y * y);
    }
  } else if (const auto* st = tr.nu.as_alpha_stable()) {
    if (a > 0.0) {
      if (p >= st->alpha) return kInf;
      const double c = st->density_constant();
      jumps = 2.0 * c * std::pow(a, st->alpha) * (1.0 / (st->alpha - p) + 1.0 / (2.0 - st->alpha));
    }
  } else if (const auto* d = tr.nu.as_density()) {
    if (a > 0.0) {
      quad::ShellOptions opt;
      opt.abs_tol = cfg.abs_tol / 8.0;
      const double cut = 1.0 / a;
      for (const double s : {1.0, -1.0}) {
        auto f = [&](double x) { return (*d)(s * x); };
        opt.breaks = side_breaks(*d, s);
        if (a >= 1.0) {
          const auto r = quad::integrate_with_breaks([&](double x) { return x * f(x); }, cut, 1.0, opt.abs_tol, opt.breaks);
          drift -= s * xi * r.value;
        } else {
          const auto r = quad::integrate_with_breaks([&](double x) { return x * f(x); }, 1.0, cut, opt.abs_tol, opt.breaks);
          drift += s * xi * r.value;
        }
        const auto inner = quad::integrate_toward_zero([&](double x) { return x * x * f(x); }, cut, opt);
        bool diverged = false;
        const auto outer = quad::integrate_to_infinity(
            [&](double x) { return std::pow(x, p) * f(x); }, cut, opt, [](double) { return -1.0; },
            &diverged);
        if (diverged) return kInf;
        jumps += a * a * inner.value + std::pow(a, p) * outer.value;
      }
    }
  }
  return std::fabs(drift) + tr.sigma2 * xi * xi + jumps;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  require(lo > 0.0 && hi > lo, "log_grid: need 0 < lo < hi");
  require(per_decade >= 1, "log_grid: per_decade must be >= 1");
  const double decades = std::log10(hi / lo);
  const auto count = static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit out;
  out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + out.slope * (x[i] - mx));
    ss += r * r;
  }
  out.rms = std::sqrt(ss / n);
  return out;
}

}  // namespace

IndexEstimate blumenthal_getoor(const LevyTriplet& tr, std::span<const double> xi_grid,
                                const IndexOptions& opt) {
  require(xi_grid.size() >= 8, "blumenthal_getoor: grid too short");
  require(std::is_sorted(xi_grid.begin(), xi_grid.end()) && xi_grid.front() > 0.0,
          "blumenthal_getoor: grid must be positive and increasing");
  require(std::log10(xi_grid.back() / xi_grid.front()) >= 6.0 - 1e-9,
          "blumenthal_getoor: grid must span at least 6 decades");

  const double top = xi_grid.back();
  const double floor_value = 1e-300;
  constexpr int kBins = 7;
  struct Bin {
    double max_v = -1.0, max_x = 0.0, min_v = kInf, min_x = 0.0;
  };
  std::vector<Bin> bins(kBins);
  for (const double xi : xi_grid) {
    if (xi < top / 100.0) continue;
    const int b = std::min(kBins - 1, static_cast<int>(std::floor(std::log2(top / xi))));
    const double v = std::max(floor_value, std::abs(levy_exponent(tr, xi, opt.quadrature)));
    Bin& bin = bins[static_cast<std::size_t>(b)];
    if (v > bin.max_v) {
      bin.max_v = v;
      bin.max_x = xi;
    }
    if (v < bin.min_v) {
      bin.min_v = v;
      bin.min_x = xi;
    }
  }
  std::vector<double> ux, uy, lx, ly;
  for (auto it = bins.rbegin(); it != bins.rend(); ++it) {
    if (it->max_v < 0.0) continue;
    ux.push_back(std::log(it->max_x));
    uy.push_back(std::log(it->max_v));
    lx.push_back(std::log(it->min_x));
    ly.push_back(std::log(it->min_v));
  }
  IndexEstimate est;
  est.diagnostics.low_confidence = ux.size() < 3;
  if (ux.size() < 2) {
    est.diagnostics.note = "too few octave bins in the top two decades";
    est.p_max = moment_index(tr).value;
    return est;
  }
  const LineFit upper = fit_line(ux, uy);
  const LineFit lower = fit_line(lx, ly);
  est.diagnostics.residual_upper = upper.rms;
  est.diagnostics.residual_lower = lower.rms;
  bool monotone = true;
  for (std::size_t i = 1; i < uy.size(); ++i) {
    if (uy[i] < uy[i - 1] - opt.residual_tolerance) monotone = false;
  }
  if (upper.rms > opt.residual_tolerance || lower.rms > opt.residual_tolerance || !monotone) {
    est.diagnostics.low_confidence = true;
    est.diagnostics.note = !monotone ? "non-monotone upper envelope" : "envelope fit residual above tolerance";
  }
  est.beta_upper = std::clamp(upper.slope, 0.0, 2.0);
  est.beta_lower = std::min(std::clamp(lower.slope, 0.0, 2.0), est.beta_upper);
  est.p_max = moment_index(tr).value;
  return est;
}

MomentIndex moment_index(const LevyTriplet& tr) {
  MomentIndex out;
  if (tr.nu.is_zero() || tr.nu.as_atoms()) return out;
  if (const auto* st = tr.nu.as_alpha_stable()) {
    out.value = st->alpha;
    return out;
  }
  const DensityMeasure& d = *tr.nu.as_density();
  // Tail masses T(2^m) on both sides; p_max is the power-law decay rate of T.
  std::vector<double> shells;
  std::vector<double> breaks = side_breaks(d, 1.0);
  for (double b : side_breaks(d, -1.0)) breaks.push_back(b);
  for (int m = 0; m < 200; ++m) {
    const double lo = std::ldexp(1.0, m);
    auto f = [&](double x) { return d(x) + d(-x); };
    const double mass = quad::integrate_with_breaks(f, lo, 2.0 * lo, 1e-300, breaks).value;
    shells.push_back(std::max(0.0, mass));
    if (mass < 1e-280) break;
  }
  std::vector<double> tails(shells.size());
  double acc = 0.0;
  for (std::size_t i = shells.size(); i-- > 0;) {
    acc += shells[i];
    tails[i] = acc;
  }
  std::vector<double> rates;
  for (std::size_t i = 0; i + 1 < tails.size(); ++i) {
    if (tails[i + 1] <= 1e-250 || tails[i] <= 0.0) break;
    rates.push_back(std::log2(tails[i] / tails[i + 1]));
  }
  if (rates.size() < 4) return out;  // compact or super-polynomial tail
  const std::size_t window = std::min<std::size_t>(8, rates.size());
  std::vector<double> last(rates.end() - static_cast<std::ptrdiff_t>(window), rates.end());
  const double mean = std::accumulate(last.begin(), last.end(), 0.0) / static_cast<double>(window);
  double var = 0.0;
  for (double r : last) var += (r - mean) * (r - mean);
  out.residual = std::sqrt(var / static_cast<double>(window));
  // Rates that keep increasing signal faster-than-power decay.
  const bool accelerating = last.back() > last.front() + 1.0 || mean > 60.0;
  if (accelerating) {
    out.value = kInf;
    return out;
  }
  out.value = mean;
  out.low_confidence = out.residual > 0.1 * std::max(mean, 1e-3);
  return out;
}

double standard_symmetric_stable(double alpha, CounterRng& rng) {
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  if (alpha == 1.0) return std::tan(v);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v * (1.0 - alpha)) / w, (1.0 - alpha) / alpha);
}

double compound_poisson_sum(std::span<const Atom> atoms, double volume, CounterRng& rng) {
  double sum = 0.0;
  for (const Atom& a : atoms) sum += a.location * static_cast<double>(rng.poisson(a.mass * volume));
  return sum;
}

IncrementSampler::IncrementSampler(const LevyTriplet& tr, double volume, const SamplerConfig& cfg)
    : volume_(volume) {
  require(volume > 0.0 && std::isfinite(volume), "sample_increment: volume must be > 0");
  require(tr.sigma2 >= 0.0, "sigma2 must be >= 0");
  drift_ = tr.gamma * volume;
  double variance = tr.sigma2 * volume;
  if (const auto* atoms = tr.nu.as_atoms()) {
    atoms_ = *atoms;
    for (const Atom& a : atoms_) {
      if (std::fabs(a.location) <= 1.0) drift_ -= volume * a.mass * a.location;
    }
  } else if (const auto* st = tr.nu.as_alpha_stable()) {
    stable_ = AlphaStableMeasure{st->alpha, st->scale * std::pow(volume, 1.0 / st->alpha)};
  } else if (const auto* d = tr.nu.as_density()) {
    const double eps = cfg.small_jump_epsilon;
    require(eps > 0.0 && eps < 1.0, "small_jump_epsilon must lie in (0,1)");
    quad::ShellOptions opt;
    opt.abs_tol = 1e-12;
    JumpTable table;
    double total = 0.0;
    constexpr int kPerOctave = 32;
    const double step = std::exp2(1.0 / kPerOctave);
    for (const double s : {1.0, -1.0}) {
      auto f = [&](double x) { return (*d)(s * x); };
      opt.breaks = side_breaks(*d, s);
      variance += volume * quad::integrate_toward_zero([&](double x) { return x * x * f(x); }, eps, opt).value;
      // Compensator over eps < |x| <= 1.
      drift_ -= volume * s * quad::integrate_with_breaks([&](double x) { return x * f(x); }, eps, 1.0, 1e-12, opt.breaks).value;
      double lo = eps;
      double side_mass = 0.0;
      int quiet = 0;
      for (int i = 0; i < 64 * kPerOctave && quiet < kPerOctave; ++i) {
        const double hi = lo * step;
        const double mass = std::max(0.0, quad::integrate_with_breaks(f, lo, hi, 1e-14, opt.breaks).value);
        side_mass += mass;
        if (mass > 0.0) {
          total += mass;
          table.lower.push_back(lo);
          table.upper.push_back(hi);
          table.sign.push_back(s);
          table.cumulative.push_back(total);
        }
        quiet = (lo > 1.0 && mass <= 1e-13 * side_mass) ? quiet + 1 : 0;
        lo = hi;
      }
    }
    if (total > 0.0) {
      jump_rate_ = volume * total;
      table_ = std::move(table);
    }
  }
  gaussian_sd_ = std::sqrt(variance);
}

double IncrementSampler::operator()(CounterRng& rng) const {
  double x = drift_;
  if (gaussian_sd_ > 0.0) x += gaussian_sd_ * rng.normal();
  if (!atoms_.empty()) x += compound_poisson_sum(atoms_, volume_, rng);
  if (stable_) x += stable_->scale * standard_symmetric_stable(stable_->alpha, rng);
  if (table_) {
    const std::uint64_t count = rng.poisson(jump_rate_);
    const double total = table_->cumulative.back();
    for (std::uint64_t j = 0; j < count; ++j) {
      const double u = rng.uniform() * total;
      const auto it = std::upper_bound(table_->cumulative.begin(), table_->cumulative.end(), u);
      const auto k = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - table_->cumulative.begin(),
                                   static_cast<std::ptrdiff_t>(table_->cumulative.size()) - 1));
      const double lo = table_->lower[k];
      const double hi = table_->upper[k];
      x += table_->sign[k] * lo * std::pow(hi / lo, rng.uniform());
    }
  }
  return x;
}

double sample_increment(const LevyTriplet& tr, double volume, CounterRng& rng, const SamplerConfig& cfg) {
  return IncrementSampler(tr, volume, cfg)(rng);
}

// ---------------------------------------------------------------------------
// Serialisation: {gamma, sigma2, nu: {kind, params}}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    require(allowed.count(key) == 1, where + ": unknown key '" + key + "'");
  }
}

double number_at(const nlohmann::json& j, const std::string& key, const std::string& where) {
  require(j.contains(key), where + ": missing key '" + key + "'");
  require(j.at(key).is_number(), where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const LevyTriplet& tr) {
  nlohmann::json nu;
  if (tr.nu.is_zero()) {
    nu = {{"kind", "zero"}};
  } else if (const auto* atoms = tr.nu.as_atoms()) {
    nlohmann::json list = nlohmann::json::array();
    for (const Atom& a : *atoms) list.push_back({a.location, a.mass});
    nu = {{"kind", "atoms"}, {"params", {{"atoms", list}}}};
  } else if (const auto* st = tr.nu.as_alpha_stable()) {
    nu = {{"kind", "alpha_stable"}, {"params", {{"alpha", st->alpha}, {"scale", st->scale}}}};
  } else {
    const auto* d = tr.nu.as_density();
    nlohmann::json params;
    params["family"] = d->family;
    if (d->family == "power") {
      params["c"] = d->params[0];
      params["alpha"] = d->params[1];
      params["tail_index"] = d->params[2];
    } else if (d->family == "merton") {
      params["rate"] = d->params[0];
      params["mean"] = d->params[1];
      params["sd"] = d->params[2];
    } else {
      throw ValidationError("density family '" + d->family + "' cannot be serialised");
    }
    if (d->weight != 1.0) params["weight"] = d->weight;
    nu = {{"kind", "density"}, {"params", params}};
  }
  j = {{"gamma", tr.gamma}, {"sigma2", tr.sigma2}, {"nu", nu}};
}

void from_json(const nlohmann::json& j, LevyTriplet& tr) {
  reject_unknown(j, {"gamma", "sigma2", "nu"}, "triplet");
  tr.gamma = j.contains("gamma") ? number_at(j, "gamma", "triplet") : 0.0;
  tr.sigma2 = j.contains("sigma2") ? number_at(j, "sigma2", "triplet") : 0.0;
  require(tr.sigma2 >= 0.0, "triplet.sigma2: must be >= 0");
  tr.nu = LevyMeasure::zero();
  if (!j.contains("nu")) return;
  const auto& nu = j.at("nu");
  reject_unknown(nu, {"kind", "params"}, "triplet.nu");
  require(nu.contains("kind") && nu.at("kind").is_string(), "triplet.nu.kind: expected a string");
  const std::string kind = nu.at("kind").get<std::string>();
  const nlohmann::json params = nu.value("params", nlohmann::json::object());
  if (kind == "zero") {
    return;
  } else if (kind == "atoms") {
    reject_unknown(params, {"atoms"}, "triplet.nu.params");
    require(params.contains("atoms") && params.at("atoms").is_array(), "triplet.nu.params.atoms: expected an array");
    std::vector<Atom> atoms;
    for (const auto& a : params.at("atoms")) {
      require(a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number(),
              "triplet.nu.params.atoms: entries must be [location, mass]");
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    tr.nu = LevyMeasure::atoms(std::move(atoms));
  } else if (kind == "alpha_stable") {
    reject_unknown(params, {"alpha", "scale"}, "triplet.nu.params");
    tr.nu = LevyMeasure::alpha_stable(number_at(params, "alpha", "triplet.nu.params"),
                                      params.contains("scale") ? number_at(params, "scale", "triplet.nu.params") : 1.0);
  } else if (kind == "density") {
    require(params.contains("family") && params.at("family").is_string(),
            "triplet.nu.params.family: expected a string");
    const std::string family = params.at("family").get<std::string>();
    const std::string where = "triplet.nu.params";
    DensityMeasure d;
    if (family == "power") {
      reject_unknown(params, {"family", "c", "alpha", "tail_index", "weight"}, where);
      d = power_law_density(number_at(params, "c", where), number_at(params, "alpha", where),
                            number_at(params, "tail_index", where));
    } else if (family == "merton") {
      reject_unknown(params, {"family", "rate", "mean", "sd", "weight"}, where);
      d = merton_density(number_at(params, "rate", where), number_at(params, "mean", where),
                         number_at(params, "sd", where));
    } else {
      throw ValidationError(where + ".family: unknown density family '" + family + "'");
    }
    if (params.contains("weight")) d.weight = number_at(params, "weight", where);
    tr.nu = LevyMeasure::density(std::move(d));
  } else {
    throw ValidationError("triplet.nu.kind: unknown kind '" + kind + "'");
  }
}

bool operator==(const LevyTriplet& a, const LevyTriplet& b) {
  if (a.gamma != b.gamma || a.sigma2 != b.sigma2) return false;
  const auto& x = a.nu.storage();
  const auto& y = b.nu.storage();
  if (x.index() != y.index()) return false;
  if (const auto* p = a.nu.as_atoms()) {
    const auto* q = b.nu.as_atoms();
    if (p->size() != q->size()) return false;
    for (std::size_t i = 0; i < p->size(); ++i) {
      if ((*p)[i].location != (*q)[i].location || (*p)[i].mass != (*q)[i].mass) return false;
    }
    return true;
  }
  if (const auto* p = a.nu.as_alpha_stable()) {
    const auto* q = b.nu.as_alpha_stable();
    return p->alpha == q->alpha && p->scale == q->scale;
  }
  if (const auto* p = a.nu.as_density()) {
    const auto* q = b.nu.as_density();
    return p->family == q->family && p->params == q->params && p->weight == q->weight;
  }
  return true;
}

}  // namespace levylab
