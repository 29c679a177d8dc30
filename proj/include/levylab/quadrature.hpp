#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature plus dyadic shell marching for
// integrals over Levy measures, whose densities may be singular at 0 and
// whose tails may decay slowly.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "levylab/error.hpp"

namespace levylab::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Result gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {kronrod * half, std::fabs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive bisection on [a,b] until the summed error estimate drops
/// below abs_tol. Returns the best estimate even when the budget runs out;
/// callers compare `error` against their tolerance.
template <class F>
Result integrate(const F& f, double a, double b, double abs_tol, int max_intervals = 4000) {
  if (!(b > a)) return {};
  struct Piece {
    double a, b;
    Result r;
    bool operator<(const Piece& o) const { return r.error < o.r.error; }
  };
  std::priority_queue<Piece> heap;
  Piece first{a, b, detail::gk15(f, a, b)};
  double total = first.r.value;
  double error = first.r.error;
  heap.push(first);
  int count = 1;
  while (error > abs_tol && count < max_intervals) {
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    Piece left{worst.a, mid, detail::gk15(f, worst.a, mid)};
    Piece right{mid, worst.b, detail::gk15(f, mid, worst.b)};
    total += left.r.value + right.r.value - worst.r.value;
    error += left.r.error + right.r.error - worst.r.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Recompute the error sum to shed accumulated cancellation.
  error = 0.0;
  while (!heap.empty()) {
    error += heap.top().r.error;
    heap.pop();
  }
  return {total, error};
}

/// Splits [a,b] at the given interior points first, so features narrower than
/// the Kronrod node spacing are not stepped over.
template <class F>
Result integrate_with_breaks(const F& f, double a, double b, double abs_tol, const std::vector<double>& breaks,
                             int max_intervals = 4000) {
  if (!(b > a)) return {};
  std::vector<double> cuts{a};
  for (double x : breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  Result out;
  const double tol = abs_tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Result r = integrate(f, cuts[i], cuts[i + 1], tol, max_intervals);
    out.value += r.value;
    out.error += r.error;
  }
  return out;
}

/// Integrates over [a,b] in consecutive chunks no longer than `chunk`, which
/// keeps oscillatory integrands to a few periods per adaptive call.
template <class F>
Result integrate_chunked(const F& f, double a, double b, double abs_tol, double chunk,
                         const std::vector<double>& breaks = {}) {
  if (!(b > a)) return {};
  const double span = b - a;
  const std::size_t pieces =
      std::isfinite(chunk) && chunk > 0.0 ? static_cast<std::size_t>(std::ceil(span / chunk)) : 1;
  const std::size_t n = std::max<std::size_t>(1, pieces);
  const double tol = abs_tol / static_cast<double>(n);
  Result out;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = a + span * static_cast<double>(i) / static_cast<double>(n);
    const double hi = (i + 1 == n) ? b : a + span * static_cast<double>(i + 1) / static_cast<double>(n);
    const Result r = breaks.empty() ? integrate(f, lo, hi, tol, 200) : integrate_with_breaks(f, lo, hi, tol, breaks, 200);
    out.value += r.value;
    out.error += r.error;
  }
  return out;
}

struct ShellOptions {
  double abs_tol = 1e-9;
  /// Maximum chunk length inside a shell; infinity disables chunking.
  double chunk = std::numeric_limits<double>::infinity();
  int max_shells = 1100;
  /// Points where the integrand has narrow features (in integration coordinates).
  std::vector<double> breaks;
};

/// Integrates g over (0, top] by dyadic shells [top 2^{-m-1}, top 2^{-m}].
/// Assumes |g| eventually decays geometrically toward 0 once the shell lies
/// below `regular_below`; the remainder is extrapolated from the last two
/// shell magnitudes. Power-law integrands give exactly geometric shells; once
/// two consecutive shell ratios agree, the tail is summed in closed form.
template <class F>
Result integrate_toward_zero(const F& g, double top, const ShellOptions& opt,
                             double regular_below = std::numeric_limits<double>::infinity()) {
  Result out;
  double prev = -1.0;
  double prev_value = 0.0;
  double prev_ratio = -1.0;
  double hi = top;
  for (int m = 0; m < opt.max_shells; ++m) {
    const double lo = 0.5 * hi;
    const Result r = integrate_chunked(g, lo, hi, opt.abs_tol * 0.15 / ((m + 1.0) * (m + 1.0)), opt.chunk, opt.breaks);
    out.value += r.value;
    out.error += r.error;
    if (!std::isfinite(out.value) || !std::isfinite(out.error))
      throw NumericFailure("shell quadrature toward zero: non-finite integrand near 0", out.error);
    const double vratio = prev_value != 0.0 ? r.value / prev_value : -1.0;
    if (hi <= regular_below && m >= 3 && vratio > 0.0 && vratio < 0.999 && prev_ratio > 0.0) {
      const double drift = std::fabs(vratio - prev_ratio);
      if (drift < 1e-6 * vratio) {
        const double tail = r.value * vratio / (1.0 - vratio);
        const double tail_err = std::fabs(r.value) * drift / ((1.0 - vratio) * (1.0 - vratio)) + r.error / (1.0 - vratio);
        if (tail_err < 0.5 * opt.abs_tol) {
          out.value += tail;
          out.error += tail_err;
          return out;
        }
      }
    }
    prev_ratio = vratio;
    prev_value = r.value;
    const double mag = std::fabs(r.value) + r.error;
    if (hi <= regular_below && m >= 3) {
      // below sqrt(DBL_MIN) products like x^2 f(x) underflow, so a zero shell proves nothing
      if (mag == 0.0) {
        if (lo > 1.5e-154) return out;
        break;
      }
      if (prev > 0.0) {
        const double ratio = mag / prev;
        if (ratio < 0.999) {
          const double rem = mag * ratio / (1.0 - ratio);
          if (rem < 0.5 * opt.abs_tol) {
            out.error += rem;
            return out;
          }
        }
      }
    }
    prev = mag;
    hi = lo;
    if (hi == 0.0) break;
  }
  throw NumericFailure("shell quadrature toward zero did not converge", out.error + prev);
}

/// Integrates g over [bottom, inf) by shells [bottom 2^m, bottom 2^{m+1}].
/// `tail_bound(R)` must return an upper bound for |int_R^inf g| or a negative
/// number when none is known; otherwise geometric extrapolation is used.
/// Sets `diverged` when shell magnitudes stop decreasing for many shells.
template <class F, class B>
Result integrate_to_infinity(const F& g, double bottom, const ShellOptions& opt, const B& tail_bound,
                             bool* diverged = nullptr) {
  Result out;
  double prev = -1.0;
  double lo = bottom;
  int growing = 0;
  if (diverged) *diverged = false;
  for (int m = 0; m < opt.max_shells; ++m) {
    const double hi = 2.0 * lo;
    if (!std::isfinite(hi)) break;
    const Result r = integrate_chunked(g, lo, hi, opt.abs_tol * 0.15 / ((m + 1.0) * (m + 1.0)), opt.chunk, opt.breaks);
    out.value += r.value;
    out.error += r.error;
    const double mag = std::fabs(r.value) + r.error;
    const double bound = tail_bound(hi);
    if (bound >= 0.0 && bound < 0.5 * opt.abs_tol) {
      out.error += bound;
      return out;
    }
    if (bound < 0.0 && m >= 2) {
      if (mag == 0.0 && prev == 0.0) return out;
      if (prev > 0.0) {
        const double ratio = mag / prev;
        if (ratio < 0.999) {
          growing = 0;
          const double rem = mag * ratio / (1.0 - ratio);
          if (rem < 0.5 * opt.abs_tol) {
            out.error += rem;
            return out;
          }
        } else if (++growing >= 12) {
          if (diverged) {
            *diverged = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
          }
          throw NumericFailure("shell quadrature to infinity diverges", mag);
        }
      }
    }
    prev = mag;
    lo = hi;
  }
  throw NumericFailure("shell quadrature to infinity did not converge", out.error + prev);
}

}  // namespace levylab::quad
