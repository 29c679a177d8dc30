#include "levylab/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "levylab/field.hpp"
#include "levylab/levy.hpp"
#include "levylab/rng.hpp"

namespace levylab::cli {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- reading -------------------------------------------------------------

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  expect_object(j, path);
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(at(path, key), "unknown key");
  }
}

double as_number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    if (s == "-inf" || s == "-infinity") return -kInf;
  }
  throw ConfigError(path, "expected a number (or \"inf\")");
}

double number(const json& j, const char* key, const std::string& path, double def) {
  return j.contains(key) ? as_number(j.at(key), at(path, key)) : def;
}

long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<long long>();
}

long long integer(const json& j, const char* key, const std::string& path, long long def) {
  return j.contains(key) ? as_integer(j.at(key), at(path, key)) : def;
}

std::string text(const json& j, const char* key, const std::string& path, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_string()) throw ConfigError(at(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

bool boolean(const json& j, const char* key, const std::string& path, bool def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_boolean()) throw ConfigError(at(path, key), "expected true or false");
  return j.at(key).get<bool>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& path, std::vector<double> def) {
  if (!j.contains(key)) return def;
  const auto& a = j.at(key);
  if (!a.is_array()) throw ConfigError(at(path, key), "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_number(a[i], at(at(path, key), i)));
  return out;
}

json number_out(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

// ---- records ---------------------------------------------------------------

json to_json(const TimeNormSpec& t) { return {{"t", t.t}, {"p", number_out(t.p)}, {"q", number_out(t.q)}}; }

TimeNormSpec time_spec_from_json(const json& j, const std::string& path, TimeNormSpec def) {
  reject_unknown(j, {"t", "p", "q"}, path);
  return {number(j, "t", path, def.t), number(j, "p", path, def.p), number(j, "q", path, def.q)};
}

json to_json(std::complex<double> z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

std::complex<double> complex_from_json(const json& v, const std::string& path) {
  if (v.is_array()) {
    if (v.size() != 2) throw ConfigError(path, "expected a number or [re, im]");
    return {as_number(v[0], at(path, std::size_t{0})), as_number(v[1], at(path, std::size_t{1}))};
  }
  return {as_number(v, path), 0.0};
}

std::string kernel_name(Kernel k) { return k == Kernel::parallel ? "parallel" : "reference"; }

GridSpec noise_grid(const RunConfig& cfg, std::uint32_t J) { return GridSpec::cube(cfg.grid.n, cfg.grid.T, J); }

/// Boundary lattice of the half-space problems at level J.
GridSpec boundary_grid(const RunConfig& cfg, std::uint32_t J) {
  const std::size_t nb = cfg.grid.n - 1;
  GridSpec g = GridSpec::cube(nb, cfg.grid.T, J);
  if (cfg.kind == ExperimentKind::boundary_heat) {
    g.T.insert(g.T.begin(), cfg.boundary.time_window);
    g.J.insert(g.J.begin(), cfg.boundary.parabolic ? 2 * J : J);
  }
  return g;
}

double datum_smoothness(const RunConfig& cfg) {
  if (cfg.boundary.datum.smoothness) return *cfg.boundary.datum.smoothness;
  if (cfg.boundary.datum.kind == "smooth") return 10.0;
  return -0.5 * static_cast<double>(cfg.grid.n - 1);
}

ExperimentPlan make_plan(const RunConfig& cfg) {
  ExperimentPlan p;
  p.triplet = cfg.triplet;
  p.n = cfg.grid.n;
  p.T = cfg.grid.T;
  p.specs = cfg.norms;
  p.levels = cfg.grid.levels;
  p.replicates = cfg.replicates;
  p.seed = cfg.seed;
  p.statistic = cfg.statistic;
  p.slope_threshold = cfg.slope_threshold;
  p.bootstrap_resamples = cfg.bootstrap_resamples;
  p.sampler = cfg.sampler;
  p.profile = cfg.profile;
  p.kernel = cfg.kernel;
  p.max_cells = cfg.max_cells;
  return p;
}

SpacetimePlan make_spacetime_plan(const RunConfig& cfg) {
  SpacetimePlan p;
  p.triplet = cfg.triplet;
  p.n = cfg.grid.n;
  p.T = cfg.grid.T;
  p.spatial = cfg.spacetime.spatial;
  for (const auto& t : cfg.spacetime.paths) p.path_specs.push_back(path_level(t.t, t.p, t.q));
  p.levels = cfg.grid.levels;
  p.replicates = cfg.replicates;
  p.seed = cfg.seed;
  p.statistic = cfg.statistic;
  p.slope_threshold = cfg.slope_threshold;
  p.bootstrap_resamples = cfg.bootstrap_resamples;
  p.sampler = cfg.sampler;
  p.profile = cfg.profile;
  p.kernel = cfg.kernel;
  p.max_cells = cfg.max_cells;
  return p;
}

WeightedNormSpec weighted_spec(const RunConfig& cfg) {
  WeightedNormSpec w;
  w.q = cfg.boundary.q;
  w.k = cfg.boundary.k;
  w.inner = cfg.boundary.inner;
  if (cfg.kind == ExperimentKind::boundary_heat) w.time = cfg.boundary.time;
  return w;
}

// Wraps a library refusal with the config key it came from.
template <class F>
void checked(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(key, e.what());
  } catch (const CapacityError& e) {
    throw ConfigError(key, e.what());
  }
}

// ---- writing ---------------------------------------------------------------

class Csv {
public:
  explicit Csv(std::string header) { os_ << header << '\n'; }
  template <class... A>
  void row(const A&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I i) {
    return std::to_string(i);
  }
  std::ostringstream os_;
};

std::string lambda_text(std::complex<double> z) {
  if (z.imag() == 0.0) return format_double(z.real());
  return format_double(z.real()) + (z.imag() < 0 ? "" : "+") + format_double(z.imag()) + "i";
}

json interval_json(const stats::Interval& ci) { return {{"lo", ci.lo}, {"hi", ci.hi}}; }

json series_json(const NormSeries& s, const std::vector<double>& oracle) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& r = s.rows[i];
    json row = {{"J", r.J}, {"statistic", r.statistic}, {"ci", interval_json(r.ci)}, {"used", r.used}, {"dropped", r.dropped}};
    if (!oracle.empty()) row["oracle_mean_pth_power"] = oracle[i];
    rows.push_back(row);
  }
  const auto& v = s.verdict;
  return {{"label", s.label},
          {"smoothness", s.smoothness},
          {"p", s.p},
          {"rows", rows},
          {"verdict",
           {{"slope", v.slope},
            {"slope_ci", interval_json(v.slope_ci)},
            {"verdict", to_string(v.verdict)},
            {"threshold", v.threshold},
            {"near_threshold", v.near_threshold},
            {"note", v.note}}}};
}

void level_tables(const ExperimentResult& res, const std::vector<std::vector<double>>& oracles, bool verdicts,
                  RunArtifacts& out) {
  Csv norms("series,J,replicate,value");
  Csv levels("series,J,statistic,ci_lo,ci_hi,used,dropped");
  Csv verdict("series,slope,ci_lo,ci_hi,threshold,verdict,near_threshold");
  json series = json::array();
  for (std::size_t s = 0; s < res.series.size(); ++s) {
    const auto& ser = res.series[s];
    for (std::size_t li = 0; li < ser.rows.size(); ++li) {
      const auto& r = ser.rows[li];
      levels.row(ser.label, r.J, r.statistic, r.ci.lo, r.ci.hi, r.used, r.dropped);
      for (std::size_t rep = 0; rep < ser.pools[li].size(); ++rep) norms.row(ser.label, r.J, rep, ser.pools[li][rep]);
    }
    const auto& v = ser.verdict;
    verdict.row(ser.label, v.slope, v.slope_ci.lo, v.slope_ci.hi, v.threshold, to_string(v.verdict), v.near_threshold);
    series.push_back(series_json(ser, oracles.empty() ? std::vector<double>{} : oracles[s]));
  }
  out.report["series"] = series;
  out.report["evaluations"] = res.evaluations;
  out.report["dropped"] = res.dropped;
  out.report["flagged"] = res.flagged;
  out.report["monotonicity_violations"] = res.monotonicity_violations;
  out.report["experiment_wall_seconds"] = res.wall_seconds;
  out.flagged = res.flagged;
  out.csv.emplace_back("norms.csv", norms.str());
  out.csv.emplace_back("levels.csv", levels.str());
  if (verdicts) out.csv.emplace_back("verdicts.csv", verdict.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + path.string());
  os << text;
  if (!os) throw ValidationError("write failed for " + path.string());
}

void write_doubles(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw ValidationError("cannot write " + path.string());
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    bin.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

/// Field-dump layout with the normal axis prepended (slowest).
void write_solution_dump(const HalfSpaceField& u, const RunConfig& cfg, std::complex<double> lambda,
                         const std::filesystem::path& stem) {
  const auto& g = u.grid();
  std::vector<std::size_t> shape{g.normal_points};
  shape.insert(shape.end(), g.boundary.N.begin(), g.boundary.N.end());
  std::vector<std::string> axes{"normal"};
  if (g.has_time) axes.push_back("time");
  while (axes.size() < shape.size()) axes.push_back("x" + std::to_string(axes.size() - (g.has_time ? 2 : 1)));
  json header = {{"kind", to_string(cfg.kind)}, {"shape", shape},       {"axes", axes},
                 {"L", g.boundary.L},           {"depth", g.depth},     {"normal_grid", "cell-centre"},
                 {"bc_order", u.bc_order()},    {"triplet", cfg.triplet}, {"seed", cfg.seed},
                 {"replicate", 0},              {"rng", kRngName},      {"dtype", "float64-le"},
                 {"order", "row-major"}};
  if (!g.has_time) header["lambda"] = to_json(lambda);
  auto js = stem;
  js += ".json";
  auto bin = stem;
  bin += ".bin";
  write_text(js, header.dump(2) + "\n");
  write_doubles(bin, u.values());
}

// ---- experiments -------------------------------------------------------------

void run_norms(const RunConfig& cfg, const std::filesystem::path& dump_dir, RunArtifacts& out) {
  const auto plan = make_plan(cfg);
  const auto res = norm_growth_experiment(plan);
  std::vector<std::vector<double>> oracles;
  const bool centred_gaussian = cfg.triplet.gamma == 0.0 && cfg.triplet.nu.is_zero();
  if (centred_gaussian) {
    for (const auto& spec : cfg.norms) {
      std::vector<double> o;
      for (auto J : cfg.grid.levels) {
        o.push_back(spec.p == spec.q ? std::pow(gaussian_oracle(spec, noise_grid(cfg, J), cfg.triplet, cfg.profile), 1.0 / spec.p)
                                     : std::numeric_limits<double>::quiet_NaN());
      }
      oracles.push_back(std::move(o));
    }
  }
  level_tables(res, oracles, cfg.kind == ExperimentKind::thresholds, out);
  if (cfg.kind == ExperimentKind::thresholds && !plan.verdict_grade())
    out.report["notes"].push_back("not verdict-grade: need >= 4 levels and >= 50 replicates");
  if (cfg.output.dump_fields && !dump_dir.empty()) {
    for (auto J : cfg.grid.levels) {
      const auto sample = sample_white_noise(cfg.triplet, noise_grid(cfg, J), cfg.seed, 0, {cfg.sampler, cfg.max_cells});
      write_field_dump(sample, dump_dir / ("field_J" + std::to_string(J) + "_r0"));
    }
  }
}

void run_spacetime(const RunConfig& cfg, const std::filesystem::path& dump_dir, RunArtifacts& out) {
  const auto res = spacetime_regularity_experiment(make_spacetime_plan(cfg));
  level_tables(res, {}, true, out);
  out.report["path_level_note"] = "path specs are probed at t + 1 (slab path = time integral of the noise)";
  if (cfg.output.dump_fields && !dump_dir.empty()) {
    for (auto J : cfg.grid.levels) {
      const auto sample = sample_white_noise(cfg.triplet, noise_grid(cfg, J), cfg.seed, 0, {cfg.sampler, cfg.max_cells});
      write_field_dump(sample, dump_dir / ("field_J" + std::to_string(J) + "_r0"));
    }
  }
}

std::vector<double> boundary_datum(const RunConfig& cfg, std::uint32_t J, std::uint32_t replicate) {
  const GridSpec g = boundary_grid(cfg, J);
  if (cfg.boundary.datum.kind == "noise")
    return sample_white_noise(cfg.triplet, g, cfg.seed, replicate, {cfg.sampler, cfg.max_cells}).density();
  std::vector<double> f(g.total_cells());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto c = cell_center(g, i);
    double v = 1.0;
    for (std::size_t a = 0; a < c.size(); ++a) v *= 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * c[a] / g.T[a]);
    f[i] = v;
  }
  return f;
}

HalfSpaceGrid half_space(const RunConfig& cfg, const GridSpec& g) {
  HalfSpaceGrid hg;
  hg.boundary = Lattice::from_grid(g);
  hg.has_time = cfg.kind == ExperimentKind::boundary_heat;
  hg.depth = cfg.boundary.depth;
  hg.normal_points = std::size_t{1} << cfg.boundary.normal_level;
  return hg;
}

HalfSpaceField solve(const RunConfig& cfg, std::span<const double> datum, const HalfSpaceGrid& hg,
                     std::complex<double> lambda) {
  if (cfg.kind == ExperimentKind::boundary_heat)
    return solve_heat_boundary(datum, BoundaryProblem::heat(cfg.boundary.cutoff, cfg.boundary.bc_order), hg);
  return solve_poisson_boundary(datum, BoundaryProblem::poisson(lambda, cfg.boundary.bc_order), hg);
}

void run_boundary(const RunConfig& cfg, const std::filesystem::path& dump_dir, RunArtifacts& out) {
  const auto& b = cfg.boundary;
  const bool heat = cfg.kind == ExperimentKind::boundary_heat;
  const std::uint32_t top = cfg.grid.levels.back();
  const GridSpec gtop = boundary_grid(cfg, top);
  const HalfSpaceGrid hg = half_space(cfg, gtop);
  const auto datum = boundary_datum(cfg, top, 0);
  const auto wspec = weighted_spec(cfg);
  const std::vector<std::complex<double>> lambdas = heat ? std::vector<std::complex<double>>{{1.0, 0.0}} : b.lambdas;

  Csv diag("lambda,r,q,k,t0,j,norm,finite_flag");
  json profile = json::array();
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const auto u = solve(cfg, datum, hg, lambdas[li]);
    const auto rows = weighted_norm_profile(u, b.r_values, wspec, cfg.profile);
    json prow = {{"lambda", heat ? json(nullptr) : to_json(lambdas[li])}, {"pde_residual", u.pde_residual()}, {"rows", json::array()}};
    for (const auto& r : rows) {
      diag.row(heat ? std::string("na") : lambda_text(lambdas[li]), r.r, b.q, b.k, b.inner.s, b.bc_order, r.norm, r.finite);
      prow["rows"].push_back({{"r", r.r}, {"norm", r.norm}, {"finite", r.finite}});
    }
    profile.push_back(prow);
    if (li == 0 && cfg.output.dump_fields && !dump_dir.empty())
      write_solution_dump(u, cfg, lambdas[li], dump_dir / ("solution_J" + std::to_string(top)));
  }
  out.report["profile"] = profile;
  out.csv.emplace_back("diagnostics.csv", diag.str());

  if (!heat && lambdas.size() >= 2) {
    auto spec = wspec;
    spec.r = b.scaling_r;
    const auto ls = lambda_scaling_experiment(datum, hg, b.bc_order, spec, datum_smoothness(cfg), lambdas, cfg.profile);
    Csv csv("abs_lambda,norm,oracle");
    json js = {{"r", b.scaling_r},           {"slope", ls.slope},         {"slope_ci", interval_json(ls.slope_ci)},
               {"oracle_slope", ls.oracle_slope}, {"predicted_slope", ls.predicted}, {"lambdas", json::array()},
               {"norms", ls.norms},          {"oracle", ls.oracle}};
    for (std::size_t i = 0; i < ls.lambdas.size(); ++i) {
      js["lambdas"].push_back(to_json(ls.lambdas[i]));
      csv.row(std::abs(ls.lambdas[i]), ls.norms[i], ls.oracle[i]);
    }
    out.report["lambda_scaling"] = js;
    out.csv.emplace_back("lambda_scaling.csv", csv.str());
  }

  if (b.finiteness && cfg.grid.levels.size() >= 3) {
    // Coupled levels: one fine draw per replicate, coarsened to every level.
    const FieldFactory make = [&](std::uint32_t J, std::uint32_t rep) {
      const GridSpec gJ = boundary_grid(cfg, J);
      std::vector<double> f;
      if (b.datum.kind == "noise") {
        const auto fine = sample_white_noise(cfg.triplet, gtop, cfg.seed, rep, {cfg.sampler, cfg.max_cells});
        std::vector<std::uint32_t> drop(gtop.dim());
        for (std::size_t a = 0; a < drop.size(); ++a) drop[a] = gtop.J[a] - gJ.J[a];
        f = coarsen(fine, drop).density();
      } else {
        f = boundary_datum(cfg, J, rep);
      }
      return solve(cfg, f, half_space(cfg, gJ), lambdas.front());
    };
    auto fb = empirical_finiteness_boundary(make, cfg.grid.levels, cfg.replicates, b.r_values, wspec,
                                            cfg.slope_threshold, cfg.profile);
    const bool gaussian_noise = b.datum.kind == "noise" && cfg.triplet.is_gaussian();
    if (gaussian_noise || b.datum.smoothness) {
      const double s = datum_smoothness(cfg);
      fb.predicted = heat ? heat_predicted_boundary(b.q, b.time.t, -0.5, b.k, b.bc_order, b.inner.s, s)
                          : poisson_predicted_boundary(b.q, b.inner.s, b.k, b.bc_order, s);
    }
    Csv stat_csv("r,J,statistic");
    Csv fit_csv("r,slope,increment_exponent,stable");
    json rows = json::array();
    for (std::size_t r = 0; r < fb.r_values.size(); ++r) {
      for (std::size_t li = 0; li < fb.levels.size(); ++li) stat_csv.row(fb.r_values[r], fb.levels[li], fb.statistic[r][li]);
      fit_csv.row(fb.r_values[r], fb.slopes[r], fb.increment_exponents[r], static_cast<bool>(fb.stable[r]));
      rows.push_back({{"r", fb.r_values[r]},
                      {"statistic", fb.statistic[r]},
                      {"slope", number_out(fb.slopes[r])},
                      {"increment_exponent", number_out(fb.increment_exponents[r])},
                      {"stable", static_cast<bool>(fb.stable[r])}});
    }
    out.report["finiteness"] = {{"levels", fb.levels},
                                {"rows", rows},
                                {"r_boundary", fb.r_boundary},
                                {"predicted", fb.predicted},
                                {"coupled_levels", b.datum.kind == "noise"},
                                {"parabolic", heat && b.parabolic}};
    out.csv.emplace_back("finiteness.csv", stat_csv.str());
    out.csv.emplace_back("finiteness_fit.csv", fit_csv.str());
  }
}

void run_indices(const RunConfig& cfg, RunArtifacts& out) {
  const auto grid = log_grid(cfg.indices.xi_min, cfg.indices.xi_max, cfg.indices.per_decade);
  const auto est = blumenthal_getoor(cfg.triplet, grid);
  const auto mom = moment_index(cfg.triplet);
  Csv csv("beta_upper,beta_lower,p_max,p_max_low_confidence,residual_upper,residual_lower,fit_low_confidence");
  csv.row(est.beta_upper, est.beta_lower, mom.value, mom.low_confidence, est.diagnostics.residual_upper,
          est.diagnostics.residual_lower, est.diagnostics.low_confidence);
  out.report["indices"] = {{"beta_upper", est.beta_upper},
                           {"beta_lower", est.beta_lower},
                           {"p_max", number_out(mom.value)},
                           {"p_max_low_confidence", mom.low_confidence},
                           {"diagnostics",
                            {{"residual_upper", est.diagnostics.residual_upper},
                             {"residual_lower", est.diagnostics.residual_lower},
                             {"low_confidence", est.diagnostics.low_confidence},
                             {"note", est.diagnostics.note}}}};
  out.csv.emplace_back("indices.csv", csv.str());
}

}  // namespace

// ---- public ------------------------------------------------------------------

ConfigError::ConfigError(const std::string& key, const std::string& message)
    : ValidationError(key + ": " + message), key_(key) {}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::norms: return "norms";
    case ExperimentKind::thresholds: return "thresholds";
    case ExperimentKind::spacetime: return "spacetime";
    case ExperimentKind::boundary_poisson: return "boundary-poisson";
    case ExperimentKind::boundary_heat: return "boundary-heat";
    case ExperimentKind::indices: return "indices";
  }
  return "?";
}

ExperimentKind kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::norms, ExperimentKind::thresholds, ExperimentKind::spacetime,
                 ExperimentKind::boundary_poisson, ExperimentKind::boundary_heat, ExperimentKind::indices})
    if (to_string(k) == s) return k;
  throw ConfigError("config.kind", "unknown experiment kind '" + s +
                                       "' (norms, thresholds, spacetime, boundary-poisson, boundary-heat, indices)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const NormSpec& spec) {
  if (spec.kind == NormKind::isotropic) {
    json j = {{"type", "isotropic"}, {"s", spec.s}, {"p", number_out(spec.p)}, {"q", number_out(spec.q)}};
    if (spec.rho) j["rho"] = *spec.rho;
    return j;
  }
  return {{"type", "mixed"}, {"s_bar", spec.s_bar}, {"splitting", spec.splitting}, {"p", number_out(spec.p)},
          {"q", number_out(spec.q)}};
}

NormSpec norm_spec_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string type = text(j, "type", path, "isotropic");
  if (type == "isotropic") {
    reject_unknown(j, {"type", "s", "p", "q", "rho"}, path);
    if (!j.contains("s")) throw ConfigError(at(path, "s"), "missing");
    std::optional<double> rho;
    if (j.contains("rho")) rho = as_number(j.at("rho"), at(path, "rho"));
    return NormSpec::isotropic(number(j, "s", path, 0.0), number(j, "p", path, 2.0), number(j, "q", path, 2.0), rho);
  }
  if (type == "mixed") {
    reject_unknown(j, {"type", "s_bar", "splitting", "p", "q"}, path);
    if (!j.contains("s_bar")) throw ConfigError(at(path, "s_bar"), "missing");
    const auto s_bar = numbers(j, "s_bar", path, {});
    std::vector<std::size_t> splitting;
    if (j.contains("splitting")) {
      const auto& a = j.at("splitting");
      if (!a.is_array()) throw ConfigError(at(path, "splitting"), "expected an array");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto v = as_integer(a[i], at(at(path, "splitting"), i));
        if (v < 1) throw ConfigError(at(at(path, "splitting"), i), "group sizes must be >= 1");
        splitting.push_back(static_cast<std::size_t>(v));
      }
    } else {
      splitting.assign(s_bar.size(), 1);
    }
    const double p = number(j, "p", path, 2.0);
    return NormSpec::mixed(s_bar, splitting, p, number(j, "q", path, p));
  }
  throw ConfigError(at(path, "type"), "expected \"isotropic\" or \"mixed\"");
}

RunConfig parse_config(const json& j) {
  const std::string root = "config";
  reject_unknown(j,
                 {"schema_version", "rng", "kind", "triplet", "grid", "norms", "seed", "replicates", "statistic",
                  "slope_threshold", "bootstrap_resamples", "sampler", "profile", "kernel", "max_cells", "spacetime",
                  "boundary", "indices", "output"},
                 root);
  RunConfig c;
  if (!j.contains("schema_version")) throw ConfigError(at(root, "schema_version"), "missing");
  c.schema_version = static_cast<int>(integer(j, "schema_version", root, 0));
  if (!j.contains("rng")) throw ConfigError(at(root, "rng"), "missing (the generator must be named)");
  c.rng = text(j, "rng", root, "");
  if (!j.contains("kind")) throw ConfigError(at(root, "kind"), "missing");
  c.kind = kind_from_string(text(j, "kind", root, ""));

  if (j.contains("triplet")) {
    checked(at(root, "triplet"), [&] { c.triplet = j.at("triplet").get<LevyTriplet>(); });
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    const auto path = at(root, "grid");
    reject_unknown(g, {"n", "T", "levels"}, path);
    const auto n = integer(g, "n", path, 2);
    if (n < 1 || n > 4) throw ConfigError(at(path, "n"), "dimension must lie in [1, 4]");
    c.grid.n = static_cast<std::size_t>(n);
    c.grid.T = number(g, "T", path, 1.0);
    if (g.contains("levels")) {
      const auto& a = g.at("levels");
      if (!a.is_array()) throw ConfigError(at(path, "levels"), "expected an array");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto v = as_integer(a[i], at(at(path, "levels"), i));
        if (v < 1 || v > 30) throw ConfigError(at(at(path, "levels"), i), "levels must lie in [1, 30]");
        c.grid.levels.push_back(static_cast<std::uint32_t>(v));
      }
    }
  }
  if (j.contains("norms")) {
    const auto& a = j.at("norms");
    if (!a.is_array()) throw ConfigError(at(root, "norms"), "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) c.norms.push_back(norm_spec_from_json(a[i], at(at(root, "norms"), i)));
  }
  if (j.contains("seed")) {
    const auto& v = j.at("seed");
    if (!v.is_number_unsigned()) throw ConfigError(at(root, "seed"), "expected a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  }
  if (j.contains("replicates")) {
    const auto& v = j.at("replicates");
    if (!v.is_number_integer()) throw ConfigError(at(root, "replicates"), "expected a positive integer");
    const auto r = v.get<long long>();
    if (r < 1) throw ConfigError(at(root, "replicates"), "must be >= 1");
    if (r > 10'000'000) throw ConfigError(at(root, "replicates"), "must be <= 1e7");
    c.replicates = static_cast<int>(r);
  }
  if (j.contains("statistic")) {
    checked(at(root, "statistic"), [&] { c.statistic = statistic_from_string(text(j, "statistic", root, "")); });
  }
  c.slope_threshold = number(j, "slope_threshold", root, c.slope_threshold);
  c.bootstrap_resamples = static_cast<int>(integer(j, "bootstrap_resamples", root, c.bootstrap_resamples));
  if (j.contains("sampler")) {
    const auto path = at(root, "sampler");
    reject_unknown(j.at("sampler"), {"small_jump_epsilon"}, path);
    c.sampler.small_jump_epsilon = number(j.at("sampler"), "small_jump_epsilon", path, c.sampler.small_jump_epsilon);
  }
  if (j.contains("profile")) {
    const auto& p = j.at("profile");
    const auto path = at(root, "profile");
    reject_unknown(p, {"order", "inner", "outer"}, path);
    c.profile.order = static_cast<int>(integer(p, "order", path, c.profile.order));
    c.profile.inner = number(p, "inner", path, c.profile.inner);
    c.profile.outer = number(p, "outer", path, c.profile.outer);
  }
  if (j.contains("kernel")) {
    const auto k = text(j, "kernel", root, "");
    if (k == "parallel") c.kernel = Kernel::parallel;
    else if (k == "reference") c.kernel = Kernel::reference;
    else throw ConfigError(at(root, "kernel"), "expected \"parallel\" or \"reference\"");
  }
  if (j.contains("max_cells")) {
    const auto& v = j.at("max_cells");
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) throw ConfigError(at(root, "max_cells"), "expected a positive integer");
    c.max_cells = v.get<std::size_t>();
  }
  if (j.contains("spacetime")) {
    const auto& s = j.at("spacetime");
    const auto path = at(root, "spacetime");
    reject_unknown(s, {"spatial", "paths"}, path);
    if (s.contains("spatial")) c.spacetime.spatial = norm_spec_from_json(s.at("spatial"), at(path, "spatial"));
    if (s.contains("paths")) {
      const auto& a = s.at("paths");
      if (!a.is_array()) throw ConfigError(at(path, "paths"), "expected an array");
      for (std::size_t i = 0; i < a.size(); ++i)
        c.spacetime.paths.push_back(time_spec_from_json(a[i], at(at(path, "paths"), i), TimeNormSpec{-0.5, 2.0, kInf}));
    }
  }
  if (j.contains("boundary")) {
    const auto& b = j.at("boundary");
    const auto path = at(root, "boundary");
    reject_unknown(b,
                   {"lambdas", "bc_order", "depth", "normal_level", "r_values", "q", "k", "inner", "time", "cutoff",
                    "time_window", "parabolic", "scaling_r", "datum", "finiteness"},
                   path);
    auto& B = c.boundary;
    if (b.contains("lambdas")) {
      const auto& a = b.at("lambdas");
      if (!a.is_array()) throw ConfigError(at(path, "lambdas"), "expected an array");
      B.lambdas.clear();
      for (std::size_t i = 0; i < a.size(); ++i) B.lambdas.push_back(complex_from_json(a[i], at(at(path, "lambdas"), i)));
    }
    B.bc_order = static_cast<int>(integer(b, "bc_order", path, B.bc_order));
    B.depth = number(b, "depth", path, B.depth);
    const auto nl = integer(b, "normal_level", path, B.normal_level);
    if (nl < 1 || nl > 24) throw ConfigError(at(path, "normal_level"), "must lie in [1, 24]");
    B.normal_level = static_cast<std::uint32_t>(nl);
    B.r_values = numbers(b, "r_values", path, B.r_values);
    B.q = number(b, "q", path, B.q);
    B.k = static_cast<int>(integer(b, "k", path, B.k));
    if (b.contains("inner")) B.inner = norm_spec_from_json(b.at("inner"), at(path, "inner"));
    if (b.contains("time")) B.time = time_spec_from_json(b.at("time"), at(path, "time"), B.time);
    if (b.contains("cutoff")) {
      const auto cp = at(path, "cutoff");
      reject_unknown(b.at("cutoff"), {"center", "half_width"}, cp);
      B.cutoff.center = number(b.at("cutoff"), "center", cp, B.cutoff.center);
      B.cutoff.half_width = number(b.at("cutoff"), "half_width", cp, B.cutoff.half_width);
    }
    B.time_window = number(b, "time_window", path, B.time_window);
    B.parabolic = boolean(b, "parabolic", path, B.parabolic);
    B.scaling_r = number(b, "scaling_r", path, B.scaling_r);
    if (b.contains("datum")) {
      const auto dp = at(path, "datum");
      reject_unknown(b.at("datum"), {"kind", "smoothness"}, dp);
      B.datum.kind = text(b.at("datum"), "kind", dp, "noise");
      if (B.datum.kind != "noise" && B.datum.kind != "smooth")
        throw ConfigError(at(dp, "kind"), "expected \"noise\" or \"smooth\"");
      if (b.at("datum").contains("smoothness"))
        B.datum.smoothness = as_number(b.at("datum").at("smoothness"), at(dp, "smoothness"));
    }
    B.finiteness = boolean(b, "finiteness", path, B.finiteness);
  }
  if (j.contains("indices")) {
    const auto& x = j.at("indices");
    const auto path = at(root, "indices");
    reject_unknown(x, {"xi_min", "xi_max", "per_decade"}, path);
    c.indices.xi_min = number(x, "xi_min", path, c.indices.xi_min);
    c.indices.xi_max = number(x, "xi_max", path, c.indices.xi_max);
    c.indices.per_decade = static_cast<int>(integer(x, "per_decade", path, c.indices.per_decade));
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    const auto path = at(root, "output");
    reject_unknown(o, {"dir", "plotdata", "dump_fields"}, path);
    c.output.dir = text(o, "dir", path, "");
    c.output.plotdata = boolean(o, "plotdata", path, c.output.plotdata);
    c.output.dump_fields = boolean(o, "dump_fields", path, c.output.dump_fields);
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  const std::string root = "config";
  if (c.schema_version != kSchemaVersion)
    throw ConfigError(at(root, "schema_version"), "unsupported version " + std::to_string(c.schema_version) +
                                                      " (this build reads " + std::to_string(kSchemaVersion) + ")");
  if (c.rng != kRngName) throw ConfigError(at(root, "rng"), "unsupported generator '" + c.rng + "'; only " + kRngName);
  if (!(c.grid.T > 0.0) || !std::isfinite(c.grid.T)) throw ConfigError(at(root, "grid.T"), "must be positive");
  for (std::size_t i = 1; i < c.grid.levels.size(); ++i)
    if (c.grid.levels[i] <= c.grid.levels[i - 1]) throw ConfigError(at(root, "grid.levels"), "must be increasing");
  if (c.replicates < 1) throw ConfigError(at(root, "replicates"), "must be >= 1");
  if (c.bootstrap_resamples < 1) throw ConfigError(at(root, "bootstrap_resamples"), "must be >= 1");
  if (!std::isfinite(c.slope_threshold) || c.slope_threshold <= 0.0)
    throw ConfigError(at(root, "slope_threshold"), "must be positive and finite");
  if (!(c.sampler.small_jump_epsilon > 0.0)) throw ConfigError(at(root, "sampler.small_jump_epsilon"), "must be positive");
  if (!(c.profile.inner == 1.0 && c.profile.outer > 1.0 && c.profile.outer <= 2.0) || c.profile.order < 1)
    throw ConfigError(at(root, "profile"), "need inner = 1, 1 < outer <= 2 and order >= 1");

  const bool needs_levels = c.kind != ExperimentKind::indices;
  if (needs_levels && c.grid.levels.empty()) throw ConfigError(at(root, "grid.levels"), "no resolution levels");

  switch (c.kind) {
    case ExperimentKind::norms:
    case ExperimentKind::thresholds: {
      if (c.norms.empty()) throw ConfigError(at(root, "norms"), "no norm specs");
      for (std::size_t i = 0; i < c.norms.size(); ++i)
        checked(at(at(root, "norms"), i), [&] { c.norms[i].validate(c.grid.n); });
      if (c.kind == ExperimentKind::thresholds && c.grid.levels.size() < 4)
        throw ConfigError(at(root, "grid.levels"), "threshold verdicts need at least 4 levels");
      checked(root, [&] { make_plan(c).validate(); });
      break;
    }
    case ExperimentKind::spacetime: {
      if (c.grid.n < 2) throw ConfigError(at(root, "grid.n"), "space-time runs need n >= 2 (axis 0 is time)");
      if (c.spacetime.paths.empty()) throw ConfigError(at(root, "spacetime.paths"), "no path specs");
      if (c.grid.levels.size() < 4) throw ConfigError(at(root, "grid.levels"), "threshold verdicts need at least 4 levels");
      checked(at(root, "spacetime"), [&] { make_spacetime_plan(c).validate(); });
      break;
    }
    case ExperimentKind::boundary_poisson:
    case ExperimentKind::boundary_heat: {
      const auto path = at(root, "boundary");
      const auto& b = c.boundary;
      const bool heat = c.kind == ExperimentKind::boundary_heat;
      if (c.grid.n < 2) throw ConfigError(at(root, "grid.n"), "half-space problems need n >= 2");
      if (b.bc_order != 0 && b.bc_order != 1) throw ConfigError(at(path, "bc_order"), "must be 0 (Dirichlet) or 1 (Neumann)");
      if (!(b.depth > 0.0) || !std::isfinite(b.depth)) throw ConfigError(at(path, "depth"), "must be positive");
      if (b.r_values.empty()) throw ConfigError(at(path, "r_values"), "empty r sweep");
      if (!std::is_sorted(b.r_values.begin(), b.r_values.end())) throw ConfigError(at(path, "r_values"), "must be increasing");
      if (!(b.q >= 1.0) || !std::isfinite(b.q)) throw ConfigError(at(path, "q"), "must lie in [1, inf)");
      if (b.k < 0 || b.k > 4) throw ConfigError(at(path, "k"), "must lie in [0, 4]");
      checked(at(path, "inner"), [&] { b.inner.validate(c.grid.n - 1); });
      if (!heat) {
        if (b.lambdas.empty()) throw ConfigError(at(path, "lambdas"), "no lambda values");
        for (std::size_t i = 0; i < b.lambdas.size(); ++i)
          checked(at(at(path, "lambdas"), i), [&] { BoundaryProblem::poisson(b.lambdas[i], b.bc_order).validate(); });
        if (b.lambdas.size() >= 2) {
          if (b.inner.kind != NormKind::isotropic)
            throw ConfigError(at(path, "inner"), "the lambda fit needs an isotropic inner norm");
          checked(at(path, "scaling_r"),
                  [&] { check_poisson_finiteness(b.scaling_r, b.q, b.inner.s, b.k, b.bc_order, datum_smoothness(c)); });
        }
      } else {
        checked(at(path, "cutoff"), [&] { BoundaryProblem::heat(b.cutoff, b.bc_order).validate(); });
        if (!(b.time_window > 0.0)) throw ConfigError(at(path, "time_window"), "must be positive");
        if (b.cutoff.center - b.cutoff.half_width < 0.0 || b.cutoff.center + b.cutoff.half_width > b.time_window)
          throw ConfigError(at(path, "cutoff"), "support must lie inside [0, time_window]");
        if (b.q != 2.0 || b.time.p != 2.0 || b.time.q != 2.0 || b.inner.p != 2.0 || b.inner.q != 2.0 ||
            b.inner.kind != NormKind::isotropic || b.inner.rho)
          throw ConfigError(path, "heat weighted norms are implemented for q = time.p = time.q = inner.p = inner.q = 2 "
                                  "with an isotropic unweighted inner norm");
      }
      if (b.finiteness && c.grid.levels.size() < 3)
        throw ConfigError(at(root, "grid.levels"), "the finiteness sweep needs at least 3 levels (or finiteness: false)");
      checked(at(root, "grid"), [&] {
        const GridSpec g = boundary_grid(c, c.grid.levels.back());
        g.validate(c.max_cells);
        const double modes = static_cast<double>(g.total_cells());
        if (modes * std::ldexp(1.0, static_cast<int>(b.normal_level)) > 64.0 * static_cast<double>(c.max_cells))
          throw CapacityError(static_cast<std::size_t>(modes) << b.normal_level, 64 * c.max_cells);
      });
      break;
    }
    case ExperimentKind::indices: {
      const auto path = at(root, "indices");
      if (!(c.indices.xi_min > 0.0)) throw ConfigError(at(path, "xi_min"), "must be positive");
      if (!(c.indices.xi_max > c.indices.xi_min) || !std::isfinite(c.indices.xi_max))
        throw ConfigError(at(path, "xi_max"), "must be finite and exceed xi_min");
      if (c.indices.per_decade < 1) throw ConfigError(at(path, "per_decade"), "must be >= 1");
      break;
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path.string(), "cannot read config file");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

json serialize(const RunConfig& c) {
  json norms = json::array();
  for (const auto& s : c.norms) norms.push_back(to_json(s));
  json paths = json::array();
  for (const auto& t : c.spacetime.paths) paths.push_back(to_json(t));
  json lambdas = json::array();
  for (auto z : c.boundary.lambdas) lambdas.push_back(to_json(z));
  const auto& b = c.boundary;
  json datum = {{"kind", b.datum.kind}};
  if (b.datum.smoothness) datum["smoothness"] = *b.datum.smoothness;
  return {
      {"schema_version", c.schema_version},
      {"rng", c.rng},
      {"kind", to_string(c.kind)},
      {"triplet", c.triplet},
      {"grid", {{"n", c.grid.n}, {"T", c.grid.T}, {"levels", c.grid.levels}}},
      {"norms", norms},
      {"seed", c.seed},
      {"replicates", c.replicates},
      {"statistic", to_string(c.statistic)},
      {"slope_threshold", c.slope_threshold},
      {"bootstrap_resamples", c.bootstrap_resamples},
      {"sampler", {{"small_jump_epsilon", c.sampler.small_jump_epsilon}}},
      {"profile", {{"order", c.profile.order}, {"inner", c.profile.inner}, {"outer", c.profile.outer}}},
      {"kernel", kernel_name(c.kernel)},
      {"max_cells", c.max_cells},
      {"spacetime", {{"spatial", to_json(c.spacetime.spatial)}, {"paths", paths}}},
      {"boundary",
       {{"lambdas", lambdas},
        {"bc_order", b.bc_order},
        {"depth", b.depth},
        {"normal_level", b.normal_level},
        {"r_values", b.r_values},
        {"q", number_out(b.q)},
        {"k", b.k},
        {"inner", to_json(b.inner)},
        {"time", to_json(b.time)},
        {"cutoff", {{"center", b.cutoff.center}, {"half_width", b.cutoff.half_width}}},
        {"time_window", b.time_window},
        {"parabolic", b.parabolic},
        {"scaling_r", b.scaling_r},
        {"datum", datum},
        {"finiteness", b.finiteness}}},
      {"indices", {{"xi_min", c.indices.xi_min}, {"xi_max", c.indices.xi_max}, {"per_decade", c.indices.per_decade}}},
      {"output", {{"dir", c.output.dir}, {"plotdata", c.output.plotdata}, {"dump_fields", c.output.dump_fields}}},
  };
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg, const RunOptions& opt) {
  if (opt.out) return *opt.out;
  if (!cfg.output.dir.empty()) return cfg.output.dir;
  if (const char* env = std::getenv("LEVYLAB_OUT"); env && *env) return env;
  return "levylab-out";
}

RunArtifacts execute(const RunConfig& cfg, const std::filesystem::path& dump_dir) {
  validate(cfg);
  RunArtifacts out;
  out.report = {{"kind", to_string(cfg.kind)}, {"schema_version", kSchemaVersion}, {"rng", kRngName},
                {"seed", cfg.seed},            {"config", serialize(cfg)},       {"notes", json::array()}};
  const auto t0 = std::chrono::steady_clock::now();
  switch (cfg.kind) {
    case ExperimentKind::norms:
    case ExperimentKind::thresholds: run_norms(cfg, dump_dir, out); break;
    case ExperimentKind::spacetime: run_spacetime(cfg, dump_dir, out); break;
    case ExperimentKind::boundary_poisson:
    case ExperimentKind::boundary_heat: run_boundary(cfg, dump_dir, out); break;
    case ExperimentKind::indices: run_indices(cfg, out); break;
  }
  out.report["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string emit_plotdata(const json& report) {
  if (report.contains("lambda_scaling")) {
    Csv csv("log_abs_lambda,log_norm");
    const auto& ls = report.at("lambda_scaling");
    for (std::size_t i = 0; i < ls.at("norms").size(); ++i) {
      const auto& l = ls.at("lambdas")[i];
      const std::complex<double> z = l.is_array() ? std::complex<double>{l[0].get<double>(), l[1].get<double>()}
                                                  : std::complex<double>{l.get<double>(), 0.0};
      csv.row(std::log(std::abs(z)), std::log(ls.at("norms")[i].get<double>()));
    }
    return csv.str();
  }
  Csv csv("series,J,statistic");
  auto value = [](const json& v) { return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN(); };
  if (report.contains("series")) {
    for (const auto& s : report.at("series"))
      for (const auto& r : s.at("rows")) csv.row(s.at("label").get<std::string>(), r.at("J").get<std::uint32_t>(), value(r.at("statistic")));
  } else if (report.contains("finiteness")) {
    const auto& f = report.at("finiteness");
    for (const auto& row : f.at("rows")) {
      const std::string label = "r=" + format_double(row.at("r").get<double>());
      for (std::size_t li = 0; li < f.at("levels").size(); ++li)
        csv.row(label, f.at("levels")[li].get<std::uint32_t>(), value(row.at("statistic")[li]));
    }
  }
  return csv.str();
}

int run(const std::filesystem::path& config_path, const RunOptions& opt, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (opt.seed_override) cfg.seed = *opt.seed_override;
    if (opt.workers) {
      if (*opt.workers < 1) throw ConfigError("--workers", "must be >= 1");
      omp_set_num_threads(*opt.workers);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const auto dir = resolve_output_dir(cfg, opt);
  try {
    std::filesystem::create_directories(dir);
    const auto dump_dir = dir / "fields";
    if (cfg.output.dump_fields) std::filesystem::create_directories(dump_dir);
    auto art = execute(cfg, cfg.output.dump_fields ? dump_dir : std::filesystem::path{});
    art.report["seed_overridden"] = opt.seed_override.has_value();
    art.report["workers"] = omp_get_max_threads();
    for (const auto& [name, text] : art.csv) write_text(dir / name, text);
    if (cfg.output.plotdata) write_text(dir / "plotdata.csv", emit_plotdata(art.report));
    write_text(dir / "report.json", art.report.dump(2) + "\n");
    if (art.flagged) {
      err << "error: numeric-failure rate above 5% (" << art.report.value("dropped", 0) << " of "
          << art.report.value("evaluations", 0) << " evaluations dropped); outputs written to " << dir.string() << '\n';
      return 3;
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    err << "error: config.grid: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: output dir " << dir.string() << ": " << e.what() << '\n';
    return 2;
  } catch (const NumericFailure& e) {
    err << "error: numeric failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace levylab::cli
