#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "levylab/cli.hpp"

using namespace levylab;
using namespace levylab::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("levylab_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json small_norms() {
  return json::parse(R"({
    "schema_version": 1, "rng": "philox4x32-10", "kind": "norms",
    "triplet": {"gamma": 0, "sigma2": 1},
    "grid": {"n": 2, "T": 1, "levels": [3, 4]},
    "norms": [{"type": "isotropic", "s": -1.25, "p": 2, "q": 2}, {"type": "mixed", "s_bar": [-0.6, -0.6], "p": 2}],
    "seed": 7, "replicates": 6, "bootstrap_resamples": 50
  })");
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  c.kind = ExperimentKind::boundary_poisson;
  c.triplet = LevyTriplet{0.5, 2.0, LevyMeasure::atoms({{1.0, 0.5}, {-1.0, 0.5}})};
  c.grid = {2, 0.5, {4, 5, 6}};
  c.norms = {NormSpec::isotropic(-0.75, 3.0, INFINITY, 1.5), NormSpec::mixed({-0.5, -0.25}, {1, 1}, 2.0)};
  c.seed = 0xFFFF'FFFF'FFFF'FFFFull;
  c.replicates = 17;
  c.statistic = Statistic::mean_pth_power;
  c.kernel = Kernel::reference;
  c.spacetime.paths = {{-0.5, 2.0, INFINITY}, {-0.5, 2.0, 2.0}};
  c.boundary.lambdas = {{1.0, 0.0}, {4.0, 0.5}};
  c.boundary.r_values = {-0.5, 0.0, 1.0};
  c.boundary.datum.smoothness = 3.0;
  c.output.dir = "somewhere";
  validate(c);
  const auto j = serialize(c);
  const auto back = parse_config(j);
  CHECK(back == c);
  CHECK(serialize(back) == j);
  // through text as well
  CHECK(parse_config(json::parse(j.dump())) == c);

  const auto small = parse_config(small_norms());
  CHECK(parse_config(serialize(small)) == small);
}

TEST_CASE("config validation names the offending key") {
  auto j = small_norms();
  j["extra"] = 1;
  CHECK(error_of(j).rfind("config.extra: unknown key", 0) == 0);

  j = small_norms();
  j["norms"][1]["sbar"] = 1;
  CHECK(error_of(j).rfind("config.norms[1].sbar", 0) == 0);

  j = small_norms();
  j["replicates"] = 0;
  CHECK(error_of(j).rfind("config.replicates", 0) == 0);
  j["replicates"] = nullptr;
  CHECK(error_of(j).rfind("config.replicates", 0) == 0);

  j = small_norms();
  j.erase("schema_version");
  CHECK(error_of(j).rfind("config.schema_version", 0) == 0);
  j = small_norms();
  j["schema_version"] = 2;
  CHECK(error_of(j).rfind("config.schema_version", 0) == 0);
  j = small_norms();
  j["rng"] = "mt19937";
  CHECK(error_of(j).rfind("config.rng", 0) == 0);

  j = small_norms();
  j["kind"] = "thresholds";  // two levels cannot carry a verdict
  CHECK(error_of(j).rfind("config.grid.levels", 0) == 0);

  j = small_norms();
  j["triplet"]["nu"] = {{"kind", "alpha_stable"}, {"params", {{"alpha", 2.5}}}};
  CHECK(error_of(j).rfind("config.triplet", 0) == 0);

  j = small_norms();
  j["kind"] = "boundary-poisson";
  j["boundary"] = {{"lambdas", {1.0, -2.0}}, {"finiteness", false}};
  const auto msg = error_of(j);
  CHECK(msg.rfind("config.boundary.lambdas[1]", 0) == 0);
  CHECK(msg.find("cut (-inf, 0]") != std::string::npos);
  j["boundary"]["lambdas"] = json::array({1.0, json::array({-2.0, 0.5})});
  // r = 0 sits on the finiteness boundary of a noise datum, so the lambda fit is refused
  CHECK(error_of(j).rfind("config.boundary.scaling_r", 0) == 0);
  j["boundary"]["scaling_r"] = 0.5;
  CHECK(error_of(j) == "");
}

TEST_CASE("run: exit codes and artifacts") {
  const auto dir = scratch_dir("run");
  std::ostringstream err;

  auto j = small_norms();
  j["kind"] = "boundary-poisson";
  j["boundary"] = {{"lambdas", {1.0, 0.0}}};
  CHECK(run(write_config(dir, j), {}, err) == 2);
  CHECK(err.str().find("cut") != std::string::npos);

  j = small_norms();
  j["replicates"] = "";
  CHECK(run(write_config(dir, j), {}, err) == 2);
  CHECK(run(dir / "missing.json", {}, err) == 2);

  RunOptions opt;
  opt.out = dir / "a";
  CHECK(run(write_config(dir, small_norms()), opt, err) == 0);
  for (const char* f : {"report.json", "norms.csv", "levels.csv", "plotdata.csv"}) CHECK(fs::exists(dir / "a" / f));
  CHECK_FALSE(fs::exists(dir / "a" / "verdicts.csv"));
  const auto report = json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report.at("kind") == "norms");
  CHECK(report.at("series").size() == 2);
  CHECK(report.contains("wall_seconds"));
  CHECK(slurp(dir / "a" / "levels.csv").rfind("series,J,statistic,ci_lo,ci_hi,used,dropped\n", 0) == 0);
  // the Gaussian oracle rides along in the report
  CHECK(report.at("series")[0].at("rows")[0].contains("oracle_mean_pth_power"));

  // same config, other worker count and directory: identical CSVs
  opt.out = dir / "b";
  opt.workers = 2;
  CHECK(run(write_config(dir, small_norms()), opt, err) == 0);
  for (const char* f : {"norms.csv", "levels.csv", "plotdata.csv"}) CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));

  opt.out = dir / "c";
  opt.seed_override = 8;
  CHECK(run(write_config(dir, small_norms()), opt, err) == 0);
  CHECK(slurp(dir / "a" / "norms.csv") != slurp(dir / "c" / "norms.csv"));
  CHECK(json::parse(slurp(dir / "c" / "report.json")).at("seed") == 8);

  // every draw fails: the small-jump variance of alpha = 1.999 is out of reach of the quadrature
  j = small_norms();
  j["triplet"]["nu"] = {{"kind", "density"}, {"params", {{"family", "power"}, {"c", 1.0}, {"alpha", 1.999}, {"tail_index", 1.0}}}};
  opt = {};
  opt.out = dir / "d";
  CHECK(run(write_config(dir, j), opt, err) == 3);
  CHECK(json::parse(slurp(dir / "d" / "report.json")).at("flagged") == true);
  fs::remove_all(dir);
}

TEST_CASE("output directory precedence") {
  RunConfig c = parse_config(small_norms());
  RunOptions opt;
  ::setenv("LEVYLAB_OUT", "/tmp/from-env", 1);
  CHECK(resolve_output_dir(c, opt) == "/tmp/from-env");
  c.output.dir = "from-config";
  CHECK(resolve_output_dir(c, opt) == "from-config");
  opt.out = "from-flag";
  CHECK(resolve_output_dir(c, opt) == "from-flag");
  ::unsetenv("LEVYLAB_OUT");
  c.output.dir.clear();
  opt.out.reset();
  CHECK(resolve_output_dir(c, opt) == "levylab-out");
}

TEST_CASE("plotdata") {
  CHECK(emit_plotdata(json::object()) == "series,J,statistic\n");
  const json sweep = {{"lambda_scaling", {{"lambdas", {1.0, 4.0}}, {"norms", {2.0, 1.0}}}}};
  CHECK(emit_plotdata(sweep) == "log_abs_lambda,log_norm\n0,0.6931471805599453\n1.3862943611198906,0\n");
  const json thr = {{"series",
                     {{{"label", "a"}, {"rows", {{{"J", 5}, {"statistic", 1.5}}, {{"J", 6}, {"statistic", nullptr}}}}},
                      {{"label", "b"}, {"rows", {{{"J", 5}, {"statistic", 2.0}}}}}}}};
  CHECK(emit_plotdata(thr) == "series,J,statistic\na,5,1.5\na,6,nan\nb,5,2\n");
}

TEST_CASE("small boundary and index runs") {
  auto j = json::parse(R"({
    "schema_version": 1, "rng": "philox4x32-10", "kind": "boundary-poisson",
    "grid": {"n": 2, "T": 1, "levels": [4, 5, 6]},
    "seed": 3, "replicates": 2,
    "boundary": {"lambdas": [1, 4, 16], "normal_level": 9, "r_values": [-1, 0, 1], "datum": {"kind": "smooth"}}
  })");
  auto art = execute(parse_config(j));
  CHECK(art.report.at("lambda_scaling").at("norms").size() == 3);
  CHECK(art.report.contains("finiteness"));
  const auto& diag = art.csv.front();
  CHECK(diag.first == "diagnostics.csv");
  CHECK(diag.second.rfind("lambda,r,q,k,t0,j,norm,finite_flag\n1,-1,2,0,0,0,", 0) == 0);
  CHECK(diag.second.find(",0\n") != std::string::npos);  // r = -1 flagged infinite
  CHECK(emit_plotdata(art.report).rfind("log_abs_lambda,log_norm\n", 0) == 0);

  j["kind"] = "boundary-heat";
  j["boundary"] = {{"normal_level", 7}, {"r_values", {0.0, 3.0}}, {"finiteness", false}};
  j["grid"]["levels"] = {3};
  art = execute(parse_config(j));
  CHECK(art.report.at("profile").size() == 1);
  CHECK(art.csv.front().second.find("\nna,3,2,0,0,0,") != std::string::npos);

  const auto idx = json::parse(R"({
    "schema_version": 1, "rng": "philox4x32-10", "kind": "indices",
    "triplet": {"nu": {"kind": "alpha_stable", "params": {"alpha": 1.5}}}
  })");
  art = execute(parse_config(idx));
  CHECK(art.report.at("indices").at("beta_upper").get<double>() == doctest::Approx(1.5).epsilon(0.05));
}
