#pragma once

// Run configs (one JSON file per experiment), their validation, and the
// artifacts each experiment kind writes: report.json plus deterministic CSVs.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levylab/besov.hpp"
#include "levylab/boundary.hpp"
#include "levylab/error.hpp"
#include "levylab/regularity.hpp"

namespace levylab::cli {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { norms, thresholds, spacetime, boundary_poisson, boundary_heat, indices };

std::string to_string(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& s);

/// what() starts with the offending key path, e.g. "config.boundary.lambdas[2]: ...".
class ConfigError : public ValidationError {
public:
  ConfigError(const std::string& key, const std::string& message);
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

struct GridRecord {
  std::size_t n = 2;  // noise dimension; for boundary kinds the half-space dimension
  double T = 1.0;
  std::vector<std::uint32_t> levels;
  friend bool operator==(const GridRecord&, const GridRecord&) = default;
};

struct SpacetimeRecord {
  NormSpec spatial = NormSpec::isotropic(-1.0, 2.0, 2.0);
  std::vector<TimeNormSpec> paths;  // noise-level time exponents; probed at t + 1
  friend bool operator==(const SpacetimeRecord&, const SpacetimeRecord&) = default;
};

struct DatumRecord {
  std::string kind = "noise";        // "noise" or "smooth"
  std::optional<double> smoothness;  // default: -(n-1)/2 for noise, 10 for smooth
  friend bool operator==(const DatumRecord&, const DatumRecord&) = default;
};

struct BoundaryRecord {
  std::vector<std::complex<double>> lambdas{{1.0, 0.0}};  // Poisson only
  int bc_order = 0;
  double depth = 1.0;
  std::uint32_t normal_level = 12;  // 2^normal_level normal cells
  std::vector<double> r_values{0.0};
  double q = 2.0;
  int k = 0;
  NormSpec inner = NormSpec::isotropic(0.0, 2.0, 2.0);
  TimeNormSpec time{0.0, 2.0, 2.0};  // heat only: time-Besov index l = time.t
  TimeCutoff cutoff;                 // heat only
  double time_window = 1.0;          // heat only
  bool parabolic = true;             // heat only: time level 2J for space level J
  double scaling_r = 0.0;            // r of the lambda fit
  DatumRecord datum;
  bool finiteness = true;            // run the refinement sweep over grid.levels
  friend bool operator==(const BoundaryRecord&, const BoundaryRecord&) = default;
};

struct IndicesRecord {
  double xi_min = 0.1;
  double xi_max = 1e6;
  int per_decade = 40;
  friend bool operator==(const IndicesRecord&, const IndicesRecord&) = default;
};

struct OutputRecord {
  std::string dir;  // empty: flag, then LEVYLAB_OUT, then ./levylab-out
  bool plotdata = true;
  bool dump_fields = false;
  friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string rng = kRngName;
  ExperimentKind kind = ExperimentKind::thresholds;
  LevyTriplet triplet = LevyTriplet::gaussian(1.0);
  GridRecord grid;
  std::vector<NormSpec> norms;
  std::uint64_t seed = 0;
  int replicates = 100;
  Statistic statistic = Statistic::median;
  double slope_threshold = 0.05;
  int bootstrap_resamples = 1000;
  SamplerConfig sampler;
  CutoffProfile profile;
  Kernel kernel = Kernel::parallel;
  std::size_t max_cells = GridSpec::kDefaultMaxCells;
  SpacetimeRecord spacetime;
  BoundaryRecord boundary;
  IndicesRecord indices;
  OutputRecord output;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates; throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json serialize(const RunConfig& cfg);
/// Semantic checks that need the whole config (kind-specific requirements).
void validate(const RunConfig& cfg);

nlohmann::json to_json(const NormSpec& spec);
NormSpec norm_spec_from_json(const nlohmann::json& j, const std::string& path);

struct RunOptions {
  std::optional<int> workers;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed_override;
};

/// Flag, then config output.dir, then $LEVYLAB_OUT, then ./levylab-out.
std::filesystem::path resolve_output_dir(const RunConfig& cfg, const RunOptions& opt);

/// Report plus CSV contents keyed by file name. Only the report carries wall times.
struct RunArtifacts {
  nlohmann::json report;
  std::vector<std::pair<std::string, std::string>> csv;
  bool flagged = false;  // numeric-failure rate above 5%
};

/// Runs the experiment without touching the filesystem (field dumps aside,
/// which go under `dump_dir` when enabled).
RunArtifacts execute(const RunConfig& cfg, const std::filesystem::path& dump_dir = {});

/// Full run: executes and writes report.json, the CSVs and plotdata.csv.
/// Returns 0, 2 (validation) or 3 (drop rate exceeded); messages go to `err`.
int run(const std::filesystem::path& config_path, const RunOptions& opt, std::ostream& err);

/// Plot series from a report: "series,J,statistic" rows for level tables,
/// "log_abs_lambda,log_norm" for a lambda sweep. An empty report gives the
/// header only.
std::string emit_plotdata(const nlohmann::json& report);

/// Shortest round-trip text of a double; inf, -inf and nan spelled out.
std::string format_double(double v);

}  // namespace levylab::cli
