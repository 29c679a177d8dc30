// levylab run <config> [--workers N] [--out DIR] [--seed-override S]
// levylab validate <config>
// levylab plotdata <report.json> [-o FILE]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "levylab/cli.hpp"

namespace cli = levylab::cli;

int main(int argc, char** argv) {
  CLI::App app{"levylab: Levy white noise regularity experiments"};
  app.require_subcommand(1);

  std::string config;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed_override;
  auto* run = app.add_subcommand("run", "execute the experiment described by a JSON config");
  run->add_option("config", config, "config file")->required();
  run->add_option("--workers", workers, "OpenMP worker count");
  run->add_option("--out", out, "output directory (default: config output.dir, then $LEVYLAB_OUT, then ./levylab-out)");
  run->add_option("--seed-override", seed_override, "replace the config seed");

  std::string to_check;
  auto* check = app.add_subcommand("validate", "parse and validate a config without running it");
  check->add_option("config", to_check, "config file")->required();

  std::string report_path, plot_out;
  auto* plot = app.add_subcommand("plotdata", "emit plot series from a report.json");
  plot->add_option("report", report_path, "report file")->required();
  plot->add_option("-o,--output", plot_out, "write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) {
    cli::RunOptions opt;
    opt.workers = workers;
    if (out) opt.out = *out;
    opt.seed_override = seed_override;
    return cli::run(config, opt, std::cerr);
  }
  if (*check) {
    try {
      const auto cfg = cli::load_config(to_check);
      std::cout << cli::to_string(cfg.kind) << ": ok\n";
      return 0;
    } catch (const levylab::ValidationError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  std::ifstream is(report_path);
  if (!is) {
    std::cerr << "error: cannot read " << report_path << '\n';
    return 2;
  }
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: " << report_path << ": " << e.what() << '\n';
    return 2;
  }
  const auto csv = cli::emit_plotdata(report);
  if (plot_out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream os(plot_out);
    os << csv;
  }
  return 0;
}
