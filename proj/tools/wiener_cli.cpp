#include <CLI11.hpp>

#include <iostream>

#include "wiener/harness.hpp"

namespace harness = wiener::harness;

int main(int argc, char** argv) {
  CLI::App app{"Brownian path measures on compact manifolds"};
  app.require_subcommand(1);

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out_dir;
  std::string format;
  bool plot = false;
  bool inverse = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"kernel", "evaluate the heat kernel and its residual checks"},
      {"sample", "draw path skeletons"},
      {"estimate", "integrate a functional at one partition"},
      {"converge", "per-level estimates and co-Cauchy distances along a chain"},
      {"stratonovich", "squared midpoint sums and exact-form residuals along a chain"},
      {"develop", "roll a flat path onto the manifold, or unroll with --inverse"},
      {"geometric", "integrals under the developed Gaussian measure along a chain"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_file, "JSON experiment file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_flag("--plot", plot, "also write an SVG plot");
    if (name == "develop") sub->add_flag("--inverse", inverse, "antidevelop a curved path file");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    harness::ExperimentConfig config = harness::load_config(config_file);
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (!format.empty()) config.output.format = format;
    if (plot) config.output.plot = true;
    if (inverse) config.path.inverse = true;
    config.output.dir = harness::resolve_output_dir(out_dir, config.output);

    const harness::RunResult result = harness::run(command, config);
    for (const auto& path : harness::write_outputs(result, command, config)) std::cout << "wrote " << path << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return harness::exit_code(e);
  }
}
