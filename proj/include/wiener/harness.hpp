#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wiener/development.hpp"
#include "wiener/limit_scheme.hpp"
#include "wiener/stratonovich.hpp"

namespace wiener::harness {

using nlohmann::json;

/// One of: uniform n, explicit times, dyadic chain of K levels, or a list of
/// uniform segment counts forming a chain.
struct PartitionSpec {
  enum class Kind { Uniform, Times, Dyadic, Levels };
  Kind kind = Kind::Uniform;
  int segments = 4;
  std::vector<double> times;
  int levels = 4;
  std::vector<int> level_segments;

  /// The partition of a single-level run; the finest level for chains.
  PartitionPtr single() const;
  /// Chain for multi-level runs; a single partition forms a one-level chain.
  RefinementChain chain() const;
};

struct FunctionalSpec {
  /// constant | zonal | coordinate | distance | sup_distance | energy | winding
  std::string name = "zonal";
  double value = 1.0;
  int index = 0;
  std::optional<std::vector<double>> center;
};

struct FieldSpec {
  /// rotation | gradient | constant | zero
  std::string name = "rotation";
  std::vector<double> coefficients;
};

struct KernelSpec {
  double tolerance = 1e-12;
  double t = 0.1;
  std::optional<std::vector<double>> x;
  std::optional<std::vector<double>> y;
  int nodes = 2048;
};

struct OutputSpec {
  std::string dir = "results";
  /// csv | json | both
  std::string format = "both";
  bool plot = false;
};

struct PathSpec {
  std::string input;
  std::string output;
  bool inverse = false;
};

struct ExperimentConfig {
  Manifold manifold = Manifold::circle(1.0);
  std::optional<std::vector<double>> base_point;
  PartitionSpec partition;
  FunctionalSpec functional;
  FieldSpec field;
  /// geometric | cylinder | both
  std::string scheme = "cylinder";
  /// mc | quadrature
  std::string method = "mc";
  std::vector<std::size_t> samples{10000};
  std::uint64_t seed = 1;
  int workers = 1;
  double p = 2.0;
  /// 0 picks the default quadrature grid.
  int grid = 0;
  KernelSpec kernel;
  OutputSpec output;
  PathSpec path;
};

/// Validates every stanza; unknown keys and wrong types raise ConfigError.
ExperimentConfig parse_config(const json& document);
ExperimentConfig load_config(const std::string& file);

ManifoldPoint base_point(const ExperimentConfig& config);
PathFunctional make_path_functional(const ExperimentConfig& config);
AmbientField make_field(const ExperimentConfig& config);

json report_to_json(const EstimateReport& report);
EstimateReport report_from_json(const json& record);

/// Compact partition label: "uniform:n" for uniform grids, otherwise the
/// times joined by ';'.
std::string partition_label(const Partition& partition);

std::string csv_header();
std::string csv_row(const EstimateReport& report, int level, const std::string& partition);

struct PlotSeries {
  std::string label;
  std::vector<double> mesh;
  std::vector<double> estimate;
  std::vector<double> half_width;
};

/// Estimate with 95% error bars against mesh on a log10 x axis. An optional
/// horizontal reference line is drawn dashed.
std::string render_svg(const std::string& title, const std::vector<PlotSeries>& series,
                       std::optional<double> reference = std::nullopt);

struct RunResult {
  json record;
  std::string csv;
  std::string svg;
  /// Text payload written instead of CSV/JSON (path files).
  std::string text;
};

RunResult run_kernel(const ExperimentConfig& config);
RunResult run_sample(const ExperimentConfig& config);
RunResult run_estimate(const ExperimentConfig& config);
RunResult run_converge(const ExperimentConfig& config);
RunResult run_stratonovich(const ExperimentConfig& config);
RunResult run_develop(const ExperimentConfig& config);
RunResult run_geometric(const ExperimentConfig& config);

/// Dispatches by subcommand name; throws ConfigError for unknown names.
RunResult run(const std::string& command, const ExperimentConfig& config);

/// Output directory: `flag` if non-empty, else $WIENER_OUTPUT_DIR if set,
/// else the configured directory.
std::string resolve_output_dir(const std::string& flag, const OutputSpec& spec);

/// Writes <command>.json / <command>.csv / <command>.svg as selected, or the
/// text payload to config.path.output. Returns the written paths.
std::vector<std::string> write_outputs(const RunResult& result, const std::string& command,
                                       const ExperimentConfig& config);

/// The record with every "wall_time" member removed, dumped canonically.
std::string numeric_fingerprint(const json& record);

/// 2 config, 3 numeric, 4 I/O, 1 otherwise.
int exit_code(const std::exception& error);

}  // namespace wiener::harness
