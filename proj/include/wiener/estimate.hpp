#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wiener/rng.hpp"

namespace wiener {

/// Result of one Monte-Carlo or quadrature evaluation.
struct EstimateReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  int segments = 0;
  double mesh = 0.0;
  std::string manifold;
  std::string scheme;
  std::string functional;
  std::string method = "mc";
  std::uint64_t seed = 0;
  int workers = 1;
  double wall_time = 0.0;
  /// Samples dropped because interpolation hit a cut locus.
  std::size_t rejected = 0;
  /// rejection fraction x sup|F| estimate; zero when nothing was rejected.
  double bias_bound = 0.0;
  /// Quadrature only: |Q_G - Q_{G/2}| grid-refinement difference.
  double error_bound = 0.0;

  double ci95() const { return 1.96 * std_error; }

  friend bool operator==(const EstimateReport&, const EstimateReport&) = default;
};

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

struct SampleSummary {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
  std::size_t rejected = 0;
  double max_abs = 0.0;
};

/// Mean and standard error of the non-NaN entries; NaN marks a rejected
/// sample.
SampleSummary summarize(std::span<const double> values);

/// One worker's sample generator: returns the sample value, or NaN for a
/// rejected sample.
using SampleFn = std::function<double(Rng&)>;
/// Builds a fresh per-worker generator (each worker owns its own state).
using WorkerFactory = std::function<SampleFn()>;

/// Draws `count` samples. Worker w handles the contiguous index block
/// [w count / W, (w+1) count / W) with stream make_stream(seed, w), so the
/// returned vector is reproducible for a fixed (seed, workers) pair.
std::vector<double> draw_samples(std::size_t count, std::uint64_t seed, int workers, const WorkerFactory& factory);

}  // namespace wiener
