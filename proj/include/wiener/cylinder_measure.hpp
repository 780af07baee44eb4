#pragma once

#include <cstdint>
#include <vector>

#include "wiener/estimate.hpp"
#include "wiener/functional.hpp"
#include "wiener/heat_kernel.hpp"
#include "wiener/partition.hpp"

namespace wiener {

class SkeletonSampler;

/// The finite-dimensional probability space (M^T, mu^T_{x0}) whose density
/// against the product Riemannian volume is
///   prod_i p_{t_i - t_{i-1}}(x_{t_{i-1}}, x_{t_i}),  x_{t_0} = x0.
class CylinderMeasure {
 public:
  CylinderMeasure(HeatKernel kernel, ManifoldPoint base, PartitionPtr partition);

  const Manifold& manifold() const { return kernel_.manifold(); }
  const HeatKernel& kernel() const { return kernel_; }
  const ManifoldPoint& base() const { return base_; }
  const PartitionPtr& partition() const { return partition_; }

  double density(const PathSkeleton& skeleton) const;
  /// Per-worker sampler holding one TransitionSampler per distinct step.
  SkeletonSampler sampler() const;
  PathSkeleton sample(Rng& rng) const;

  /// Same kernel and base point on another partition.
  CylinderMeasure with_partition(PartitionPtr partition) const;

 private:
  HeatKernel kernel_;
  ManifoldPoint base_;
  PartitionPtr partition_;
};

/// Sequential Markov-chain draws y_i ~ p_{dt_i}(y_{i-1}, .), y_0 = x0.
class SkeletonSampler {
 public:
  explicit SkeletonSampler(const CylinderMeasure& measure);
  PathSkeleton sample(Rng& rng);

 private:
  PartitionPtr partition_;
  ManifoldPoint base_;
  std::vector<TransitionSampler> samplers_;
  std::vector<int> slot_;  // segment -> sampler index
};

struct McSettings {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// Monte-Carlo estimate of the integral of f against mu^T. Samples whose
/// evaluation raises CutLocusError are dropped and counted.
EstimateReport expectation_mc(const CylinderMeasure& measure, const CylinderFunctional& f, const McSettings& settings);

/// Tensor-trapezoid integral of f times the density over the grid of `grid`
/// nodes per circle factor anchored at the base point (flat-factor manifolds
/// only, at most 4 segments, grid^(m n) <= 1e8). grid = 0 picks the largest
/// even size <= 256 with grid^(m n) <= 4e6. error_bound is the difference to
/// the half-resolution grid. Nodes with an antipodal step take the mean of
/// the one-sided limits of f; nodes where that also fails are dropped and
/// counted in `rejected`, with their weight times max|f| in bias_bound.
EstimateReport expectation_quadrature(const CylinderMeasure& measure, const CylinderFunctional& f, int grid = 0);

/// Default grid size used by expectation_quadrature for m n dimensions.
int default_quadrature_grid(int dimensions);

}  // namespace wiener
