#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wiener/cylinder_measure.hpp"
#include "wiener/functional.hpp"
#include "wiener/paths.hpp"

namespace wiener {

/// Functional on continuous paths, evaluated on piecewise-geodesic paths.
struct PathFunctional {
  std::string name;
  std::function<double(const CurvedPiecewisePath&)> eval;
  /// Set when F depends on the vertices only; discretize then skips the
  /// geodesic interpolation.
  std::function<double(const PathSkeleton&)> vertex_eval;

  double operator()(const CurvedPiecewisePath& path) const { return eval(path); }
};

PathFunctional constant_path_functional(double value);
/// F(gamma) = f(gamma(1)).
PathFunctional endpoint_path_functional(Observable observable);
/// F(gamma) = sup_t d(center, gamma(t)), exact per geodesic segment.
PathFunctional sup_distance_functional(const Manifold& manifold, const ManifoldPoint& center);
/// F(gamma) = integral |gamma'|^2 dt = sum_i |v_i|^2 dt_i.
PathFunctional energy_path_functional();
/// Net number of turns around flat factor `factor`: sum_i v_i dt_i / (2 pi r).
PathFunctional winding_functional(const Manifold& manifold, int factor);

/// f_T(skeleton) := F(piecewise-geodesic interpolation of the skeleton).
/// Evaluation raises CutLocusError for antipodal consecutive points.
CylinderFunctional discretize(const PathFunctional& functional, const Manifold& manifold, PartitionPtr partition);

/// Nested partitions T_1 subset T_2 subset ... with strictly decreasing mesh.
class RefinementChain {
 public:
  explicit RefinementChain(std::vector<PartitionPtr> partitions);
  /// Uniform partitions n = 2, 4, ..., 2^K.
  static RefinementChain dyadic(int levels);
  /// Uniform partitions with the given segment counts (each divides the next).
  static RefinementChain uniform(const std::vector<int>& segments);

  const std::vector<PartitionPtr>& partitions() const { return partitions_; }
  std::size_t size() const { return partitions_.size(); }
  const PartitionPtr& operator[](std::size_t k) const { return partitions_[k]; }

 private:
  std::vector<PartitionPtr> partitions_;
};

enum class FamilyProvenance { LiftedFromRoot, DiscretizedPath, Stratonovich, Custom };

const char* to_string(FamilyProvenance p);

/// One cylinder functional per chain partition.
struct FunctionalFamily {
  RefinementChain chain;
  std::vector<CylinderFunctional> members;
  FamilyProvenance provenance = FamilyProvenance::Custom;
  std::string name;

  /// Checks that member k lives on chain partition k.
  void validate() const;
};

/// psi_R(f): members are pi*_{R T}(f) on partitions containing R and the
/// zero functional elsewhere.
FunctionalFamily embed_family(const CylinderFunctional& root, const RefinementChain& chain);
/// Members discretize(F, T_k).
FunctionalFamily discretize_family(const PathFunctional& functional, const Manifold& manifold,
                                   const RefinementChain& chain);

struct CoCauchyRow {
  int level = 0;  // k: compares member k lifted to T_{k+1} with member k+1
  int coarse_segments = 0;
  int fine_segments = 0;
  double delta = 0.0;      // estimated L^p distance
  double std_error = 0.0;  // delta-method standard error
  bool exact_zero = false; // every sampled difference was exactly 0
  EstimateReport moment;   // MC estimate of E|difference|^p
};

/// delta_k = || pi*_{T_k T_{k+1}}(f_k) - f_{k+1} ||_{L^p(mu^{T_{k+1}})}, by MC
/// on the finer measure. `measure` supplies kernel and base point.
std::vector<CoCauchyRow> co_cauchy_diagnostic(const FunctionalFamily& family, const CylinderMeasure& measure,
                                              double p, const McSettings& settings);

/// || pi*_{T_k T_K}(f_k) - f_K ||_{L^p} against the finest level K.
std::vector<CoCauchyRow> finest_level_distances(const FunctionalFamily& family, const CylinderMeasure& measure,
                                                double p, const McSettings& settings);

struct LimitTable {
  std::vector<EstimateReport> levels;
  /// levels[k+1].estimate - levels[k].estimate
  std::vector<double> differences;
  /// Value of the finest level; no rate-based extrapolation is applied.
  double extrapolated = 0.0;
};

/// Per-level seed derived from the master seed.
std::uint64_t level_seed(std::uint64_t seed, std::size_t level);

/// Integral of f_T against mu^T at each chain level. `samples` gives the
/// per-level budget (a single entry applies to every level).
LimitTable limit_estimate(const FunctionalFamily& family, const CylinderMeasure& measure,
                          const std::vector<std::size_t>& samples, std::uint64_t seed, int workers);

}  // namespace wiener
