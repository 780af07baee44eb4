#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "wiener/cylinder_measure.hpp"
#include "wiener/limit_scheme.hpp"
#include "wiener/paths.hpp"

namespace wiener {

/// sum_i |d alpha_i|^2 / dt_i.
double energy_flat(const FlatPiecewisePath& path);
/// sum_i |v_i|^2 dt_i.
double energy_curved(const Manifold& manifold, const CurvedPiecewisePath& path);

/// Rolls a flat path onto M starting at x0 with the standard frame: each
/// increment is mapped through the current frame, the geodesic is shot, and
/// the frame is transported along it. The result stores the frame at every
/// vertex.
CurvedPiecewisePath develop(const Manifold& manifold, const FlatPiecewisePath& path, const ManifoldPoint& x0);
/// Inverse of develop. Frames are rebuilt from the standard frame at the
/// start point; any frames stored in `path` are ignored.
FlatPiecewisePath antidevelop(const Manifold& manifold, const CurvedPiecewisePath& path);

/// Gram residual max |<e_a, e_b> - delta_ab| over all stored frames.
double frame_orthonormality_residual(const Manifold& manifold, const CurvedPiecewisePath& path);

/// prod_i (2 pi dt_i)^{-m/2} exp(-|d alpha_i|^2 / (2 dt_i)).
double flat_gaussian_density(const FlatPiecewisePath& path);
double flat_gaussian_log_density(const FlatPiecewisePath& path);
/// Independent N(0, dt_i I_m) increments.
FlatPiecewisePath sample_flat_gaussian(const PartitionPtr& partition, int dimension, Rng& rng);

/// Samples the geometric measure nu_T as develop(sample_flat_gaussian).
class GeometricMeasureSampler {
 public:
  GeometricMeasureSampler(Manifold manifold, ManifoldPoint base, PartitionPtr partition);

  const Manifold& manifold() const { return manifold_; }
  const ManifoldPoint& base() const { return base_; }
  const PartitionPtr& partition() const { return partition_; }

  CurvedPiecewisePath sample(Rng& rng) const;

 private:
  Manifold manifold_;
  ManifoldPoint base_;
  PartitionPtr partition_;
};

/// Functional on flat piecewise-linear paths in R^m.
struct FlatFunctional {
  std::string name;
  std::function<double(const FlatPiecewisePath&)> eval;

  double operator()(const FlatPiecewisePath& path) const { return eval(path); }
};

/// f on flat paths -> f o antidevelop on H_T(M).
PathFunctional transfer(const Manifold& manifold, FlatFunctional f);
/// F on H_T(M) -> F o develop(., x0) on flat paths.
FlatFunctional inverse_transfer(const Manifold& manifold, const ManifoldPoint& x0, PathFunctional f);

FlatFunctional flat_energy_functional();

/// MC integral of F against nu_T.
EstimateReport geometric_expectation_mc(const GeometricMeasureSampler& sampler, const PathFunctional& f,
                                        const McSettings& settings);

struct GeometricLimitTable {
  std::vector<EstimateReport> geometric;
  /// Same functional under the cylinder scheme; empty unless requested.
  std::vector<EstimateReport> cylinder;
  /// (geometric - cylinder) / joint standard error per level.
  std::vector<double> joint_z;
};

/// Per-level integrals of F against nu_T along the chain (at least three
/// levels). With `cross_check` the discretized cylinder scheme runs on the
/// same chain from an independent seed stream.
GeometricLimitTable geometric_limit_estimate(const PathFunctional& f, const HeatKernel& kernel, const ManifoldPoint& x0,
                                             const RefinementChain& chain, const std::vector<std::size_t>& samples,
                                             std::uint64_t seed, int workers, bool cross_check);

/// Plain-text path files: "manifold <kind> <params...>", "kind flat|curved",
/// "base <coords>", "times <t_0 ... t_n>", "vertices", then one vertex per
/// line. Flat files hold alpha(t_0..t_n); curved files hold gamma(t_0..t_n).
void write_flat_path(std::ostream& out, const Manifold& manifold, const ManifoldPoint& base, const FlatPiecewisePath& path);
/// Throws DomainError if a segment is not minimizing (vertices alone would
/// not determine it).
void write_curved_path(std::ostream& out, const Manifold& manifold, const CurvedPiecewisePath& path);

struct PathFile {
  Manifold manifold;
  ManifoldPoint base;
  bool curved = false;
  FlatPiecewisePath flat;
  CurvedPiecewisePath curve;
};

/// Throws ConfigError on malformed content.
PathFile read_path_file(std::istream& in);

/// "circle 1", "torus 1 2", "sphere 1", "euclidean 3".
std::string manifold_spec(const Manifold& manifold);
Manifold parse_manifold_spec(const std::string& spec);

}  // namespace wiener
