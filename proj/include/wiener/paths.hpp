#pragma once

#include <vector>

#include "wiener/manifold.hpp"
#include "wiener/partition.hpp"

namespace wiener {

/// Element of H_T(R^m): continuous, linear between partition times,
/// alpha(0) = 0. Stored by its vertices alpha(t_0..t_n).
struct FlatPiecewisePath {
  PartitionPtr partition;
  std::vector<Vec> vertices;

  int dimension() const { return vertices.front().size(); }
  /// alpha(t_i) - alpha(t_{i-1}).
  Vec increment(int i) const {
    return vertices[static_cast<std::size_t>(i)] - vertices[static_cast<std::size_t>(i - 1)];
  }
  /// Constant velocity on segment i.
  Vec velocity(int i) const { return increment(i) * (1.0 / partition->step(i)); }
};

/// Element of H_T(M): geodesic on each [t_{i-1}, t_i],
///   gamma(t) = exp(gamma(t_{i-1}), (t - t_{i-1}) v_i).
/// `frames` holds the transported orthonormal frame at each vertex when the
/// path came out of development; interpolated paths leave it empty.
struct CurvedPiecewisePath {
  PartitionPtr partition;
  std::vector<ManifoldPoint> vertices;
  std::vector<TangentVector> velocities;
  std::vector<std::vector<TangentVector>> frames;

  const ManifoldPoint& start() const { return vertices.front(); }
  const ManifoldPoint& end() const { return vertices.back(); }
  /// Skeleton of the vertex values (drops t_0).
  PathSkeleton skeleton() const;
};

/// Piecewise-geodesic interpolation of a skeleton: v_i = log(x_{i-1}, x_i) / dt_i.
/// Throws CutLocusError when consecutive points are at each other's cut locus.
CurvedPiecewisePath interpolate(const Manifold& manifold, const PathSkeleton& skeleton);

/// Point of the path at time t in [0, 1].
ManifoldPoint evaluate(const Manifold& manifold, const CurvedPiecewisePath& path, double t);

}  // namespace wiener
