#include "wiener/paths.hpp"

#include <algorithm>

#include "wiener/errors.hpp"

namespace wiener {

PathSkeleton CurvedPiecewisePath::skeleton() const {
  return PathSkeleton{partition, vertices.front(), std::vector<ManifoldPoint>(vertices.begin() + 1, vertices.end())};
}

CurvedPiecewisePath interpolate(const Manifold& manifold, const PathSkeleton& skeleton) {
  const int n = skeleton.partition->segments();
  if (static_cast<int>(skeleton.points.size()) != n) throw DomainError("interpolate: wrong point count");
  CurvedPiecewisePath path;
  path.partition = skeleton.partition;
  path.vertices.reserve(static_cast<std::size_t>(n) + 1);
  path.velocities.reserve(static_cast<std::size_t>(n));
  path.vertices.push_back(skeleton.base);
  for (int i = 1; i <= n; ++i) {
    const ManifoldPoint& a = skeleton.at(i - 1);
    const ManifoldPoint& b = skeleton.at(i);
    TangentVector v = manifold.log_map(a, b);
    v.components *= 1.0 / skeleton.partition->step(i);
    path.velocities.push_back(std::move(v));
    path.vertices.push_back(b);
  }
  return path;
}

ManifoldPoint evaluate(const Manifold& manifold, const CurvedPiecewisePath& path, double t) {
  const auto& times = path.partition->times();
  if (t <= 0.0) return path.vertices.front();
  if (t >= 1.0) return path.vertices.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());  // segment index, t in [t_{i-1}, t_i)
  TangentVector v = path.velocities[i - 1];
  v.components *= t - times[i - 1];
  return manifold.exp_map(path.vertices[i - 1], v);
}

}  // namespace wiener
