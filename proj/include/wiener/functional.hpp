#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wiener/manifold.hpp"
#include "wiener/partition.hpp"

namespace wiener {

/// Scalar function on M.
struct Observable {
  std::string name;
  std::function<double(const ManifoldPoint&)> eval;

  double operator()(const ManifoldPoint& x) const { return eval(x); }
};

Observable constant_observable(double value);
/// j-th coordinate of the isometric embedding.
Observable coordinate_observable(const Manifold& manifold, int index);
/// First zonal harmonic about `center`: cos(d/r) on circle and sphere, the
/// product of per-factor cosines on a flat torus. On the sphere this is
/// P_1(cos theta), whose heat-flow expectation is exp(-t / r^2).
Observable zonal_observable(const Manifold& manifold, const ManifoldPoint& center);
Observable distance_observable(const Manifold& manifold, const ManifoldPoint& center);

/// Real function on M^T for a fixed partition T.
class CylinderFunctional {
 public:
  using Rule = std::function<double(const PathSkeleton&)>;

  CylinderFunctional(PartitionPtr partition, std::string name, Rule rule);

  /// Evaluates; throws DomainError if the skeleton lives on another partition.
  double operator()(const PathSkeleton& skeleton) const;
  const PartitionPtr& partition() const { return partition_; }
  const std::string& name() const { return name_; }

 private:
  PartitionPtr partition_;
  std::string name_;
  Rule rule_;
};

CylinderFunctional constant_functional(PartitionPtr partition, double value);
/// f(x_{t_n}) for an observable f.
CylinderFunctional endpoint_functional(PartitionPtr partition, Observable observable);

/// Closed geodesic ball constraint x_t in B(center, radius) at partition time t.
struct BallConstraint {
  double time;
  ManifoldPoint center;
  double radius;
};

/// Indicator of the cylinder set {x_{t_k} in B_k for all constraints}.
CylinderFunctional indicator_functional(PartitionPtr partition, Manifold manifold, std::vector<BallConstraint> balls);
/// sum_i d(x_{t_{i-1}}, x_{t_i})^2 / (t_i - t_{i-1}).
CylinderFunctional energy_functional(PartitionPtr partition, Manifold manifold);

/// pi*_{T T'}(f) = f o pi_{T T'} on the finer partition.
CylinderFunctional lift_functional(const CylinderFunctional& f, PartitionPtr finer);
/// |f|^p.
CylinderFunctional abs_power(const CylinderFunctional& f, double p);
/// a - b; both must share a partition.
CylinderFunctional difference(const CylinderFunctional& a, const CylinderFunctional& b);

}  // namespace wiener
