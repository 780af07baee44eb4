#include "wiener/functional.hpp"

#include <cmath>
#include <sstream>

#include "wiener/errors.hpp"

namespace wiener {

Observable constant_observable(double value) {
  std::ostringstream os;
  os << "constant(" << value << ")";
  return {os.str(), [value](const ManifoldPoint&) { return value; }};
}

Observable coordinate_observable(const Manifold& manifold, int index) {
  if (index < 0 || index >= manifold.embedding_dimension()) throw DomainError("coordinate index out of range");
  return {"coordinate(" + std::to_string(index) + ")",
          [manifold, index](const ManifoldPoint& x) { return manifold.embed(x)[index]; }};
}

Observable zonal_observable(const Manifold& manifold, const ManifoldPoint& center) {
  manifold.require_point(center);
  switch (manifold.kind()) {
    case ManifoldKind::Sphere2: {
      const double r2 = manifold.radius() * manifold.radius();
      return {"zonal", [center, r2](const ManifoldPoint& x) { return dot(x.coords, center.coords) / r2; }};
    }
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus:
      return {"zonal", [manifold, center](const ManifoldPoint& x) {
                double p = 1.0;
                for (int i = 0; i < manifold.dimension(); ++i) {
                  p *= std::cos((x.coords[i] - center.coords[i]) / manifold.radii()[static_cast<std::size_t>(i)]);
                }
                return p;
              }};
    case ManifoldKind::Euclidean: break;
  }
  throw DomainError("zonal observable is not defined on Euclidean space");
}

Observable distance_observable(const Manifold& manifold, const ManifoldPoint& center) {
  manifold.require_point(center);
  return {"distance", [manifold, center](const ManifoldPoint& x) { return manifold.distance(center, x); }};
}

CylinderFunctional::CylinderFunctional(PartitionPtr partition, std::string name, Rule rule)
    : partition_(std::move(partition)), name_(std::move(name)), rule_(std::move(rule)) {
  if (!partition_) throw DomainError("functional needs a partition");
}

double CylinderFunctional::operator()(const PathSkeleton& skeleton) const {
  if (skeleton.partition != partition_ && !(*skeleton.partition == *partition_)) {
    throw DomainError("functional '" + name_ + "' evaluated on a skeleton of another partition");
  }
  return rule_(skeleton);
}

CylinderFunctional constant_functional(PartitionPtr partition, double value) {
  std::ostringstream os;
  os << "constant(" << value << ")";
  return {std::move(partition), os.str(), [value](const PathSkeleton&) { return value; }};
}

CylinderFunctional endpoint_functional(PartitionPtr partition, Observable observable) {
  std::string name = "endpoint:" + observable.name;
  return {std::move(partition), std::move(name),
          [obs = std::move(observable)](const PathSkeleton& s) { return obs(s.endpoint()); }};
}

CylinderFunctional indicator_functional(PartitionPtr partition, Manifold manifold, std::vector<BallConstraint> balls) {
  std::vector<int> slots;
  for (const auto& b : balls) {
    manifold.require_point(b.center);
    slots.push_back(partition->index_of(b.time));
  }
  return {std::move(partition), "indicator",
          [manifold, balls = std::move(balls), slots](const PathSkeleton& s) {
            for (std::size_t k = 0; k < balls.size(); ++k) {
              if (manifold.distance(balls[k].center, s.at(slots[k])) > balls[k].radius) return 0.0;
            }
            return 1.0;
          }};
}

CylinderFunctional energy_functional(PartitionPtr partition, Manifold manifold) {
  return {std::move(partition), "energy", [manifold](const PathSkeleton& s) {
            double e = 0.0;
            for (int i = 1; i <= s.partition->segments(); ++i) {
              const double d = manifold.distance(s.at(i - 1), s.at(i));
              e += d * d / s.partition->step(i);
            }
            return e;
          }};
}

CylinderFunctional lift_functional(const CylinderFunctional& f, PartitionPtr finer) {
  if (!finer->refines(*f.partition())) throw DomainError("lift_functional: target does not refine the source partition");
  if (*finer == *f.partition()) return CylinderFunctional(std::move(finer), f.name(), [f](const PathSkeleton& s) {
      return f(PathSkeleton{f.partition(), s.base, s.points});
    });
  return {std::move(finer), "lift:" + f.name(), [f](const PathSkeleton& s) { return f(project(s, f.partition())); }};
}

CylinderFunctional abs_power(const CylinderFunctional& f, double p) {
  if (!(p > 0.0)) throw DomainError("abs_power: p must be positive");
  return {f.partition(), "abs_pow:" + f.name(), [f, p](const PathSkeleton& s) {
            const double v = std::abs(f(s));
            return p == 1.0 ? v : (p == 2.0 ? v * v : std::pow(v, p));
          }};
}

CylinderFunctional difference(const CylinderFunctional& a, const CylinderFunctional& b) {
  if (!(*a.partition() == *b.partition())) throw DomainError("difference: functionals live on different partitions");
  return {a.partition(), a.name() + "-" + b.name(), [a, b](const PathSkeleton& s) { return a(s) - b(s); }};
}

}  // namespace wiener
