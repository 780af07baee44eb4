#pragma once

#include <memory>
#include <vector>

#include "wiener/manifold.hpp"

namespace wiener {

/// Time grid 0 = t_0 < t_1 < ... < t_n = 1.
class Partition {
 public:
  /// Validates: at least two times, t_0 = 0, t_n = 1, strictly increasing.
  explicit Partition(std::vector<double> times);
  static Partition uniform(int segments);

  const std::vector<double>& times() const { return times_; }
  int segments() const { return static_cast<int>(times_.size()) - 1; }
  /// t_i - t_{i-1}, i in 1..n.
  double step(int i) const { return times_[static_cast<std::size_t>(i)] - times_[static_cast<std::size_t>(i - 1)]; }
  double mesh() const;

  /// True when every time of `coarse` is also a time of this partition.
  bool refines(const Partition& coarse) const;
  /// Index of time t; throws DomainError if t is not a partition time.
  int index_of(double t) const;
  /// Index in this partition of each time of `coarse` (including t_0).
  /// Throws DomainError if `coarse` is not contained in this partition.
  std::vector<int> positions_of(const Partition& coarse) const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.times_ == b.times_; }

 private:
  std::vector<double> times_;
};

using PartitionPtr = std::shared_ptr<const Partition>;

inline PartitionPtr make_partition(Partition p) { return std::make_shared<const Partition>(std::move(p)); }

/// One manifold point per time in the partition other than t_0; the base
/// point anchors t_0 and is carried along for functionals that need it.
struct PathSkeleton {
  PartitionPtr partition;
  ManifoldPoint base;
  std::vector<ManifoldPoint> points;

  /// Point at partition index i in 0..n (index 0 is the base point).
  const ManifoldPoint& at(int i) const { return i == 0 ? base : points[static_cast<std::size_t>(i - 1)]; }
  const ManifoldPoint& endpoint() const { return points.back(); }
};

/// Restriction pi_{T T'}: keeps the points of `skeleton` at the times of
/// `target`. Throws DomainError if target is not contained in the skeleton's
/// partition.
PathSkeleton project(const PathSkeleton& skeleton, const PartitionPtr& target);

}  // namespace wiener
