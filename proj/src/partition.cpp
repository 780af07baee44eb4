#include "wiener/partition.hpp"

#include <algorithm>
#include <cmath>

#include "wiener/errors.hpp"

namespace wiener {

namespace {
constexpr double kTimeMatch = 1e-13;
}

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw DomainError("partition needs at least one segment");
  if (times_.front() != 0.0) throw DomainError("partition must start at t = 0");
  if (times_.back() != 1.0) throw DomainError("partition must end at t = 1");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw DomainError("partition times must be strictly increasing");
  }
}

Partition Partition::uniform(int segments) {
  if (segments < 1) throw DomainError("uniform partition needs n >= 1");
  std::vector<double> t(static_cast<std::size_t>(segments) + 1);
  for (int i = 0; i <= segments; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / segments;
  t.back() = 1.0;
  return Partition(std::move(t));
}

double Partition::mesh() const {
  double m = 0.0;
  for (int i = 1; i <= segments(); ++i) m = std::max(m, step(i));
  return m;
}

std::vector<int> Partition::positions_of(const Partition& coarse) const {
  std::vector<int> pos;
  pos.reserve(coarse.times_.size());
  std::size_t j = 0;
  for (double t : coarse.times_) {
    while (j < times_.size() && times_[j] < t - kTimeMatch) ++j;
    if (j == times_.size() || std::abs(times_[j] - t) > kTimeMatch) {
      throw DomainError("partitions are not nested");
    }
    pos.push_back(static_cast<int>(j));
  }
  return pos;
}

int Partition::index_of(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t - kTimeMatch);
  if (it == times_.end() || std::abs(*it - t) > kTimeMatch) throw DomainError("time is not in the partition");
  return static_cast<int>(it - times_.begin());
}

bool Partition::refines(const Partition& coarse) const {
  try {
    positions_of(coarse);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

PathSkeleton project(const PathSkeleton& skeleton, const PartitionPtr& target) {
  if (!target) throw DomainError("project: null partition");
  if (target == skeleton.partition || *target == *skeleton.partition) {
    return PathSkeleton{target, skeleton.base, skeleton.points};
  }
  const std::vector<int> pos = skeleton.partition->positions_of(*target);
  PathSkeleton out{target, skeleton.base, {}};
  out.points.reserve(pos.size() - 1);
  for (std::size_t k = 1; k < pos.size(); ++k) out.points.push_back(skeleton.at(pos[k]));
  return out;
}

}  // namespace wiener
