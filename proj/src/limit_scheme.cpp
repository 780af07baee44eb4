#include "wiener/limit_scheme.hpp"

#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "wiener/errors.hpp"

namespace wiener {

PathFunctional constant_path_functional(double value) {
  std::ostringstream os;
  os << "constant(" << value << ")";
  return {os.str(), [value](const CurvedPiecewisePath&) { return value; }, [value](const PathSkeleton&) { return value; }};
}

PathFunctional endpoint_path_functional(Observable observable) {
  std::string name = "endpoint:" + observable.name;
  return {std::move(name), [obs = observable](const CurvedPiecewisePath& p) { return obs(p.end()); },
          [obs = observable](const PathSkeleton& s) { return obs(s.endpoint()); }};
}

PathFunctional sup_distance_functional(const Manifold& manifold, const ManifoldPoint& center) {
  manifold.require_point(center);
  return {"sup_distance", [manifold, center](const CurvedPiecewisePath& p) {
            double best = 0.0;
            for (int i = 1; i <= p.partition->segments(); ++i) {
              TangentVector v = p.velocities[static_cast<std::size_t>(i - 1)];
              v.components *= p.partition->step(i);
              best = std::max(best, manifold.sup_distance_along_geodesic(center, p.vertices[static_cast<std::size_t>(i - 1)], v));
            }
            return best;
          }, nullptr};
}

PathFunctional energy_path_functional() {
  return {"energy", [](const CurvedPiecewisePath& p) {
            double e = 0.0;
            for (int i = 1; i <= p.partition->segments(); ++i) {
              const Vec& v = p.velocities[static_cast<std::size_t>(i - 1)].components;
              e += dot(v, v) * p.partition->step(i);
            }
            return e;
          }, nullptr};
}

PathFunctional winding_functional(const Manifold& manifold, int factor) {
  if (manifold.kind() != ManifoldKind::Circle && manifold.kind() != ManifoldKind::FlatTorus) {
    throw DomainError("winding functional needs a flat circle factor");
  }
  if (factor < 0 || factor >= manifold.dimension()) throw DomainError("winding factor out of range");
  const double circumference = 2.0 * std::numbers::pi * manifold.radii()[static_cast<std::size_t>(factor)];
  return {"winding(" + std::to_string(factor) + ")", [factor, circumference](const CurvedPiecewisePath& p) {
            double s = 0.0;
            for (int i = 1; i <= p.partition->segments(); ++i) {
              s += p.velocities[static_cast<std::size_t>(i - 1)].components[factor] * p.partition->step(i);
            }
            return s / circumference;
          }, nullptr};
}

CylinderFunctional discretize(const PathFunctional& functional, const Manifold& manifold, PartitionPtr partition) {
  if (functional.vertex_eval) return {std::move(partition), functional.name, functional.vertex_eval};
  return {std::move(partition), functional.name,
          [functional, manifold](const PathSkeleton& s) { return functional(interpolate(manifold, s)); }};
}

RefinementChain::RefinementChain(std::vector<PartitionPtr> partitions) : partitions_(std::move(partitions)) {
  if (partitions_.empty()) throw DomainError("refinement chain is empty");
  for (std::size_t k = 1; k < partitions_.size(); ++k) {
    if (!partitions_[k]->refines(*partitions_[k - 1])) throw DomainError("refinement chain is not nested");
    if (!(partitions_[k]->mesh() < partitions_[k - 1]->mesh())) throw DomainError("refinement chain mesh must decrease");
  }
}

RefinementChain RefinementChain::dyadic(int levels) {
  if (levels < 1 || levels > 20) throw DomainError("dyadic chain needs 1..20 levels");
  std::vector<int> n;
  for (int k = 1; k <= levels; ++k) n.push_back(1 << k);
  return uniform(n);
}

RefinementChain RefinementChain::uniform(const std::vector<int>& segments) {
  std::vector<PartitionPtr> parts;
  for (int n : segments) parts.push_back(make_partition(Partition::uniform(n)));
  return RefinementChain(std::move(parts));
}

const char* to_string(FamilyProvenance p) {
  switch (p) {
    case FamilyProvenance::LiftedFromRoot: return "lifted";
    case FamilyProvenance::DiscretizedPath: return "discretized";
    case FamilyProvenance::Stratonovich: return "stratonovich";
    case FamilyProvenance::Custom: return "custom";
  }
  return "?";
}

void FunctionalFamily::validate() const {
  if (members.size() != chain.size()) throw DomainError("family size differs from chain length");
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!(*members[k].partition() == *chain[k])) throw DomainError("family member does not match its chain slot");
  }
}

FunctionalFamily embed_family(const CylinderFunctional& root, const RefinementChain& chain) {
  FunctionalFamily fam{chain, {}, FamilyProvenance::LiftedFromRoot, "embed:" + root.name()};
  for (const auto& part : chain.partitions()) {
    if (part->refines(*root.partition())) {
      fam.members.push_back(lift_functional(root, part));
    } else {
      fam.members.push_back(constant_functional(part, 0.0));
    }
  }
  return fam;
}

FunctionalFamily discretize_family(const PathFunctional& functional, const Manifold& manifold,
                                   const RefinementChain& chain) {
  FunctionalFamily fam{chain, {}, FamilyProvenance::DiscretizedPath, functional.name};
  for (const auto& part : chain.partitions()) fam.members.push_back(discretize(functional, manifold, part));
  return fam;
}

std::uint64_t level_seed(std::uint64_t seed, std::size_t level) {
  return splitmix64(seed ^ splitmix64(0x5bd1e995ull + level));
}

namespace {

CoCauchyRow distance_row(const CylinderFunctional& coarse, const CylinderFunctional& fine,
                         const CylinderMeasure& measure, double p, const McSettings& settings, int level) {
  const CylinderMeasure fine_measure = measure.with_partition(fine.partition());
  const CylinderFunctional lifted = lift_functional(coarse, fine.partition());
  const CylinderFunctional diff = difference(lifted, fine);
  // Track whether the integrand vanished identically on every sample.
  auto all_zero = std::make_shared<std::atomic<bool>>(true);
  const CylinderFunctional moment_fn(fine.partition(), "abs_pow:" + diff.name(), [diff, p, all_zero](const PathSkeleton& s) {
    const double v = std::abs(diff(s));
    if (v != 0.0) all_zero->store(false);
    return p == 1.0 ? v : std::pow(v, p);
  });
  CoCauchyRow row;
  row.level = level;
  row.coarse_segments = coarse.partition()->segments();
  row.fine_segments = fine.partition()->segments();
  row.moment = expectation_mc(fine_measure, moment_fn, settings);
  row.exact_zero = all_zero->load();
  const double mean = row.moment.estimate;
  row.delta = mean > 0.0 ? std::pow(mean, 1.0 / p) : 0.0;
  row.std_error = mean > 0.0 ? row.moment.std_error / (p * std::pow(mean, (p - 1.0) / p)) : 0.0;
  return row;
}

}  // namespace

std::vector<CoCauchyRow> co_cauchy_diagnostic(const FunctionalFamily& family, const CylinderMeasure& measure,
                                              double p, const McSettings& settings) {
  family.validate();
  if (family.chain.size() < 2) throw DomainError("co_cauchy_diagnostic needs at least two levels");
  if (!(p >= 1.0)) throw DomainError("co_cauchy_diagnostic: p must be >= 1");
  std::vector<CoCauchyRow> rows;
  for (std::size_t k = 0; k + 1 < family.chain.size(); ++k) {
    McSettings s = settings;
    s.seed = level_seed(settings.seed, k);
    rows.push_back(distance_row(family.members[k], family.members[k + 1], measure, p, s, static_cast<int>(k)));
  }
  return rows;
}

std::vector<CoCauchyRow> finest_level_distances(const FunctionalFamily& family, const CylinderMeasure& measure,
                                                double p, const McSettings& settings) {
  family.validate();
  if (family.chain.size() < 2) throw DomainError("finest_level_distances needs at least two levels");
  std::vector<CoCauchyRow> rows;
  const auto& finest = family.members.back();
  for (std::size_t k = 0; k + 1 < family.chain.size(); ++k) {
    McSettings s = settings;
    s.seed = level_seed(settings.seed, k);
    rows.push_back(distance_row(family.members[k], finest, measure, p, s, static_cast<int>(k)));
  }
  return rows;
}

LimitTable limit_estimate(const FunctionalFamily& family, const CylinderMeasure& measure,
                          const std::vector<std::size_t>& samples, std::uint64_t seed, int workers) {
  family.validate();
  if (samples.empty() || (samples.size() != 1 && samples.size() != family.chain.size())) {
    throw DomainError("limit_estimate: budget list must have one entry or one per level");
  }
  LimitTable table;
  for (std::size_t k = 0; k < family.chain.size(); ++k) {
    McSettings s{samples.size() == 1 ? samples[0] : samples[k], level_seed(seed, k), workers};
    const CylinderMeasure level_measure = measure.with_partition(family.chain[k]);
    EstimateReport r = expectation_mc(level_measure, family.members[k], s);
    r.seed = seed;
    table.levels.push_back(std::move(r));
  }
  for (std::size_t k = 1; k < table.levels.size(); ++k) {
    table.differences.push_back(table.levels[k].estimate - table.levels[k - 1].estimate);
  }
  table.extrapolated = table.levels.back().estimate;
  return table;
}

}  // namespace wiener
