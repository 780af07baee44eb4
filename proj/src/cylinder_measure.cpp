#include "wiener/cylinder_measure.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "wiener/errors.hpp"

namespace wiener {

CylinderMeasure::CylinderMeasure(HeatKernel kernel, ManifoldPoint base, PartitionPtr partition)
    : kernel_(std::move(kernel)), base_(std::move(base)), partition_(std::move(partition)) {
  kernel_.manifold().require_point(base_);
  if (!partition_) throw DomainError("cylinder measure needs a partition");
}

double CylinderMeasure::density(const PathSkeleton& skeleton) const {
  if (!(*skeleton.partition == *partition_)) throw DomainError("density: skeleton partition differs from measure partition");
  if (static_cast<int>(skeleton.points.size()) != partition_->segments()) throw DomainError("density: wrong point count");
  double d = 1.0;
  const ManifoldPoint* prev = &base_;
  for (int i = 1; i <= partition_->segments(); ++i) {
    const ManifoldPoint& cur = skeleton.points[static_cast<std::size_t>(i - 1)];
    d *= kernel_(partition_->step(i), *prev, cur);
    prev = &cur;
  }
  return d;
}

SkeletonSampler CylinderMeasure::sampler() const { return SkeletonSampler(*this); }

PathSkeleton CylinderMeasure::sample(Rng& rng) const {
  SkeletonSampler s(*this);
  return s.sample(rng);
}

CylinderMeasure CylinderMeasure::with_partition(PartitionPtr partition) const {
  return CylinderMeasure(kernel_, base_, std::move(partition));
}

SkeletonSampler::SkeletonSampler(const CylinderMeasure& measure)
    : partition_(measure.partition()), base_(measure.base()) {
  std::vector<double> steps;
  for (int i = 1; i <= partition_->segments(); ++i) {
    const double dt = partition_->step(i);
    int found = -1;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (steps[k] == dt) found = static_cast<int>(k);
    }
    if (found < 0) {
      found = static_cast<int>(steps.size());
      steps.push_back(dt);
      samplers_.emplace_back(measure.kernel(), dt);
    }
    slot_.push_back(found);
  }
}

PathSkeleton SkeletonSampler::sample(Rng& rng) {
  PathSkeleton s{partition_, base_, {}};
  s.points.reserve(slot_.size());
  const ManifoldPoint* prev = &base_;
  for (int k : slot_) {
    s.points.push_back(samplers_[static_cast<std::size_t>(k)].sample(*prev, rng));
    prev = &s.points.back();
  }
  return s;
}

EstimateReport expectation_mc(const CylinderMeasure& measure, const CylinderFunctional& f, const McSettings& settings) {
  if (!(*f.partition() == *measure.partition())) throw DomainError("expectation_mc: functional partition differs from measure");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> values = draw_samples(settings.samples, settings.seed, settings.workers, [&]() -> SampleFn {
    auto sampler = std::make_shared<SkeletonSampler>(measure);
    return [sampler, &f](Rng& rng) {
      const PathSkeleton s = sampler->sample(rng);
      try {
        return f(s);
      } catch (const CutLocusError&) {
        return std::nan("");
      }
    };
  });
  const SampleSummary sum = summarize(values);
  EstimateReport r;
  r.estimate = sum.mean;
  r.std_error = sum.std_error;
  r.samples = sum.count;
  r.rejected = sum.rejected;
  r.bias_bound = values.empty() ? 0.0 : static_cast<double>(sum.rejected) / static_cast<double>(values.size()) * sum.max_abs;
  r.segments = measure.partition()->segments();
  r.mesh = measure.partition()->mesh();
  r.manifold = measure.manifold().name();
  r.scheme = "cylinder";
  r.functional = f.name();
  r.method = "mc";
  r.seed = settings.seed;
  r.workers = settings.workers;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int default_quadrature_grid(int dimensions) {
  int g = 256;
  while (g > 4 && std::pow(static_cast<double>(g), dimensions) > 4e6) g -= 2;
  return g;
}

EstimateReport expectation_quadrature(const CylinderMeasure& measure, const CylinderFunctional& f, int grid) {
  const Manifold& mf = measure.manifold();
  if (mf.kind() != ManifoldKind::Circle && mf.kind() != ManifoldKind::FlatTorus) {
    throw DomainError("expectation_quadrature: only circle and flat torus are supported");
  }
  if (!(*f.partition() == *measure.partition())) throw DomainError("expectation_quadrature: partition mismatch");
  const int n = measure.partition()->segments();
  const int m = mf.dimension();
  if (n > 4) throw DomainError("expectation_quadrature: at most 4 segments");
  const int dims = m * n;
  if (grid == 0) grid = default_quadrature_grid(dims);
  if (grid < 4 || grid % 2 != 0) throw DomainError("expectation_quadrature: grid must be even and >= 4");
  if (std::pow(static_cast<double>(grid), dims) > 1e8) throw DomainError("expectation_quadrature: grid exceeds 1e8 points");

  const auto start = std::chrono::steady_clock::now();
  const HeatKernel& kernel = measure.kernel();
  const auto G = static_cast<std::size_t>(grid);
  std::vector<double> h(static_cast<std::size_t>(m));
  // table[(i * m + k) * G + delta] = circle-factor kernel at offset delta*h_k
  std::vector<double> table(static_cast<std::size_t>(n * m) * G);
  for (int k = 0; k < m; ++k) {
    const double r = mf.radii()[static_cast<std::size_t>(k)];
    h[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * r / grid;
    for (int i = 1; i <= n; ++i) {
      const double dt = measure.partition()->step(i);
      for (std::size_t d = 0; d < G; ++d) {
        const double off = static_cast<double>(d) * h[static_cast<std::size_t>(k)];
        table[(static_cast<std::size_t>((i - 1) * m + k)) * G + d] =
            dt < r * r ? kernel.circle_image_sum(dt, off, r) : kernel.circle_spectral_sum(dt, off, r);
      }
    }
  }
  double cell = 1.0;
  for (double hk : h) cell *= std::pow(hk, n);

  PathSkeleton s{measure.partition(), measure.base(), std::vector<ManifoldPoint>(static_cast<std::size_t>(n), measure.base())};
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  long double full = 0.0L;
  long double half = 0.0L;
  const double eps = 1e-9 * *std::min_element(h.begin(), h.end());
  auto shifted = [&](const PathSkeleton& base, double e) {
    PathSkeleton out = base;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
      Vec c = out.points[i].coords;
      for (int k = 0; k < m; ++k) c[k] += e * static_cast<double>(i + 1);
      out.points[i] = mf.point(c);
    }
    return out;
  };
  std::size_t skipped = 0;
  double skipped_weight = 0.0;
  double max_abs = 0.0;

  // Depth-first over the n*m grid indices; partial density accumulated per level.
  auto recurse = [&](auto&& self, int level, double partial, bool all_even) -> void {
    if (level == dims) {
      double fv = 0.0;
      try {
        fv = f(s);
      } catch (const CutLocusError&) {
        // The node has an antipodal step, where F may jump. The trapezoid
        // value at a jump is the mean of the one-sided limits, taken here by
        // shifting point i by +-i*eps in every coordinate so each step moves
        // off the cut locus in opposite directions.
        try {
          fv = 0.5 * (f(shifted(s, eps)) + f(shifted(s, -eps)));
        } catch (const CutLocusError&) {
          ++skipped;
          skipped_weight += partial;
          return;
        }
      }
      max_abs = std::max(max_abs, std::abs(fv));
      const double v = fv * partial;
      full += v;
      if (all_even) half += v;
      return;
    }
    const int seg = level / m;  // 0-based segment
    const int k = level % m;
    const int prev = seg == 0 ? 0 : idx[static_cast<std::size_t>((seg - 1) * m + k)];
    const double r = mf.radii()[static_cast<std::size_t>(k)];
    const double* row = &table[static_cast<std::size_t>(seg * m + k) * G];
    for (int a = 0; a < grid; ++a) {
      idx[static_cast<std::size_t>(level)] = a;
      const auto delta = static_cast<std::size_t>(((a - prev) % grid + grid) % grid);
      Vec c = s.points[static_cast<std::size_t>(seg)].coords;
      double coord = measure.base().coords[k] + a * h[static_cast<std::size_t>(k)];
      const double period = 2.0 * std::numbers::pi * r;
      if (coord >= period) coord -= period;
      c[k] = coord;
      s.points[static_cast<std::size_t>(seg)].coords = c;
      self(self, level + 1, partial * row[delta], all_even && (a % 2 == 0));
    }
  };
  recurse(recurse, 0, 1.0, true);

  const double q_full = static_cast<double>(full) * cell;
  const double q_half = static_cast<double>(half) * cell * std::pow(2.0, dims);
  EstimateReport rep;
  rep.estimate = q_full;
  rep.std_error = 0.0;
  rep.error_bound = std::abs(q_full - q_half);
  rep.rejected = skipped;
  rep.bias_bound = skipped_weight * cell * max_abs;
  rep.samples = static_cast<std::size_t>(std::pow(static_cast<double>(grid), dims));
  rep.segments = n;
  rep.mesh = measure.partition()->mesh();
  rep.manifold = mf.name();
  rep.scheme = "cylinder";
  rep.functional = f.name();
  rep.method = "quadrature";
  rep.workers = 1;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace wiener
