#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wiener/cylinder_measure.hpp"
#include "wiener/errors.hpp"
#include "wiener/limit_scheme.hpp"

using namespace wiener;

namespace {

constexpr double kPi = std::numbers::pi;

PartitionPtr uniform(int n) { return make_partition(Partition::uniform(n)); }

PartitionPtr times(std::vector<double> t) { return make_partition(Partition(std::move(t))); }

CylinderMeasure circle_measure(const PartitionPtr& p) {
  const Manifold c = Manifold::circle(1.0);
  return CylinderMeasure(HeatKernel(c), c.base_point(), p);
}

}  // namespace

TEST(Partition, Validation) {
  EXPECT_THROW(Partition({0.0}), DomainError);
  EXPECT_THROW(Partition({0.1, 1.0}), DomainError);
  EXPECT_THROW(Partition({0.0, 0.9}), DomainError);
  EXPECT_THROW(Partition({0.0, 0.5, 0.5, 1.0}), DomainError);
  EXPECT_THROW(Partition::uniform(0), DomainError);
  const Partition p({0.0, 0.25, 0.5, 1.0});
  EXPECT_EQ(p.segments(), 3);
  EXPECT_DOUBLE_EQ(p.mesh(), 0.5);
  EXPECT_EQ(p.index_of(0.5), 2);
  EXPECT_THROW(p.index_of(0.3), DomainError);
  EXPECT_TRUE(Partition::uniform(4).refines(Partition::uniform(2)));
  EXPECT_FALSE(Partition::uniform(3).refines(Partition::uniform(2)));
  EXPECT_EQ(Partition::uniform(4).positions_of(Partition::uniform(2)), (std::vector<int>{0, 2, 4}));
}

TEST(CylinderMeasure, DensityExamples) {
  const Manifold c = Manifold::circle(1.0);
  const HeatKernel k(c);
  const CylinderMeasure one(k, c.base_point(), uniform(1));
  const PathSkeleton s1{uniform(1), c.base_point(), {c.point(Vec{0.7})}};
  EXPECT_DOUBLE_EQ(one.density(s1), k(1.0, c.base_point(), c.point(Vec{0.7})));

  const CylinderMeasure two(k, c.base_point(), uniform(2));
  const PathSkeleton s2{uniform(2), c.base_point(), {c.base_point(), c.base_point()}};
  const double p = oracle::wrapped_gaussian(0.5, 0.0, 1.0);
  EXPECT_NEAR(two.density(s2), p * p, 1e-12);
  EXPECT_NEAR(two.density(s2), 0.318310, 1e-6);
  EXPECT_THROW(two.density(s1), DomainError);
}

TEST(CylinderMeasure, ChapmanKolmogorovMarginal) {
  const Manifold c = Manifold::circle(1.0);
  const HeatKernel k(c);
  const double y = 1.9;
  const int nodes = 2048;
  const double h = 2 * kPi / nodes;
  double s = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const ManifoldPoint z = c.point(Vec{j * h});
    s += k(0.5, c.base_point(), z) * k(0.5, z, c.point(Vec{y}));
  }
  EXPECT_NEAR(s * h, k(1.0, c.base_point(), c.point(Vec{y})), 1e-8);
}

TEST(CylinderMeasure, ProjectExamples) {
  const Manifold c = Manifold::circle(1.0);
  const PartitionPtr fine = times({0.0, 0.25, 0.5, 1.0});
  const PartitionPtr mid = times({0.0, 0.5, 1.0});
  const PartitionPtr coarse = uniform(1);
  const PathSkeleton s{fine, c.base_point(), {c.point(Vec{0.1}), c.point(Vec{0.2}), c.point(Vec{0.3})}};
  const PathSkeleton p = project(s, mid);
  ASSERT_EQ(p.points.size(), 2u);
  EXPECT_EQ(p.points[0].coords[0], 0.2);
  EXPECT_EQ(p.points[1].coords[0], 0.3);
  EXPECT_EQ(project(s, fine).points.size(), 3u);
  EXPECT_EQ(project(project(s, mid), coarse).points[0].coords, project(s, coarse).points[0].coords);
  EXPECT_THROW(project(s, uniform(3)), DomainError);
}

TEST(CylinderMeasure, LiftIsComposition) {
  const Manifold c = Manifold::circle(1.0);
  const CylinderMeasure fine = circle_measure(uniform(8));
  const CylinderFunctional f = endpoint_functional(uniform(2), coordinate_observable(c, 1));
  const CylinderFunctional sup2 = discretize(sup_distance_functional(c, c.base_point()), c, uniform(2));
  const CylinderFunctional via4 = lift_functional(lift_functional(sup2, uniform(4)), uniform(8));
  const CylinderFunctional direct = lift_functional(sup2, uniform(8));
  Rng rng = make_stream(31, 0);
  for (int i = 0; i < 200; ++i) {
    const PathSkeleton s = fine.sample(rng);
    EXPECT_EQ(lift_functional(f, uniform(8))(s), f(project(s, uniform(2))));
    EXPECT_EQ(via4(s), direct(s));
  }
  EXPECT_EQ(lift_functional(constant_functional(uniform(2), 3.5), uniform(8))(fine.sample(rng)), 3.5);
  EXPECT_THROW(lift_functional(f, uniform(3)), DomainError);
}

TEST(CylinderMeasure, SamplingIsDeterministic) {
  const Manifold s = Manifold::sphere(1.0);
  const CylinderMeasure m(HeatKernel(s), s.base_point(), uniform(4));
  Rng a = make_stream(9, 0);
  Rng b = make_stream(9, 0);
  for (int i = 0; i < 50; ++i) {
    const PathSkeleton x = m.sample(a);
    const PathSkeleton y = m.sample(b);
    for (int j = 0; j < 4; ++j) EXPECT_EQ(x.points[static_cast<std::size_t>(j)].coords, y.points[static_cast<std::size_t>(j)].coords);
  }
}

TEST(CylinderMeasure, McConstantHasZeroError) {
  const EstimateReport r = expectation_mc(circle_measure(uniform(2)), constant_functional(uniform(2), 2.5), {1000, 1, 1});
  EXPECT_EQ(r.estimate, 2.5);
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_EQ(r.samples, 1000u);
  EXPECT_EQ(r.segments, 2);
  EXPECT_EQ(r.scheme, "cylinder");
}

TEST(CylinderMeasure, McReproducibleForFixedSeedAndWorkers) {
  const Manifold s = Manifold::sphere(1.0);
  const CylinderMeasure m(HeatKernel(s), s.base_point(), uniform(4));
  const CylinderFunctional f = endpoint_functional(uniform(4), zonal_observable(s, s.base_point()));
  EstimateReport a = expectation_mc(m, f, {20000, 17, 3});
  EstimateReport b = expectation_mc(m, f, {20000, 17, 3});
  a.wall_time = b.wall_time = 0.0;
  EXPECT_EQ(a, b);
}

TEST(CylinderMeasure, SphereZonalEndpointMatchesSpectrum) {
  const Manifold s = Manifold::sphere(1.0);
  for (int n : {1, 3, 8}) {
    const CylinderMeasure m(HeatKernel(s), s.base_point(), uniform(n));
    const EstimateReport r =
        expectation_mc(m, endpoint_functional(uniform(n), zonal_observable(s, s.base_point())), {40000, 40 + static_cast<std::uint64_t>(n), 2});
    EXPECT_LT(std::abs(r.estimate - std::exp(-1.0)), 4 * r.std_error) << n;
  }
}

TEST(CylinderMeasure, QuadratureTotalMass) {
  for (int n : {1, 2, 3}) {
    const EstimateReport r = expectation_quadrature(circle_measure(uniform(n)), constant_functional(uniform(n), 1.0));
    EXPECT_NEAR(r.estimate, 1.0, 1e-10) << n;
    EXPECT_EQ(r.method, "quadrature");
  }
  const Manifold t = Manifold::flat_torus({1.0, 0.5});
  const CylinderMeasure tm(HeatKernel(t), t.base_point(), uniform(2));
  EXPECT_NEAR(expectation_quadrature(tm, constant_functional(uniform(2), 1.0)).estimate, 1.0, 1e-10);
}

TEST(CylinderMeasure, QuadratureSingleSegmentCollapses) {
  const Manifold c = Manifold::circle(1.0);
  const Observable obs = coordinate_observable(c, 0);
  const EstimateReport r = expectation_quadrature(circle_measure(uniform(1)), endpoint_functional(uniform(1), obs));
  const double direct = oracle::simpson([](double y) { return std::cos(y) * oracle::wrapped_gaussian(1.0, y, 1.0); }, 0.0, 2 * kPi, 2000);
  EXPECT_NEAR(r.estimate, direct, 1e-12);
  EXPECT_NEAR(r.estimate, std::exp(-0.5), 1e-12);
}

TEST(CylinderMeasure, QuadratureAveragesAtTheCutLocus) {
  // With one segment sup_t d(0, X_t) along the minimizing geodesic is
  // d(0, X_1); the grid node at the antipode has no unique geodesic.
  const Manifold c = Manifold::circle(1.0);
  const CylinderFunctional f = discretize(sup_distance_functional(c, c.base_point()), c, uniform(1));
  const double direct = oracle::simpson([](double y) { return std::abs(y) * oracle::wrapped_gaussian(1.0, y, 1.0); }, -kPi, kPi, 4000);
  const EstimateReport r = expectation_quadrature(circle_measure(uniform(1)), f, 512);
  EXPECT_EQ(r.rejected, 0u);
  EXPECT_NEAR(r.estimate, direct, 1e-4);
  EXPECT_LT(std::abs(r.estimate - direct), 2 * r.error_bound);
}

TEST(CylinderMeasure, QuadratureRejectsUnsupported) {
  const Manifold s = Manifold::sphere(1.0);
  const CylinderMeasure m(HeatKernel(s), s.base_point(), uniform(1));
  EXPECT_THROW(expectation_quadrature(m, constant_functional(uniform(1), 1.0)), DomainError);
  EXPECT_THROW(expectation_quadrature(circle_measure(uniform(5)), constant_functional(uniform(5), 1.0)), DomainError);
  EXPECT_THROW(expectation_quadrature(circle_measure(uniform(4)), constant_functional(uniform(4), 1.0), 128), DomainError);
}

TEST(CylinderMeasure, QuadratureMatchesMcOnBuiltins) {
  const Manifold c = Manifold::circle(1.0);
  const PartitionPtr p = uniform(2);
  const CylinderMeasure m = circle_measure(p);
  const std::vector<CylinderFunctional> fs = {
      indicator_functional(p, c, {{0.5, c.point(Vec{0.3}), 0.8}, {1.0, c.base_point(), 1.0}}),
      energy_functional(p, c),
      endpoint_functional(p, distance_observable(c, c.point(Vec{1.0}))),
  };
  std::uint64_t seed = 100;
  for (const auto& f : fs) {
    const EstimateReport q = expectation_quadrature(m, f);
    const EstimateReport mc = expectation_mc(m, f, {100000, seed++, 1});
    EXPECT_LT(std::abs(q.estimate - mc.estimate), 4 * mc.std_error + q.error_bound) << f.name();
  }
}

TEST(CylinderMeasure, IsometryUnderRefinementByQuadrature) {
  const Manifold c = Manifold::circle(1.0);
  const PartitionPtr coarse = uniform(1);
  const PartitionPtr fine = uniform(2);
  const CylinderFunctional f = endpoint_functional(coarse, coordinate_observable(c, 0));
  for (double p : {1.0, 2.0}) {
    const double a = expectation_quadrature(circle_measure(coarse), abs_power(f, p), 512).estimate;
    const double b = expectation_quadrature(circle_measure(fine), abs_power(lift_functional(f, fine), p), 512).estimate;
    EXPECT_NEAR(a, b, 1e-8 * a) << p;
  }
}

TEST(CylinderMeasure, MarkovConsistencyOfProjection) {
  const Manifold c = Manifold::circle(1.0);
  const CylinderMeasure fine = circle_measure(uniform(8));
  const CylinderMeasure coarse = circle_measure(uniform(2));
  Rng ra = make_stream(61, 0);
  Rng rb = make_stream(62, 0);
  constexpr int kBins = 64;
  std::vector<double> ha(kBins, 0.0), hb(kBins, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double a = project(fine.sample(ra), uniform(2)).points[0].coords[0];
    const double b = coarse.sample(rb).points[0].coords[0];
    ha[static_cast<std::size_t>(std::min(kBins - 1, static_cast<int>(a / (2 * kPi) * kBins)))] += 1.0 / n;
    hb[static_cast<std::size_t>(std::min(kBins - 1, static_cast<int>(b / (2 * kPi) * kBins)))] += 1.0 / n;
  }
  double tv = 0.0;
  for (int b = 0; b < kBins; ++b) tv += 0.5 * std::abs(ha[static_cast<std::size_t>(b)] - hb[static_cast<std::size_t>(b)]);
  EXPECT_LT(tv, 0.03);
}

TEST(Estimate, PairwiseSumAndSummary) {
  std::vector<double> v(1000, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 100.0, 1e-12);
  v.push_back(std::nan(""));
  const SampleSummary s = summarize(v);
  EXPECT_EQ(s.count, 1000u);
  EXPECT_EQ(s.rejected, 1u);
  EXPECT_NEAR(s.mean, 0.1, 1e-15);
}

TEST(Estimate, WorkerExceptionsPropagate) {
  EXPECT_THROW(draw_samples(100, 1, 2,
                            []() -> SampleFn { return [](Rng&) -> double { throw NumericError("boom"); }; }),
               NumericError);
}
