#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "wiener/development.hpp"
#include "wiener/errors.hpp"

using namespace wiener;

namespace {

constexpr double kPi = std::numbers::pi;

PartitionPtr uniform(int n) { return make_partition(Partition::uniform(n)); }

FlatPiecewisePath random_flat(const PartitionPtr& p, int m, double scale, Rng& rng) {
  FlatPiecewisePath a = sample_flat_gaussian(p, m, rng);
  for (Vec& v : a.vertices) v *= scale;
  return a;
}

PartitionPtr random_partition(int n, Rng& rng) {
  std::vector<double> t{0.0};
  double acc = 0.0;
  std::vector<double> w;
  for (int i = 0; i < n; ++i) w.push_back(0.2 + uniform01(rng));
  double total = 0.0;
  for (double x : w) total += x;
  for (int i = 0; i + 1 < n; ++i) {
    acc += w[static_cast<std::size_t>(i)] / total;
    t.push_back(acc);
  }
  t.push_back(1.0);
  return make_partition(Partition(t));
}

}  // namespace

TEST(Development, EnergyExamples) {
  FlatPiecewisePath a{uniform(1), {Vec{0.0}, Vec{1.0}}};
  EXPECT_EQ(energy_flat(a), 1.0);
  Rng rng = make_stream(71, 0);
  FlatPiecewisePath b = random_flat(uniform(5), 2, 1.0, rng);
  const double e = energy_flat(b);
  for (Vec& v : b.vertices) v *= 3.0;
  EXPECT_NEAR(energy_flat(b), 9.0 * e, 1e-12 * e);
}

TEST(Development, EnergyMatchesDenseIntegral) {
  Rng rng = make_stream(72, 0);
  const PartitionPtr p = random_partition(6, rng);
  const FlatPiecewisePath a = random_flat(p, 2, 1.0, rng);
  double integral = 0.0;
  for (int i = 1; i <= p->segments(); ++i) {
    const Vec vel = a.velocity(i);
    integral += oracle::simpson([&](double) { return dot(vel, vel); }, p->times()[static_cast<std::size_t>(i - 1)],
                                p->times()[static_cast<std::size_t>(i)], 10000);
  }
  EXPECT_NEAR(energy_flat(a), integral, 1e-10 * (1 + integral));
}

TEST(Development, ZeroPathStaysAtBase) {
  const Manifold s = Manifold::sphere(1.0);
  const FlatPiecewisePath a{uniform(4), std::vector<Vec>(5, Vec(2, 0.0))};
  const CurvedPiecewisePath g = develop(s, a, s.base_point());
  for (const auto& x : g.vertices) EXPECT_EQ(x.coords, s.base_point().coords);
  EXPECT_EQ(energy_curved(s, g), 0.0);
}

TEST(Development, CircleDevelopmentWraps) {
  const Manifold c = Manifold::circle(1.0);
  const ManifoldPoint x0 = c.point(Vec{1.0});
  Rng rng = make_stream(73, 0);
  const FlatPiecewisePath a = random_flat(uniform(10), 1, 3.0, rng);
  const CurvedPiecewisePath g = develop(c, a, x0);
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    const double expect = c.point(Vec{1.0 + a.vertices[i][0]}).coords[0];
    EXPECT_NEAR(std::remainder(g.vertices[i].coords[0] - expect, 2 * kPi), 0.0, 1e-12);
  }
}

TEST(Development, SphereHalfTurnReachesSouthPole) {
  const Manifold s = Manifold::sphere(1.0);
  const FlatPiecewisePath a{uniform(1), {Vec{0.0, 0.0}, Vec{kPi, 0.0}}};
  const CurvedPiecewisePath g = develop(s, a, s.base_point());
  EXPECT_NEAR(g.end().coords[2], -1.0, 1e-15);
}

TEST(Development, RoundTripAndEnergyOnSphere) {
  const Manifold s = Manifold::sphere(1.0);
  Rng rng = make_stream(74, 0);
  for (int k = 0; k < 200; ++k) {
    const PartitionPtr p = k % 2 ? uniform(64) : random_partition(64, rng);
    const ManifoldPoint x0 = s.point(Vec{standard_normal(rng), standard_normal(rng), standard_normal(rng)});
    const FlatPiecewisePath a = random_flat(p, 2, 1.0, rng);
    const CurvedPiecewisePath g = develop(s, a, x0);
    const FlatPiecewisePath b = antidevelop(s, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.vertices.size(); ++i) worst = std::max(worst, max_abs_diff(a.vertices[i], b.vertices[i]));
    EXPECT_LT(worst, 1e-9);
    const double e = energy_flat(a);
    EXPECT_LT(std::abs(energy_curved(s, g) - e), 1e-10 * (1 + e));
    EXPECT_LT(std::abs(energy_flat(b) - energy_curved(s, g)), 1e-10 * (1 + e));
    // develop o antidevelop on the developed path.
    const CurvedPiecewisePath g2 = develop(s, b, x0);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) EXPECT_LT(s.distance(g.vertices[i], g2.vertices[i]), 1e-9);
  }
}

TEST(Development, RoundTripOnTorusAndEuclidean) {
  Rng rng = make_stream(75, 0);
  for (const Manifold& m : {Manifold::flat_torus({1.0, 0.4}), Manifold::euclidean(3)}) {
    const FlatPiecewisePath a = random_flat(uniform(16), m.dimension(), 2.0, rng);
    const FlatPiecewisePath b = antidevelop(m, develop(m, a, m.base_point()));
    for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_LT(max_abs_diff(a.vertices[i], b.vertices[i]), 1e-12);
  }
}

TEST(Development, FramesStayOrthonormal) {
  const Manifold s = Manifold::sphere(1.0);
  Rng rng = make_stream(76, 0);
  const CurvedPiecewisePath g = develop(s, random_flat(uniform(1024), 2, 1.0, rng), s.base_point());
  ASSERT_EQ(g.frames.size(), 1025u);
  EXPECT_LT(frame_orthonormality_residual(s, g), 1e-9);
}

TEST(Development, DimensionMismatch) {
  const Manifold s = Manifold::sphere(1.0);
  const FlatPiecewisePath a{uniform(1), {Vec{0.0}, Vec{1.0}}};
  EXPECT_THROW(develop(s, a, s.base_point()), DomainError);
}

TEST(Development, FlatGaussianDensity) {
  const FlatPiecewisePath a{uniform(1), {Vec{0.0}, Vec{0.0}}};
  EXPECT_NEAR(flat_gaussian_density(a), 0.3989422804014327, 1e-15);
  Rng rng = make_stream(77, 0);
  for (int k = 0; k < 100; ++k) {
    const PartitionPtr p = random_partition(1 + k % 7, rng);
    const int m = 1 + k % 3;
    const FlatPiecewisePath b = random_flat(p, m, 1.5, rng);
    double lognorm = 0.0;
    for (int i = 1; i <= p->segments(); ++i) lognorm += std::log(2 * kPi * p->step(i));
    EXPECT_NEAR(flat_gaussian_log_density(b) + 0.5 * energy_flat(b) + 0.5 * m * lognorm, 0.0, 1e-12);
  }
}

TEST(Development, FlatGaussianIncrementMoments) {
  Rng rng = make_stream(78, 0);
  const PartitionPtr p = make_partition(Partition({0.0, 0.1, 0.6, 1.0}));
  const int n = 100000;
  for (int seg = 1; seg <= 3; ++seg) {
    Rng r = make_stream(78, static_cast<std::uint64_t>(seg));
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d = sample_flat_gaussian(p, 1, r).increment(seg)[0];
      s1 += d;
      s2 += d * d;
      s4 += d * d * d * d;
    }
    const double mean = s1 / n;
    const double var = s2 / n;
    const double se_mean = std::sqrt(var / n);
    const double se_var = std::sqrt((s4 / n - var * var) / n);
    EXPECT_LT(std::abs(mean), 4 * se_mean);
    EXPECT_LT(std::abs(var - p->step(seg)), 4 * se_var);
  }
}

TEST(Development, GeometricSamplerDeterminism) {
  const Manifold s = Manifold::sphere(1.0);
  const GeometricMeasureSampler g(s, s.base_point(), uniform(8));
  Rng a = make_stream(3, 1);
  Rng b = make_stream(3, 1);
  for (int k = 0; k < 20; ++k) EXPECT_EQ(g.sample(a).end().coords, g.sample(b).end().coords);
}

TEST(Development, GeometricZonalMatchesExactStepLaw) {
  const Manifold s = Manifold::sphere(1.0);
  const Observable z = zonal_observable(s, s.base_point());
  for (int n : {1, 4, 16}) {
    const GeometricMeasureSampler g(s, s.base_point(), uniform(n));
    const EstimateReport r = geometric_expectation_mc(g, endpoint_path_functional(z), {50000, 10 + static_cast<std::uint64_t>(n), 1});
    EXPECT_LT(std::abs(r.estimate - oracle::geometric_zonal_mean(n)), 4 * r.std_error) << n;
    EXPECT_EQ(r.scheme, "geometric");
  }
}

TEST(Development, TransferRoundTrip) {
  const Manifold s = Manifold::sphere(1.0);
  Rng rng = make_stream(79, 0);
  const FlatFunctional energy = flat_energy_functional();
  const PathFunctional transferred = transfer(s, energy);
  const FlatFunctional back = inverse_transfer(s, s.base_point(), transferred);
  const PathFunctional curved_energy = energy_path_functional();
  const FlatFunctional pulled = inverse_transfer(s, s.base_point(), curved_energy);
  const FlatFunctional constant{"c", [](const FlatPiecewisePath&) { return 2.0; }};
  for (int k = 0; k < 100; ++k) {
    const FlatPiecewisePath a = random_flat(uniform(12), 2, 1.0, rng);
    EXPECT_NEAR(back(a), energy(a), 1e-9 * (1 + energy(a)));
    EXPECT_NEAR(pulled(a), energy(a), 1e-10 * (1 + energy(a)));
    const CurvedPiecewisePath g = develop(s, a, s.base_point());
    EXPECT_EQ(transfer(s, constant)(g), 2.0);
    EXPECT_NEAR(transferred(g), curved_energy(g), 1e-10 * (1 + energy(a)));
  }
}

TEST(Development, TransferPreservesL2Norm) {
  // ||f||_{L^2(flat Gaussian)} = ||transfer(f)||_{L^2(developed measure)} for f = first coordinate
  // of the flat endpoint; estimated from independent streams.
  const Manifold s = Manifold::sphere(1.0);
  const PartitionPtr p = uniform(8);
  const FlatFunctional f{"flat_end_x", [](const FlatPiecewisePath& a) { return a.vertices.back()[0] * a.vertices.back()[0]; }};
  const PathFunctional tf = transfer(s, f);
  const EstimateReport on_nu = geometric_expectation_mc(GeometricMeasureSampler(s, s.base_point(), p), tf, {40000, 5, 1});
  const std::vector<double> flat = draw_samples(40000, 6, 1, [&]() -> SampleFn {
    return [&](Rng& rng) { return f(sample_flat_gaussian(p, 2, rng)); };
  });
  const SampleSummary sum = summarize(flat);
  EXPECT_LT(std::abs(on_nu.estimate - sum.mean), 4 * std::hypot(on_nu.std_error, sum.std_error));
  EXPECT_NEAR(sum.mean, 1.0, 4 * sum.std_error);
}

TEST(Development, GeometricLimitConstant) {
  const Manifold s = Manifold::sphere(1.0);
  const GeometricLimitTable t = geometric_limit_estimate(constant_path_functional(1.5), HeatKernel(s), s.base_point(),
                                                          RefinementChain::dyadic(3), {200}, 1, 1, true);
  ASSERT_EQ(t.geometric.size(), 3u);
  ASSERT_EQ(t.cylinder.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(t.geometric[k].estimate, 1.5);
    EXPECT_EQ(t.cylinder[k].estimate, 1.5);
    EXPECT_EQ(t.joint_z[k], 0.0);
  }
  EXPECT_THROW(geometric_limit_estimate(constant_path_functional(1.0), HeatKernel(s), s.base_point(), RefinementChain::dyadic(2), {10}, 1, 1, false),
               DomainError);
}

TEST(Development, CircleSchemesAgree) {
  const Manifold c = Manifold::circle(1.0);
  const GeometricLimitTable t = geometric_limit_estimate(sup_distance_functional(c, c.base_point()), HeatKernel(c), c.base_point(),
                                                          RefinementChain::uniform({2, 8, 32}), {20000}, 12, 1, true);
  for (double z : t.joint_z) EXPECT_LT(std::abs(z), 4.0);
}

TEST(Development, PathFileRoundTrip) {
  const Manifold s = Manifold::sphere(1.0);
  Rng rng = make_stream(80, 0);
  const PartitionPtr p = random_partition(9, rng);
  const FlatPiecewisePath a = random_flat(p, 2, 0.5, rng);
  std::stringstream flat_file;
  write_flat_path(flat_file, s, s.base_point(), a);
  const PathFile f = read_path_file(flat_file);
  EXPECT_FALSE(f.curved);
  EXPECT_TRUE(f.manifold == s);
  ASSERT_EQ(f.flat.vertices.size(), a.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_EQ(f.flat.vertices[i], a.vertices[i]);
  EXPECT_EQ(f.flat.partition->times(), p->times());

  const CurvedPiecewisePath g = develop(s, a, s.base_point());
  std::stringstream curved_file;
  write_curved_path(curved_file, s, g);
  const PathFile h = read_path_file(curved_file);
  ASSERT_TRUE(h.curved);
  const FlatPiecewisePath back = antidevelop(s, h.curve);
  for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_LT(max_abs_diff(back.vertices[i], a.vertices[i]), 1e-9);
}

TEST(Development, PathFileErrors) {
  std::stringstream bad1("manifold cube 1\nkind flat\nbase 0\ntimes 0 1\nvertices\n0\n1\n");
  EXPECT_THROW(read_path_file(bad1), ConfigError);
  std::stringstream bad2("manifold circle 1\nkind flat\nbase 0\ntimes 0 1\nvertices\n0\n");
  EXPECT_THROW(read_path_file(bad2), ConfigError);
  std::stringstream bad3("manifold circle 1\nkind flat\nbase 0\ntimes 0 0.7\nvertices\n0\n1\n");
  EXPECT_THROW(read_path_file(bad3), ConfigError);
  std::stringstream bad4("manifold circle 1\nkind flat\nbase 0\ntimes 0 1\nvertices\n0\nx\n");
  EXPECT_THROW(read_path_file(bad4), ConfigError);
  EXPECT_EQ(manifold_spec(parse_manifold_spec("torus 1 0.5")), "torus 1 0.5");

  // A half turn in one segment is not determined by its vertices.
  const Manifold s = Manifold::sphere(1.0);
  const FlatPiecewisePath a{uniform(1), {Vec{0.0, 0.0}, Vec{kPi, 0.0}}};
  std::ostringstream out;
  EXPECT_THROW(write_curved_path(out, s, develop(s, a, s.base_point())), DomainError);
}
