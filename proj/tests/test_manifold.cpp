#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wiener/errors.hpp"
#include "wiener/manifold.hpp"
#include "wiener/rng.hpp"

using namespace wiener;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Manifold> all_manifolds() {
  return {Manifold::circle(1.0), Manifold::circle(2.5), Manifold::flat_torus({1.0, 0.7}), Manifold::sphere(1.0),
          Manifold::sphere(1.8), Manifold::euclidean(3)};
}

ManifoldPoint random_point(const Manifold& m, Rng& rng) {
  Vec c(m.coordinate_size(), 0.0);
  for (int i = 0; i < c.size(); ++i) c[i] = 4.0 * standard_normal(rng);
  return m.point(c);
}

/// Random tangent vector with |v| = scale * U(0,1).
TangentVector random_tangent(const Manifold& m, const ManifoldPoint& x, double scale, Rng& rng) {
  Vec c(m.tangent_size(), 0.0);
  for (int i = 0; i < c.size(); ++i) c[i] = standard_normal(rng);
  TangentVector v = m.tangent(x, c);
  const double len = m.norm(v);
  v.components *= scale * uniform01(rng) / len;
  return v;
}

Vec cross3(const Vec& a, const Vec& b) {
  return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double test_radius(const Manifold& m) {
  return m.kind() == ManifoldKind::Euclidean ? 5.0 : 0.9 * m.injectivity_radius();
}

}  // namespace

TEST(Manifold, Descriptors) {
  EXPECT_EQ(Manifold::circle(1.0).embedding_dimension(), 2);
  EXPECT_EQ(Manifold::sphere(1.0).embedding_dimension(), 3);
  EXPECT_EQ(Manifold::flat_torus({1.0, 2.0}).embedding_dimension(), 4);
  EXPECT_EQ(Manifold::euclidean(3).embedding_dimension(), 3);
  EXPECT_EQ(Manifold::flat_torus({1.0, 2.0}).dimension(), 2);
  EXPECT_THROW(Manifold::circle(0.0), DomainError);
  EXPECT_THROW(Manifold::sphere(-1.0), DomainError);
  EXPECT_THROW(Manifold::euclidean(0), DomainError);
  EXPECT_FALSE(Manifold::circle(1.0) == Manifold::circle(2.0));
  EXPECT_TRUE(Manifold::circle(1.0) == Manifold::circle(1.0));
}

TEST(Manifold, CanonicalCoordinates) {
  const Manifold c = Manifold::circle(1.0);
  EXPECT_NEAR(c.point(Vec{-kPi / 2}).coords[0], 3 * kPi / 2, 1e-15);
  EXPECT_NEAR(c.point(Vec{5 * kPi}).coords[0], kPi, 1e-12);
  const Manifold s = Manifold::sphere(2.0);
  EXPECT_NEAR(norm(s.point(Vec{1.0, 2.0, 3.0}).coords), 2.0, 1e-12);
  EXPECT_THROW(s.point(Vec{0.0, 0.0, 0.0}), DomainError);
  EXPECT_THROW(c.exp_map(s.base_point(), c.zero_tangent(c.base_point())), DomainError);
}

TEST(Manifold, ExpMapExamples) {
  const Manifold c = Manifold::circle(1.0);
  EXPECT_NEAR(c.exp_map(c.point(Vec{0.0}), c.tangent(c.point(Vec{0.0}), Vec{kPi / 2})).coords[0], kPi / 2, 1e-15);
  const Manifold s = Manifold::sphere(1.0);
  const ManifoldPoint north = s.base_point();
  const ManifoldPoint south = s.exp_map(north, s.tangent(north, Vec{kPi, 0.0, 0.0}));
  EXPECT_NEAR(south.coords[2], -1.0, 1e-15);
  EXPECT_NEAR(s.distance(north, south), kPi, 1e-15);
}

TEST(Manifold, LogMapExamples) {
  const Manifold c = Manifold::circle(1.0);
  const ManifoldPoint x = c.point(Vec{0.0});
  EXPECT_NEAR(c.log_map(x, c.point(Vec{kPi / 2})).components[0], kPi / 2, 1e-15);
  EXPECT_NEAR(c.log_map(x, c.point(Vec{3 * kPi / 2})).components[0], -kPi / 2, 1e-15);
  EXPECT_EQ(c.log_map(x, x).components[0], 0.0);
  EXPECT_THROW(c.log_map(x, c.point(Vec{kPi})), CutLocusError);
  const Manifold s = Manifold::sphere(1.0);
  EXPECT_THROW(s.log_map(s.base_point(), s.point(Vec{0.0, 0.0, -1.0})), CutLocusError);
  EXPECT_EQ(norm(s.log_map(s.base_point(), s.base_point()).components), 0.0);
}

TEST(Manifold, DistanceExamples) {
  const Manifold c = Manifold::circle(1.0);
  EXPECT_NEAR(c.distance(c.point(Vec{0.0}), c.point(Vec{3 * kPi / 2})), kPi / 2, 1e-15);
  const Manifold t = Manifold::flat_torus({1.0, 2.0});
  EXPECT_NEAR(t.distance(t.point(Vec{0.0, 0.0}), t.point(Vec{0.3, 0.4})), 0.5, 1e-15);
}

TEST(Manifold, ExpLogRoundTripAndArcLength) {
  Rng rng = make_stream(11, 0);
  for (const Manifold& m : all_manifolds()) {
    for (int k = 0; k < 500; ++k) {
      const ManifoldPoint x = random_point(m, rng);
      const TangentVector v = random_tangent(m, x, test_radius(m), rng);
      const ManifoldPoint y = m.exp_map(x, v);
      EXPECT_NEAR(m.distance(x, y), m.norm(v), 1e-10) << m.name();
      const TangentVector w = m.log_map(x, y);
      EXPECT_LT(max_abs_diff(w.components, v.components), 1e-10) << m.name();
      EXPECT_LT(max_abs_diff(m.embed(m.exp_map(x, w)), m.embed(y)), 1e-10) << m.name();
    }
  }
}

TEST(Manifold, DistanceAxioms) {
  Rng rng = make_stream(12, 0);
  for (const Manifold& m : all_manifolds()) {
    for (int k = 0; k < 300; ++k) {
      const ManifoldPoint a = random_point(m, rng);
      const ManifoldPoint b = random_point(m, rng);
      const ManifoldPoint c = random_point(m, rng);
      EXPECT_EQ(m.distance(a, a), 0.0);
      EXPECT_NEAR(m.distance(a, b), m.distance(b, a), 1e-14);
      EXPECT_LE(m.distance(a, c), m.distance(a, b) + m.distance(b, c) + 1e-12);
    }
  }
}

TEST(Manifold, TransportIsometry) {
  Rng rng = make_stream(13, 0);
  for (const Manifold& m : all_manifolds()) {
    for (int k = 0; k < 300; ++k) {
      const ManifoldPoint x = random_point(m, rng);
      const TangentVector v = random_tangent(m, x, test_radius(m), rng);
      const TangentVector w1 = random_tangent(m, x, 2.0, rng);
      const TangentVector w2 = random_tangent(m, x, 2.0, rng);
      const TangentVector t1 = m.parallel_transport(x, v, w1);
      const TangentVector t2 = m.parallel_transport(x, v, w2);
      EXPECT_NEAR(m.inner(t1, t2), m.inner(w1, w2), 1e-12) << m.name();
      const ManifoldPoint y = m.exp_map(x, v);
      EXPECT_LT(max_abs_diff(t1.base.coords, y.coords), 1e-15);
      if (m.kind() == ManifoldKind::Sphere2) {
        EXPECT_NEAR(dot(t1.components, y.coords), 0.0, 1e-12);
      }
      const TangentVector same = m.parallel_transport(x, m.zero_tangent(x), w1);
      EXPECT_LT(max_abs_diff(same.components, w1.components), 1e-15);
    }
  }
}

TEST(Manifold, SphereTransportOfVelocityIsGeodesicTangent) {
  const Manifold s = Manifold::sphere(1.0);
  const ManifoldPoint north = s.base_point();
  const TangentVector v = s.tangent(north, Vec{kPi / 2, 0.0, 0.0});
  const TangentVector moved = s.parallel_transport(north, v, v);
  // gamma(t) = (sin t, 0, cos t); gamma'(pi/2) = (0, 0, -1), speed pi/2.
  EXPECT_NEAR(moved.components[0], 0.0, 1e-15);
  EXPECT_NEAR(moved.components[1], 0.0, 1e-15);
  EXPECT_NEAR(moved.components[2], -kPi / 2, 1e-15);
}

TEST(Manifold, EmbeddingExamplesAndRoundTrip) {
  const Manifold c = Manifold::circle(1.0);
  const Vec e = c.embed(c.point(Vec{0.0}));
  EXPECT_EQ(e[0], 1.0);
  EXPECT_EQ(e[1], 0.0);
  const Manifold s = Manifold::sphere(3.0);
  EXPECT_NEAR(s.embed(s.base_point())[2], 3.0, 0.0);
  EXPECT_THROW(c.embed_inverse(Vec{2.0, 0.0}), DomainError);
  Rng rng = make_stream(14, 0);
  for (const Manifold& m : all_manifolds()) {
    for (int k = 0; k < 300; ++k) {
      const ManifoldPoint x = random_point(m, rng);
      EXPECT_LT(m.distance(m.embed_inverse(m.embed(x)), x), 1e-12) << m.name();
    }
  }
}

TEST(Manifold, EmbeddingIsIsometric) {
  Rng rng = make_stream(15, 0);
  const double eps = 1e-5;
  for (const Manifold& m : all_manifolds()) {
    for (int k = 0; k < 100; ++k) {
      const ManifoldPoint x = random_point(m, rng);
      TangentVector v = random_tangent(m, x, 1.0, rng);
      v.components *= 1.0 / m.norm(v);
      TangentVector small = v;
      small.components *= eps;
      const double chord = norm(m.embed(m.exp_map(x, small)) - m.embed(x));
      EXPECT_NEAR(chord / eps, 1.0, 1e-4) << m.name();
      EXPECT_NEAR(norm(m.tangent_to_ambient(v)), 1.0, 1e-12);
    }
  }
}

TEST(Manifold, TangentVectorsAreTangent) {
  Rng rng = make_stream(16, 0);
  const Manifold s = Manifold::sphere(2.0);
  for (int k = 0; k < 200; ++k) {
    const ManifoldPoint x = random_point(s, rng);
    const TangentVector v = random_tangent(s, x, 3.0, rng);
    EXPECT_NEAR(dot(v.components, x.coords) / 2.0, 0.0, 1e-12);
    const Vec p = s.project_to_tangent(x, Vec{1.0, -2.0, 0.5});
    EXPECT_NEAR(dot(p, x.coords), 0.0, 1e-12);
  }
}

TEST(Manifold, StandardFrameIsOrthonormal) {
  Rng rng = make_stream(17, 0);
  for (const Manifold& m : all_manifolds()) {
    for (int k = 0; k < 100; ++k) {
      const ManifoldPoint x = random_point(m, rng);
      const auto f = m.standard_frame(x);
      ASSERT_EQ(static_cast<int>(f.size()), m.dimension());
      for (std::size_t a = 0; a < f.size(); ++a) {
        for (std::size_t b = 0; b < f.size(); ++b) {
          EXPECT_NEAR(m.inner(f[a], f[b]), a == b ? 1.0 : 0.0, 1e-14);
        }
      }
      if (m.kind() == ManifoldKind::Sphere2) {
        const Vec n = cross3(f[0].components, f[1].components);
        EXPECT_GT(dot(n, x.coords), 0.0);
      }
    }
  }
}

TEST(Manifold, SupDistanceAlongGeodesicMatchesDenseScan) {
  Rng rng = make_stream(18, 0);
  for (const Manifold& m : all_manifolds()) {
    for (int k = 0; k < 100; ++k) {
      const ManifoldPoint c = random_point(m, rng);
      const ManifoldPoint a = random_point(m, rng);
      const TangentVector v = random_tangent(m, a, test_radius(m), rng);
      double dense = 0.0;
      for (int j = 0; j <= 10000; ++j) {
        TangentVector s = v;
        s.components *= j / 10000.0;
        dense = std::max(dense, m.distance(c, m.exp_map(a, s)));
      }
      const double exact = m.sup_distance_along_geodesic(c, a, v);
      // Distance is 1-Lipschitz along the geodesic, so the scan lags by at
      // most half a grid step of arc length (cusps at the cut locus included).
      EXPECT_GE(exact, dense - 1e-12) << m.name();
      EXPECT_LE(exact - dense, 0.5 * m.norm(v) / 10000.0 + 1e-12) << m.name();
    }
  }
}
