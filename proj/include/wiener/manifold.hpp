#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wiener/vec.hpp"

namespace wiener {

enum class ManifoldKind { Circle, FlatTorus, Sphere2, Euclidean };

/// The generator convention used by every kernel and sampler in the engine:
/// Brownian motion is generated by half the Laplace-Beltrami operator, so the
/// flat kernel is (2 pi t)^{-m/2} exp(-|x-y|^2 / (2t)). Readers using the
/// e^{t Delta} convention must substitute t -> 2t.
inline constexpr const char* kDiffusionConvention = "generator Laplacian/2";

/// A point on a registered manifold, stored in intrinsic coordinates:
///   circle / flat torus: arc length per factor, canonical range [0, 2 pi r)
///   sphere: ambient R^3 vector with |x| = r
///   Euclidean: the coordinate vector itself
/// The owning manifold is recorded by fingerprint so mismatches are caught
/// without holding a reference.
struct ManifoldPoint {
  Vec coords;
  std::uint64_t manifold_id = 0;
};

/// Tangent vector at `base`. Components are arc-length rates on flat factors
/// and ambient R^3 components (orthogonal to the base point) on the sphere.
struct TangentVector {
  ManifoldPoint base;
  Vec components;
};

/// Immutable descriptor of one closed-form Riemannian manifold together with
/// its geodesic primitives. All members are pure and thread-safe.
class Manifold {
 public:
  static Manifold circle(double radius);
  static Manifold flat_torus(std::vector<double> radii);
  static Manifold sphere(double radius);
  static Manifold euclidean(int dimension);

  ManifoldKind kind() const { return kind_; }
  /// Intrinsic dimension m.
  int dimension() const { return dimension_; }
  /// Dimension N of the isometric embedding target R^N.
  int embedding_dimension() const { return embedding_dimension_; }
  /// Radii of the curved factors (empty for Euclidean).
  const std::vector<double>& radii() const { return radii_; }
  /// Radius of the single factor of a circle or sphere.
  double radius() const;
  std::uint64_t id() const { return id_; }
  std::string name() const;
  /// Injectivity radius; infinity for Euclidean space.
  double injectivity_radius() const;
  /// Number of intrinsic coordinates stored per point.
  int coordinate_size() const;
  /// Number of components stored per tangent vector.
  int tangent_size() const;

  friend bool operator==(const Manifold& a, const Manifold& b) { return a.id_ == b.id_; }

  /// Builds a point, normalizing angles into the canonical range and
  /// rescaling sphere vectors onto the sphere. Throws on wrong coordinate
  /// count or a zero sphere vector.
  ManifoldPoint point(const Vec& coords) const;
  /// Canonical base point: zero angles, north pole (0, 0, r), or the origin.
  ManifoldPoint base_point() const;
  /// Builds a tangent vector; sphere components are projected onto T_x S^2.
  TangentVector tangent(const ManifoldPoint& base, const Vec& components) const;
  TangentVector zero_tangent(const ManifoldPoint& base) const;

  ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& v) const;
  /// Inverse of exp_map inside the injectivity radius. Throws CutLocusError
  /// when y lies on the cut locus of x.
  TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) const;
  /// Transports w along the geodesic s -> exp(x, s v), s in [0, 1].
  TangentVector parallel_transport(const ManifoldPoint& x, const TangentVector& v,
                                   const TangentVector& w) const;
  double distance(const ManifoldPoint& x, const ManifoldPoint& y) const;
  double inner(const TangentVector& a, const TangentVector& b) const;
  double norm(const TangentVector& v) const;

  /// Isometric embedding into R^N.
  Vec embed(const ManifoldPoint& x) const;
  /// Closest-point inverse of embed; throws DomainError if the ambient
  /// vector is farther than 1e-8 from the embedded manifold.
  ManifoldPoint embed_inverse(const Vec& ambient) const;
  /// Ambient representation (length N) of a tangent vector.
  Vec tangent_to_ambient(const TangentVector& v) const;
  /// Orthogonal projection of an ambient vector onto the embedded tangent
  /// space at x, returned in ambient coordinates.
  Vec project_to_tangent(const ManifoldPoint& x, const Vec& ambient) const;

  /// Positively oriented orthonormal frame of T_x M. On the sphere the first
  /// vector is the normalized tangential part of the coordinate axis least
  /// aligned with x, and e1 x e2 points outward.
  std::vector<TangentVector> standard_frame(const ManifoldPoint& x) const;

  /// max_{s in [0,1]} distance(center, exp(a, s v)), in closed form.
  double sup_distance_along_geodesic(const ManifoldPoint& center, const ManifoldPoint& a,
                                     const TangentVector& v) const;

  void require_point(const ManifoldPoint& x) const;
  void require_tangent(const TangentVector& v) const;

 private:
  Manifold(ManifoldKind kind, std::vector<double> radii, int dimension);

  ManifoldKind kind_;
  std::vector<double> radii_;
  int dimension_;
  int embedding_dimension_;
  std::uint64_t id_;
};

}  // namespace wiener
