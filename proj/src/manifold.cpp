#include "wiener/manifold.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wiener/errors.hpp"

namespace wiener {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Canonical representative of s in [0, 2 pi r).
double wrap_arc(double s, double r) {
  const double period = kTwoPi * r;
  double w = std::fmod(s, period);
  if (w < 0.0) w += period;
  if (w >= period) w = 0.0;
  return w;
}

/// Signed shortest arc from a to b on a circle of radius r, in [-pi r, pi r].
double arc_delta(double a, double b, double r) { return std::remainder(b - a, kTwoPi * r); }

Vec cross(const Vec& a, const Vec& b) {
  return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

Manifold::Manifold(ManifoldKind kind, std::vector<double> radii, int dimension)
    : kind_(kind), radii_(std::move(radii)), dimension_(dimension) {
  for (double r : radii_) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("manifold radius must be positive and finite");
  }
  switch (kind_) {
    case ManifoldKind::Circle: embedding_dimension_ = 2; break;
    case ManifoldKind::FlatTorus: embedding_dimension_ = 2 * dimension_; break;
    case ManifoldKind::Sphere2: embedding_dimension_ = 3; break;
    case ManifoldKind::Euclidean: embedding_dimension_ = dimension_; break;
  }
  if (dimension_ < 1 || embedding_dimension_ > kMaxDim) {
    throw DomainError("manifold dimension out of supported range");
  }
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(h, static_cast<std::uint64_t>(kind_));
  h = fnv1a(h, static_cast<std::uint64_t>(dimension_));
  for (double r : radii_) h = fnv1a(h, std::bit_cast<std::uint64_t>(r));
  id_ = h;
}

Manifold Manifold::circle(double radius) { return Manifold(ManifoldKind::Circle, {radius}, 1); }

Manifold Manifold::flat_torus(std::vector<double> radii) {
  if (radii.empty()) throw DomainError("flat torus needs at least one factor");
  const int m = static_cast<int>(radii.size());
  return Manifold(ManifoldKind::FlatTorus, std::move(radii), m);
}

Manifold Manifold::sphere(double radius) { return Manifold(ManifoldKind::Sphere2, {radius}, 2); }

Manifold Manifold::euclidean(int dimension) { return Manifold(ManifoldKind::Euclidean, {}, dimension); }

double Manifold::radius() const {
  if (kind_ != ManifoldKind::Circle && kind_ != ManifoldKind::Sphere2) {
    throw DomainError("radius() is defined for circle and sphere only");
  }
  return radii_.front();
}

std::string Manifold::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case ManifoldKind::Circle: os << "circle(r=" << radii_[0] << ")"; break;
    case ManifoldKind::Sphere2: os << "sphere2(r=" << radii_[0] << ")"; break;
    case ManifoldKind::Euclidean: os << "euclidean(m=" << dimension_ << ")"; break;
    case ManifoldKind::FlatTorus:
      os << "torus(r=";
      for (std::size_t i = 0; i < radii_.size(); ++i) os << (i ? "," : "") << radii_[i];
      os << ")";
      break;
  }
  return os.str();
}

double Manifold::injectivity_radius() const {
  if (kind_ == ManifoldKind::Euclidean) return std::numeric_limits<double>::infinity();
  return std::numbers::pi * *std::min_element(radii_.begin(), radii_.end());
}

int Manifold::coordinate_size() const {
  return kind_ == ManifoldKind::Sphere2 ? 3 : dimension_;
}

int Manifold::tangent_size() const { return coordinate_size(); }

void Manifold::require_point(const ManifoldPoint& x) const {
  if (x.manifold_id != id_) throw DomainError("point belongs to a different manifold");
}

void Manifold::require_tangent(const TangentVector& v) const {
  require_point(v.base);
  if (v.components.size() != tangent_size()) throw DomainError("tangent vector has wrong size");
}

ManifoldPoint Manifold::point(const Vec& coords) const {
  if (coords.size() != coordinate_size()) throw DomainError("wrong number of point coordinates");
  ManifoldPoint p{coords, id_};
  switch (kind_) {
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus:
      for (int i = 0; i < dimension_; ++i) p.coords[i] = wrap_arc(coords[i], radii_[i]);
      break;
    case ManifoldKind::Sphere2: {
      const double n = wiener::norm(coords);
      if (!(n > 0.0)) throw DomainError("sphere point must be a nonzero vector");
      p.coords *= radii_[0] / n;
      break;
    }
    case ManifoldKind::Euclidean: break;
  }
  return p;
}

ManifoldPoint Manifold::base_point() const {
  Vec c(coordinate_size(), 0.0);
  if (kind_ == ManifoldKind::Sphere2) c[2] = radii_[0];
  return ManifoldPoint{c, id_};
}

TangentVector Manifold::tangent(const ManifoldPoint& base, const Vec& components) const {
  require_point(base);
  if (components.size() != tangent_size()) throw DomainError("wrong number of tangent components");
  TangentVector v{base, components};
  if (kind_ == ManifoldKind::Sphere2) {
    const Vec n = base.coords * (1.0 / radii_[0]);
    v.components -= n * dot(components, n);
  }
  return v;
}

TangentVector Manifold::zero_tangent(const ManifoldPoint& base) const {
  return tangent(base, Vec(tangent_size(), 0.0));
}

ManifoldPoint Manifold::exp_map(const ManifoldPoint& x, const TangentVector& v) const {
  require_point(x);
  require_tangent(v);
  switch (kind_) {
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus: {
      ManifoldPoint y{x.coords, id_};
      for (int i = 0; i < dimension_; ++i) y.coords[i] = wrap_arc(x.coords[i] + v.components[i], radii_[i]);
      return y;
    }
    case ManifoldKind::Sphere2: {
      const double r = radii_[0];
      const double speed = wiener::norm(v.components);
      if (speed == 0.0) return x;
      const double phi = speed / r;
      const Vec u = v.components * (1.0 / speed);
      Vec y = x.coords * std::cos(phi) + u * (r * std::sin(phi));
      y *= r / wiener::norm(y);
      return ManifoldPoint{y, id_};
    }
    case ManifoldKind::Euclidean: return ManifoldPoint{x.coords + v.components, id_};
  }
  return x;
}

TangentVector Manifold::log_map(const ManifoldPoint& x, const ManifoldPoint& y) const {
  require_point(x);
  require_point(y);
  switch (kind_) {
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus: {
      Vec d(dimension_, 0.0);
      for (int i = 0; i < dimension_; ++i) {
        const double half = std::numbers::pi * radii_[i];
        d[i] = arc_delta(x.coords[i], y.coords[i], radii_[i]);
        if (std::abs(d[i]) >= half * (1.0 - 4.0 * std::numeric_limits<double>::epsilon())) {
          throw CutLocusError("log_map: points are antipodal on a circle factor");
        }
      }
      return TangentVector{x, d};
    }
    case ManifoldKind::Sphere2: {
      const double r = radii_[0];
      const Vec xh = x.coords * (1.0 / r);
      const Vec yh = y.coords * (1.0 / r);
      const double c = dot(xh, yh);
      const Vec w = yh - xh * c;
      const double s = wiener::norm(w);
      if (s == 0.0) {
        if (c > 0.0) return zero_tangent(x);
        throw CutLocusError("log_map: antipodal points on the sphere");
      }
      const double phi = std::atan2(s, c);
      return tangent(x, w * (r * phi / s));
    }
    case ManifoldKind::Euclidean: return TangentVector{x, y.coords - x.coords};
  }
  return zero_tangent(x);
}

TangentVector Manifold::parallel_transport(const ManifoldPoint& x, const TangentVector& v,
                                           const TangentVector& w) const {
  require_point(x);
  require_tangent(v);
  require_tangent(w);
  const ManifoldPoint y = exp_map(x, v);
  if (kind_ != ManifoldKind::Sphere2) return TangentVector{y, w.components};

  // Rotation in the plane spanned by the outward normal and the geodesic
  // direction; the orthogonal complement is carried along unchanged.
  const double r = radii_[0];
  const double speed = wiener::norm(v.components);
  if (speed == 0.0) return TangentVector{y, w.components};
  const double phi = speed / r;
  const Vec u = v.components * (1.0 / speed);
  const Vec xh = x.coords * (1.0 / r);
  const double wu = dot(w.components, u);
  const Vec perp = w.components - u * wu;
  Vec out = perp + (xh * (-std::sin(phi)) + u * std::cos(phi)) * wu;
  const Vec yh = y.coords * (1.0 / r);
  out -= yh * dot(out, yh);
  return TangentVector{y, out};
}

double Manifold::distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
  require_point(x);
  require_point(y);
  switch (kind_) {
    case ManifoldKind::Circle: return std::abs(arc_delta(x.coords[0], y.coords[0], radii_[0]));
    case ManifoldKind::FlatTorus: {
      double s = 0.0;
      for (int i = 0; i < dimension_; ++i) {
        const double d = arc_delta(x.coords[i], y.coords[i], radii_[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case ManifoldKind::Sphere2: {
      const double r = radii_[0];
      const Vec xh = x.coords * (1.0 / r);
      const Vec yh = y.coords * (1.0 / r);
      // atan2 form stays accurate for nearly equal and nearly antipodal points.
      const Vec c = cross(xh, yh);
      return r * std::atan2(wiener::norm(c), dot(xh, yh));
    }
    case ManifoldKind::Euclidean: return wiener::norm(y.coords - x.coords);
  }
  return 0.0;
}

double Manifold::inner(const TangentVector& a, const TangentVector& b) const {
  require_tangent(a);
  require_tangent(b);
  return dot(a.components, b.components);
}

double Manifold::norm(const TangentVector& v) const { return std::sqrt(inner(v, v)); }

Vec Manifold::embed(const ManifoldPoint& x) const {
  require_point(x);
  if (kind_ == ManifoldKind::Sphere2 || kind_ == ManifoldKind::Euclidean) return x.coords;
  Vec e(embedding_dimension_, 0.0);
  for (int i = 0; i < dimension_; ++i) {
    const double r = radii_[i];
    const double a = x.coords[i] / r;
    e[2 * i] = r * std::cos(a);
    e[2 * i + 1] = r * std::sin(a);
  }
  return e;
}

ManifoldPoint Manifold::embed_inverse(const Vec& ambient) const {
  if (ambient.size() != embedding_dimension_) throw DomainError("embed_inverse: wrong ambient dimension");
  constexpr double kTol = 1e-8;
  switch (kind_) {
    case ManifoldKind::Euclidean: return ManifoldPoint{ambient, id_};
    case ManifoldKind::Sphere2: {
      const double n = wiener::norm(ambient);
      if (std::abs(n - radii_[0]) > kTol) throw DomainError("embed_inverse: point is off the sphere");
      return point(ambient);
    }
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus: {
      Vec c(dimension_, 0.0);
      for (int i = 0; i < dimension_; ++i) {
        const double a = ambient[2 * i];
        const double b = ambient[2 * i + 1];
        const double r = radii_[i];
        if (std::abs(std::hypot(a, b) - r) > kTol) throw DomainError("embed_inverse: point is off the circle factor");
        c[i] = r * std::atan2(b, a);
      }
      return point(c);
    }
  }
  return base_point();
}

Vec Manifold::tangent_to_ambient(const TangentVector& v) const {
  require_tangent(v);
  if (kind_ == ManifoldKind::Sphere2 || kind_ == ManifoldKind::Euclidean) return v.components;
  Vec e(embedding_dimension_, 0.0);
  for (int i = 0; i < dimension_; ++i) {
    const double a = v.base.coords[i] / radii_[i];
    e[2 * i] = -std::sin(a) * v.components[i];
    e[2 * i + 1] = std::cos(a) * v.components[i];
  }
  return e;
}

Vec Manifold::project_to_tangent(const ManifoldPoint& x, const Vec& ambient) const {
  require_point(x);
  if (ambient.size() != embedding_dimension_) throw DomainError("project_to_tangent: wrong ambient dimension");
  switch (kind_) {
    case ManifoldKind::Euclidean: return ambient;
    case ManifoldKind::Sphere2: {
      const Vec n = x.coords * (1.0 / radii_[0]);
      return ambient - n * dot(ambient, n);
    }
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus: {
      Vec out = ambient;
      for (int i = 0; i < dimension_; ++i) {
        const double a = x.coords[i] / radii_[i];
        const double n0 = std::cos(a);
        const double n1 = std::sin(a);
        const double d = ambient[2 * i] * n0 + ambient[2 * i + 1] * n1;
        out[2 * i] -= d * n0;
        out[2 * i + 1] -= d * n1;
      }
      return out;
    }
  }
  return ambient;
}

std::vector<TangentVector> Manifold::standard_frame(const ManifoldPoint& x) const {
  require_point(x);
  std::vector<TangentVector> frame;
  frame.reserve(static_cast<std::size_t>(dimension_));
  if (kind_ != ManifoldKind::Sphere2) {
    for (int k = 0; k < dimension_; ++k) {
      Vec e(dimension_, 0.0);
      e[k] = 1.0;
      frame.push_back(TangentVector{x, e});
    }
    return frame;
  }
  const Vec n = x.coords * (1.0 / radii_[0]);
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(n[k]) < std::abs(n[axis]) - 1e-12) axis = k;
  }
  Vec a(3, 0.0);
  a[axis] = 1.0;
  Vec e1 = a - n * dot(a, n);
  e1 *= 1.0 / wiener::norm(e1);
  const Vec e2 = cross(n, e1);
  frame.push_back(TangentVector{x, e1});
  frame.push_back(TangentVector{x, e2});
  return frame;
}

double Manifold::sup_distance_along_geodesic(const ManifoldPoint& center, const ManifoldPoint& a,
                                              const TangentVector& v) const {
  require_point(center);
  require_point(a);
  require_tangent(v);
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return std::max(distance(center, a), wiener::norm(a.coords + v.components - center.coords));
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus: {
      // Each wrapped coordinate offset is piecewise linear in s with kinks
      // where the offset is a multiple of pi r; the squared distance is convex
      // between kinks, so the maximum sits at an endpoint or a kink.
      std::vector<double> candidates{0.0, 1.0};
      for (int i = 0; i < dimension_; ++i) {
        const double vi = v.components[i];
        if (vi == 0.0) continue;
        const double half = std::numbers::pi * radii_[i];
        const double start = a.coords[i] - center.coords[i];
        const double end = start + vi;
        const double lo = std::ceil(std::min(start, end) / half);
        const double hi = std::floor(std::max(start, end) / half);
        for (double k = lo; k <= hi; k += 1.0) candidates.push_back((k * half - start) / vi);
      }
      double best = 0.0;
      for (double s : candidates) {
        if (s < 0.0 || s > 1.0) continue;
        double sq = 0.0;
        for (int i = 0; i < dimension_; ++i) {
          const double d = std::remainder(a.coords[i] + s * v.components[i] - center.coords[i], kTwoPi * radii_[i]);
          sq += d * d;
        }
        best = std::max(best, sq);
      }
      return std::sqrt(best);
    }
    case ManifoldKind::Sphere2: {
      const double r = radii_[0];
      const double speed = wiener::norm(v.components);
      if (speed == 0.0) return distance(center, a);
      const double span = speed / r;
      const Vec ch = center.coords * (1.0 / r);
      const Vec ah = a.coords * (1.0 / r);
      const Vec u = v.components * (1.0 / speed);
      // <center, gamma(s)> = A cos(s) + B sin(s) = R cos(s - psi)
      const double A = dot(ch, ah);
      const double B = dot(ch, u);
      const double R = std::hypot(A, B);
      const double psi = std::atan2(B, A);
      const double first = psi + std::numbers::pi;
      const double k = std::ceil(-first / kTwoPi);
      if (first + k * kTwoPi <= span) return r * std::acos(std::clamp(-R, -1.0, 1.0));
      return std::max(distance(center, a), distance(center, exp_map(a, v)));
    }
  }
  return 0.0;
}

}  // namespace wiener
