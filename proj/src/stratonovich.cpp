#include "wiener/stratonovich.hpp"

#include <sstream>

#include "wiener/errors.hpp"

namespace wiener {

AmbientField zero_field(const Manifold& manifold) {
  const int n = manifold.embedding_dimension();
  return {"zero", n, [n](const ManifoldPoint&) { return Vec(n, 0.0); }};
}

AmbientField constant_field(const Manifold& manifold, const Vec& value) {
  if (value.size() != manifold.embedding_dimension()) throw DomainError("constant field has wrong dimension");
  return {"constant", value.size(), [value](const ManifoldPoint&) { return value; }};
}

AmbientField rotation_field(const Manifold& manifold) {
  const int n = manifold.embedding_dimension();
  switch (manifold.kind()) {
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus:
      return {"rotation", n, [manifold, n](const ManifoldPoint& x) {
                const Vec e = manifold.embed(x);
                Vec f(n, 0.0);
                for (int k = 0; k < manifold.dimension(); ++k) {
                  const double r = manifold.radii()[static_cast<std::size_t>(k)];
                  f[2 * k] = -e[2 * k + 1] / (r * r);
                  f[2 * k + 1] = e[2 * k] / (r * r);
                }
                return f;
              }};
    case ManifoldKind::Sphere2: {
      const double r2 = manifold.radius() * manifold.radius();
      return {"rotation", 3, [r2](const ManifoldPoint& x) { return Vec{-x.coords[1] / r2, x.coords[0] / r2, 0.0}; }};
    }
    case ManifoldKind::Euclidean:
      if (n < 2) throw DomainError("rotation field needs dimension >= 2");
      return {"rotation", n, [n](const ManifoldPoint& x) {
                Vec f(n, 0.0);
                f[0] = -x.coords[1];
                f[1] = x.coords[0];
                return f;
              }};
  }
  throw DomainError("rotation field: unsupported manifold");
}

AmbientField gradient_field(const Manifold& manifold, const Vec& a) {
  if (a.size() != manifold.embedding_dimension()) throw DomainError("gradient field coefficient has wrong dimension");
  std::ostringstream os;
  os << "gradient(";
  for (int i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << ")";
  return {os.str(), a.size(), [manifold, a](const ManifoldPoint& x) { return manifold.project_to_tangent(x, a); }};
}

AmbientField linear_combination(double alpha, const AmbientField& f, double beta, const AmbientField& g) {
  if (f.ambient_dimension != g.ambient_dimension) throw DomainError("fields have different dimensions");
  std::ostringstream os;
  os << alpha << "*" << f.name << "+" << beta << "*" << g.name;
  return {os.str(), f.ambient_dimension, [alpha, beta, f, g](const ManifoldPoint& x) { return f(x) * alpha + g(x) * beta; }};
}

namespace {

void require_field(const Manifold& manifold, const AmbientField& field) {
  if (field.ambient_dimension != manifold.embedding_dimension()) throw DomainError("field dimension differs from embedding");
}

/// Accumulates sum_i w(f_{i-1}, f_i) . (e_i - e_{i-1}).
template <class Weight>
double riemann_sum(const Manifold& manifold, const AmbientField& field, const PathSkeleton& s, Weight&& weight) {
  require_field(manifold, field);
  Vec e_prev = manifold.embed(s.base);
  Vec f_prev = field(s.base);
  double total = 0.0;
  for (const ManifoldPoint& x : s.points) {
    const Vec e = manifold.embed(x);
    const Vec f = field(x);
    total += dot(weight(f_prev, f), e - e_prev);
    e_prev = e;
    f_prev = f;
  }
  return total;
}

}  // namespace

double midpoint_sum(const Manifold& manifold, const AmbientField& field, const PathSkeleton& skeleton) {
  return riemann_sum(manifold, field, skeleton, [](const Vec& a, const Vec& b) { return (a + b) * 0.5; });
}

double ito_sum(const Manifold& manifold, const AmbientField& field, const PathSkeleton& skeleton) {
  return riemann_sum(manifold, field, skeleton, [](const Vec& a, const Vec&) { return a; });
}

double covariation_sum(const Manifold& manifold, const AmbientField& field, const PathSkeleton& skeleton) {
  return riemann_sum(manifold, field, skeleton, [](const Vec& a, const Vec& b) { return b - a; });
}

PathSkeleton reversed(const PathSkeleton& skeleton) {
  const auto& t = skeleton.partition->times();
  std::vector<double> rt(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) rt[i] = 1.0 - t[t.size() - 1 - i];
  rt.front() = 0.0;
  rt.back() = 1.0;
  PathSkeleton out{make_partition(Partition(std::move(rt))), skeleton.endpoint(), {}};
  const int n = skeleton.partition->segments();
  for (int i = n - 1; i >= 0; --i) out.points.push_back(skeleton.at(i));
  return out;
}

CylinderFunctional stratonovich_functional(const Manifold& manifold, AmbientField field, PartitionPtr partition) {
  require_field(manifold, field);
  std::string name = "stratonovich:" + field.name;
  return {std::move(partition), std::move(name),
          [manifold, field = std::move(field)](const PathSkeleton& s) { return midpoint_sum(manifold, field, s); }};
}

CylinderFunctional ito_functional(const Manifold& manifold, AmbientField field, PartitionPtr partition) {
  require_field(manifold, field);
  std::string name = "ito:" + field.name;
  return {std::move(partition), std::move(name),
          [manifold, field = std::move(field)](const PathSkeleton& s) { return ito_sum(manifold, field, s); }};
}

EstimateReport stratonovich_l2(const AmbientField& field, const CylinderMeasure& measure, const McSettings& settings) {
  const Manifold& mf = measure.manifold();
  require_field(mf, field);
  const CylinderFunctional sq(measure.partition(), "stratonovich_sq:" + field.name, [mf, field](const PathSkeleton& s) {
    const double v = midpoint_sum(mf, field, s);
    return v * v;
  });
  return expectation_mc(measure, sq, settings);
}

EstimateReport exact_form_residual(const Vec& a, const CylinderMeasure& measure, const McSettings& settings) {
  const Manifold& mf = measure.manifold();
  const AmbientField grad = gradient_field(mf, a);
  const CylinderFunctional res(measure.partition(), "exact_form_residual:" + grad.name, [mf, grad, a](const PathSkeleton& s) {
    const double exact = dot(a, mf.embed(s.endpoint())) - dot(a, mf.embed(s.base));
    const double d = midpoint_sum(mf, grad, s) - exact;
    return d * d;
  });
  return expectation_mc(measure, res, settings);
}

}  // namespace wiener
