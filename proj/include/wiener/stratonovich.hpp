#pragma once

#include <functional>
#include <string>

#include "wiener/cylinder_measure.hpp"
#include "wiener/functional.hpp"

namespace wiener {

/// Smooth map f: M -> R^N on the embedded manifold.
struct AmbientField {
  std::string name;
  int ambient_dimension = 0;
  std::function<Vec(const ManifoldPoint&)> eval;

  Vec operator()(const ManifoldPoint& x) const { return eval(x); }
};

AmbientField zero_field(const Manifold& manifold);
AmbientField constant_field(const Manifold& manifold, const Vec& value);
/// (-y, x) / r^2 on each circle factor (the angular form on the unit
/// circle); rotation about the third axis on the sphere; the (x_0, x_1)
/// plane in R^m.
AmbientField rotation_field(const Manifold& manifold);
/// Tangential gradient of g(x) = <a, embed(x)>.
AmbientField gradient_field(const Manifold& manifold, const Vec& a);
/// alpha f + beta g.
AmbientField linear_combination(double alpha, const AmbientField& f, double beta, const AmbientField& g);

/// sum_i (f(x_{i-1}) + f(x_i))/2 . (x_i - x_{i-1}) over embedded points, x_0 = base.
double midpoint_sum(const Manifold& manifold, const AmbientField& field, const PathSkeleton& skeleton);
/// Left-point sum sum_i f(x_{i-1}) . (x_i - x_{i-1}).
double ito_sum(const Manifold& manifold, const AmbientField& field, const PathSkeleton& skeleton);
/// Discrete bracket sum_i (f(x_i) - f(x_{i-1})) . (x_i - x_{i-1}).
double covariation_sum(const Manifold& manifold, const AmbientField& field, const PathSkeleton& skeleton);

/// Time reversal: base x_n, then x_{n-1}, ..., x_0 on the partition 1 - t.
PathSkeleton reversed(const PathSkeleton& skeleton);

CylinderFunctional stratonovich_functional(const Manifold& manifold, AmbientField field, PartitionPtr partition);
CylinderFunctional ito_functional(const Manifold& manifold, AmbientField field, PartitionPtr partition);

/// MC estimate of the integral of |midpoint sum|^2 against mu^T.
EstimateReport stratonovich_l2(const AmbientField& field, const CylinderMeasure& measure, const McSettings& settings);

/// MC estimate of E[(midpoint_sum(grad g) - (g(x_{t_n}) - g(x0)))^2] for the
/// linear functional g(x) = <a, embed(x)>.
EstimateReport exact_form_residual(const Vec& a, const CylinderMeasure& measure, const McSettings& settings);

}  // namespace wiener
