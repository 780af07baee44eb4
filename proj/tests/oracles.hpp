#pragma once

// Reference values computed without the library's kernels or samplers.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// Wrapped Gaussian on a circle of radius r, variance t, by direct image sum
/// over |k| <= 50.
inline double wrapped_gaussian(double t, double offset, double r) {
  const double c = 2.0 * std::numbers::pi * r;
  double s = 0.0;
  for (int k = -50; k <= 50; ++k) {
    const double d = offset + k * c;
    s += std::exp(-d * d / (2.0 * t));
  }
  return s / std::sqrt(2.0 * std::numbers::pi * t);
}

/// E[P_1(cos theta)] under Brownian motion on the unit sphere at time t.
inline double sphere_zonal_mean(double t) { return std::exp(-t); }

/// E[cos |Z|] for Z ~ N(0, h I_2): sum_k (-1)^k (2h)^k k! / (2k)!.
inline double rayleigh_cos_mean(double h) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -2.0 * h * k / ((2.0 * k - 1.0) * (2.0 * k));
    sum += term;
  }
  return sum;
}

/// E[P_1] at the endpoint of the developed Gaussian path with n equal steps
/// on the unit sphere: each geodesic step multiplies the zonal mean by
/// E[cos |Z|].
inline double geometric_zonal_mean(int n) { return std::pow(rayleigh_cos_mean(1.0 / n), n); }

/// Composite Simpson rule with `panels` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace oracle
