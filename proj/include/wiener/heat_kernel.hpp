#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <vector>

#include "wiener/manifold.hpp"
#include "wiener/rng.hpp"

namespace wiener {

enum class KernelMethod { ImageSum, SpectralSum, Gaussian, Product };

const char* to_string(KernelMethod m);

/// Largest Legendre degree the sphere series may use before evaluation is
/// declared nonconvergent.
inline constexpr int kSphereMaxDegree = 256;

/// Heat kernel p_t(x, y) of a supported manifold under the Laplacian/2
/// convention, with truncation error below `tolerance` (absolute density).
///
/// Circle factors switch from the wrapped-Gaussian image sum to the Fourier
/// series at t = r^2. The sphere uses the Legendre series
///   sum_l (2l+1)/(4 pi r^2) exp(-l(l+1) t / (2 r^2)) P_l(cos(d/r)),
/// truncated where the geometric tail bound drops below the tolerance.
class HeatKernel {
 public:
  explicit HeatKernel(Manifold manifold, double tolerance = 1e-12);

  const Manifold& manifold() const { return manifold_; }
  double tolerance() const { return tolerance_; }
  KernelMethod method(double t) const;

  /// p_t(x, y). Throws DomainError for t <= 0 and NumericError when the
  /// sphere series needs more than kSphereMaxDegree terms.
  double operator()(double t, const ManifoldPoint& x, const ManifoldPoint& y) const;

  /// One circle factor as a function of the signed arc offset.
  double circle_image_sum(double t, double arc_offset, double radius) const;
  double circle_spectral_sum(double t, double arc_offset, double radius) const;
  /// Sphere kernel as a function of cos(d / r), before clipping.
  double sphere_series(double t, double cos_angle) const;
  /// Degree at which the sphere series is cut for time t.
  int sphere_truncation_degree(double t) const;
  /// Coefficients (2l+1)/(4 pi r^2) exp(-l(l+1)t/(2r^2)), l = 0..L.
  std::vector<double> sphere_coefficients(double t) const;

  /// |integral_M p_t(x, y) dmu(y) - 1| by the module quadrature rule:
  /// trapezoid per circle factor, Gauss-Legendre in cos(theta) times uniform
  /// azimuth on the sphere, wide trapezoid per coordinate in R^m.
  double normalization_residual(double t, const ManifoldPoint& x, int nodes = 2048) const;
  /// |integral p_s(x,z) p_t(z,y) dmu(z) - p_{s+t}(x,y)| by the same rules.
  double semigroup_residual(double s, double t, const ManifoldPoint& x, const ManifoldPoint& y,
                            int nodes = 2048) const;

  /// Number of evaluations whose series undershot below -tolerance before
  /// being clipped to zero.
  std::size_t clip_events() const { return clip_events_->load(); }

  /// Draws y with density p_t(x, .) d mu. Builds a one-off sampler; use
  /// TransitionSampler for repeated draws at a fixed t.
  ManifoldPoint sample_transition(double t, const ManifoldPoint& x, Rng& rng) const;

 private:
  double clip(double value) const;

  Manifold manifold_;
  double tolerance_;
  std::shared_ptr<std::atomic<std::size_t>> clip_events_;
};

/// Repeated sampling from p_t(x, .) at one fixed t.
///
/// Flat factors add a Gaussian increment and wrap. On the sphere the polar
/// angle theta about x is drawn by rejection: proposal is the truncated
/// Rayleigh law of the flat exponential-map Gaussian, target is
/// 2 pi r^2 sin(theta) p_t(cos theta), envelope is 1.1 times the largest
/// target/proposal ratio on a 512-point scan. A proposal exceeding the
/// envelope triggers a rebuild with a 4x finer scan; the azimuth is uniform.
/// Copies are independent; give each worker its own copy.
class TransitionSampler {
 public:
  TransitionSampler(const HeatKernel& kernel, double t);

  double time() const { return t_; }
  ManifoldPoint sample(const ManifoldPoint& x, Rng& rng);

  /// Target/proposal ratio for the sphere polar angle (exposed for tests).
  double sphere_ratio(double theta) const;
  double envelope() const { return envelope_; }
  int rebuilds() const { return rebuilds_; }
  std::size_t proposals() const { return proposals_; }
  std::size_t accepted() const { return accepted_; }

 private:
  void build_envelope(int scan_points, double floor);
  double sphere_density_cos(double u) const;

  Manifold manifold_;
  double t_;
  double tolerance_;
  std::vector<double> coefficients_;
  double log_proposal_norm_ = 0.0;
  double truncation_mass_ = 1.0;
  double envelope_ = 0.0;
  int scan_points_ = 512;
  int rebuilds_ = 0;
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Legendre polynomial P_l(u) by the three-term recurrence.
double legendre(int l, double u);

}  // namespace wiener
