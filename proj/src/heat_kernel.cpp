#include "wiener/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

#include "wiener/errors.hpp"

namespace wiener {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxEnvelopeRebuilds = 6;

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat kernel time must be positive");
}

/// Gaussian density in one coordinate.
double gauss1(double t, double d) { return std::exp(-d * d / (2.0 * t)) / std::sqrt(kTwoPi * t); }

/// Trapezoid over a window of +-40 standard deviations; spectrally accurate
/// for Gaussian integrands.
template <class F>
double wide_trapezoid(double center, double sigma, int nodes, F&& f) {
  const double half = 40.0 * sigma;
  const double h = 2.0 * half / nodes;
  double s = 0.0;
  for (int j = 0; j <= nodes; ++j) {
    const double w = (j == 0 || j == nodes) ? 0.5 : 1.0;
    s += w * f(center - half + j * h);
  }
  return s * h;
}

}  // namespace

const char* to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::ImageSum: return "image_sum";
    case KernelMethod::SpectralSum: return "spectral_sum";
    case KernelMethod::Gaussian: return "gaussian";
    case KernelMethod::Product: return "product";
  }
  return "?";
}

double legendre(int l, double u) {
  if (l == 0) return 1.0;
  double p0 = 1.0;
  double p1 = u;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * u * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

HeatKernel::HeatKernel(Manifold manifold, double tolerance)
    : manifold_(std::move(manifold)),
      tolerance_(tolerance),
      clip_events_(std::make_shared<std::atomic<std::size_t>>(0)) {
  if (!(tolerance_ > 0.0)) throw DomainError("kernel tolerance must be positive");
}

KernelMethod HeatKernel::method(double t) const {
  switch (manifold_.kind()) {
    case ManifoldKind::Circle:
      return t < manifold_.radius() * manifold_.radius() ? KernelMethod::ImageSum : KernelMethod::SpectralSum;
    case ManifoldKind::FlatTorus: return KernelMethod::Product;
    case ManifoldKind::Sphere2: return KernelMethod::SpectralSum;
    case ManifoldKind::Euclidean: return KernelMethod::Gaussian;
  }
  return KernelMethod::Gaussian;
}

double HeatKernel::circle_image_sum(double t, double arc_offset, double radius) const {
  require_time(t);
  const double period = kTwoPi * radius;
  const double d = std::remainder(arc_offset, period);
  const double norm = 1.0 / std::sqrt(kTwoPi * t);
  double sum = norm * std::exp(-d * d / (2.0 * t));
  // Terms decrease monotonically in |k| once |k| >= 1; stop when both sides
  // are far below the tolerance.
  for (int k = 1;; ++k) {
    const double a = d + period * k;
    const double b = d - period * k;
    const double ta = norm * std::exp(-a * a / (2.0 * t));
    const double tb = norm * std::exp(-b * b / (2.0 * t));
    sum += ta + tb;
    if (ta + tb < 1e-3 * tolerance_) break;
    if (k > 100000) throw NumericError("circle image sum failed to converge");
  }
  return sum;
}

double HeatKernel::circle_spectral_sum(double t, double arc_offset, double radius) const {
  require_time(t);
  const double base = 1.0 / (kTwoPi * radius);
  double sum = base;
  for (int n = 1;; ++n) {
    const double damp = std::exp(-static_cast<double>(n) * n * t / (2.0 * radius * radius));
    sum += 2.0 * base * damp * std::cos(n * arc_offset / radius);
    if (2.0 * base * damp < 1e-3 * tolerance_) break;
    if (n > 1000000) throw NumericError("circle spectral sum failed to converge");
  }
  return sum;
}

int HeatKernel::sphere_truncation_degree(double t) const {
  require_time(t);
  const double r = manifold_.radius();
  const double r2 = r * r;
  for (int l = 0; l <= kSphereMaxDegree; ++l) {
    const double tail = (2.0 * l + 3.0) / (4.0 * kPi * r2) * std::exp(-(l + 1.0) * (l + 2.0) * t / (2.0 * r2)) /
                        (1.0 - std::exp(-(l + 2.0) * t / r2));
    if (tail < tolerance_) return l;
  }
  throw NumericError("sphere heat kernel: truncation degree exceeds cap of 256 (t too small)");
}

std::vector<double> HeatKernel::sphere_coefficients(double t) const {
  const int L = sphere_truncation_degree(t);
  const double r2 = manifold_.radius() * manifold_.radius();
  std::vector<double> c(static_cast<std::size_t>(L + 1));
  for (int l = 0; l <= L; ++l) {
    c[static_cast<std::size_t>(l)] = (2.0 * l + 1.0) / (4.0 * kPi * r2) * std::exp(-l * (l + 1.0) * t / (2.0 * r2));
  }
  return c;
}

namespace {

double legendre_series(const std::vector<double>& c, double u) {
  double p0 = 1.0;
  double p1 = u;
  double sum = c[0];
  if (c.size() > 1) sum += c[1] * u;
  for (std::size_t l = 2; l < c.size(); ++l) {
    const double k = static_cast<double>(l);
    const double p2 = ((2.0 * k - 1.0) * u * p1 - (k - 1.0) * p0) / k;
    sum += c[l] * p2;
    p0 = p1;
    p1 = p2;
  }
  return sum;
}

}  // namespace

double HeatKernel::sphere_series(double t, double cos_angle) const {
  return legendre_series(sphere_coefficients(t), std::clamp(cos_angle, -1.0, 1.0));
}

double HeatKernel::clip(double value) const {
  if (value >= 0.0) return value;
  if (value < -tolerance_) {
    if (clip_events_->fetch_add(1) == 0) {
      std::clog << "warning: heat kernel series undershot to " << value << "; clipped to 0\n";
    }
  }
  return 0.0;
}

double HeatKernel::operator()(double t, const ManifoldPoint& x, const ManifoldPoint& y) const {
  require_time(t);
  manifold_.require_point(x);
  manifold_.require_point(y);
  switch (manifold_.kind()) {
    case ManifoldKind::Circle: {
      const double r = manifold_.radius();
      const double d = y.coords[0] - x.coords[0];
      return clip(method(t) == KernelMethod::ImageSum ? circle_image_sum(t, d, r) : circle_spectral_sum(t, d, r));
    }
    case ManifoldKind::FlatTorus: {
      double p = 1.0;
      for (int i = 0; i < manifold_.dimension(); ++i) {
        const double r = manifold_.radii()[static_cast<std::size_t>(i)];
        const double d = y.coords[i] - x.coords[i];
        p *= t < r * r ? circle_image_sum(t, d, r) : circle_spectral_sum(t, d, r);
      }
      return clip(p);
    }
    case ManifoldKind::Sphere2: {
      const double r = manifold_.radius();
      const double u = std::cos(manifold_.distance(x, y) / r);
      return clip(sphere_series(t, u));
    }
    case ManifoldKind::Euclidean: {
      const double d2 = dot(y.coords - x.coords, y.coords - x.coords);
      return std::pow(kTwoPi * t, -0.5 * manifold_.dimension()) * std::exp(-d2 / (2.0 * t));
    }
  }
  return 0.0;
}

double HeatKernel::normalization_residual(double t, const ManifoldPoint& x, int nodes) const {
  require_time(t);
  manifold_.require_point(x);
  if (nodes < 2) throw DomainError("quadrature needs at least two nodes");
  switch (manifold_.kind()) {
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus: {
      // Tensor trapezoid; the kernel is a product over factors so the grid sum
      // factorizes exactly.
      double total = 1.0;
      for (int i = 0; i < manifold_.dimension(); ++i) {
        const double r = manifold_.radii()[static_cast<std::size_t>(i)];
        const double h = kTwoPi * r / nodes;
        double s = 0.0;
        for (int j = 0; j < nodes; ++j) {
          const double d = j * h;
          s += t < r * r ? circle_image_sum(t, d, r) : circle_spectral_sum(t, d, r);
        }
        total *= s * h;
      }
      return std::abs(total - 1.0);
    }
    case ManifoldKind::Sphere2: {
      const double r = manifold_.radius();
      const int n_polar = std::max(32, nodes / 16);
      const int n_az = 2 * n_polar;
      std::vector<double> u, w;
      gauss_legendre(n_polar, u, w);
      const std::vector<double> c = sphere_coefficients(t);
      const Vec xh = x.coords * (1.0 / r);
      double s = 0.0;
      for (int i = 0; i < n_polar; ++i) {
        const double z = u[static_cast<std::size_t>(i)];
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double ring = 0.0;
        for (int j = 0; j < n_az; ++j) {
          const double phi = kTwoPi * j / n_az;
          const double cosang = xh[0] * rho * std::cos(phi) + xh[1] * rho * std::sin(phi) + xh[2] * z;
          ring += clip(legendre_series(c, std::clamp(cosang, -1.0, 1.0)));
        }
        s += w[static_cast<std::size_t>(i)] * ring * (kTwoPi / n_az);
      }
      return std::abs(s * r * r - 1.0);
    }
    case ManifoldKind::Euclidean: {
      double total = 1.0;
      const double sigma = std::sqrt(t);
      for (int i = 0; i < manifold_.dimension(); ++i) {
        const double c = x.coords[i];
        total *= wide_trapezoid(c, sigma, nodes, [&](double z) { return gauss1(t, z - c); });
      }
      return std::abs(total - 1.0);
    }
  }
  return 0.0;
}

double HeatKernel::semigroup_residual(double s, double t, const ManifoldPoint& x, const ManifoldPoint& y,
                                      int nodes) const {
  require_time(s);
  require_time(t);
  manifold_.require_point(x);
  manifold_.require_point(y);
  if (nodes < 2) throw DomainError("quadrature needs at least two nodes");
  const double exact = (*this)(s + t, x, y);
  switch (manifold_.kind()) {
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus: {
      double total = 1.0;
      for (int i = 0; i < manifold_.dimension(); ++i) {
        const double r = manifold_.radii()[static_cast<std::size_t>(i)];
        const double h = kTwoPi * r / nodes;
        auto k1 = [&](double tt, double d) {
          return tt < r * r ? circle_image_sum(tt, d, r) : circle_spectral_sum(tt, d, r);
        };
        double acc = 0.0;
        for (int j = 0; j < nodes; ++j) {
          const double z = x.coords[i] + j * h;
          acc += k1(s, z - x.coords[i]) * k1(t, y.coords[i] - z);
        }
        total *= acc * h;
      }
      return std::abs(total - exact);
    }
    case ManifoldKind::Sphere2: {
      const double r = manifold_.radius();
      const int n_polar = std::max(32, nodes / 16);
      const int n_az = 2 * n_polar;
      std::vector<double> u, w;
      gauss_legendre(n_polar, u, w);
      const std::vector<double> cs = sphere_coefficients(s);
      const std::vector<double> ct = sphere_coefficients(t);
      const Vec xh = x.coords * (1.0 / r);
      const Vec yh = y.coords * (1.0 / r);
      double acc = 0.0;
      for (int i = 0; i < n_polar; ++i) {
        const double z = u[static_cast<std::size_t>(i)];
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double ring = 0.0;
        for (int j = 0; j < n_az; ++j) {
          const double phi = kTwoPi * j / n_az;
          const Vec zh{rho * std::cos(phi), rho * std::sin(phi), z};
          ring += clip(legendre_series(cs, std::clamp(dot(xh, zh), -1.0, 1.0))) *
                  clip(legendre_series(ct, std::clamp(dot(zh, yh), -1.0, 1.0)));
        }
        acc += w[static_cast<std::size_t>(i)] * ring * (kTwoPi / n_az);
      }
      return std::abs(acc * r * r - exact);
    }
    case ManifoldKind::Euclidean: {
      double total = 1.0;
      const double sigma = std::sqrt(s * t / (s + t));
      for (int i = 0; i < manifold_.dimension(); ++i) {
        const double a = x.coords[i];
        const double b = y.coords[i];
        const double center = (t * a + s * b) / (s + t);
        total *= wide_trapezoid(center, sigma, nodes, [&](double z) { return gauss1(s, z - a) * gauss1(t, b - z); });
      }
      return std::abs(total - exact);
    }
  }
  return 0.0;
}

ManifoldPoint HeatKernel::sample_transition(double t, const ManifoldPoint& x, Rng& rng) const {
  TransitionSampler sampler(*this, t);
  return sampler.sample(x, rng);
}

TransitionSampler::TransitionSampler(const HeatKernel& kernel, double t)
    : manifold_(kernel.manifold()), t_(t), tolerance_(kernel.tolerance()) {
  require_time(t);
  if (manifold_.kind() != ManifoldKind::Sphere2) return;
  coefficients_ = kernel.sphere_coefficients(t);
  const double r = manifold_.radius();
  truncation_mass_ = -std::expm1(-kPi * kPi * r * r / (2.0 * t));
  log_proposal_norm_ = std::log(kTwoPi * t * truncation_mass_);
  build_envelope(scan_points_, 0.0);
}

double TransitionSampler::sphere_density_cos(double u) const {
  return legendre_series(coefficients_, std::clamp(u, -1.0, 1.0));
}

double TransitionSampler::sphere_ratio(double theta) const {
  const double r = manifold_.radius();
  const double k = sphere_density_cos(std::cos(theta));
  // Below the truncation tolerance the series is rounding noise; treating it
  // as zero keeps the ratio finite where the proposal tail underflows.
  if (k <= tolerance_) return 0.0;
  const double sinc = theta == 0.0 ? 1.0 : std::sin(theta) / theta;
  if (sinc <= 0.0) return 0.0;
  const double log_ratio = log_proposal_norm_ + std::log(k) + std::log(sinc) + r * r * theta * theta / (2.0 * t_);
  if (log_ratio > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(log_ratio);
}

void TransitionSampler::build_envelope(int scan_points, double floor) {
  double peak = floor;
  for (int j = 0; j < scan_points; ++j) {
    const double theta = kPi * (j + 0.5) / scan_points;
    peak = std::max(peak, sphere_ratio(theta));
  }
  if (!std::isfinite(peak) || !(peak > 0.0)) throw NumericError("sphere sampler: degenerate rejection envelope");
  scan_points_ = scan_points;
  envelope_ = 1.1 * peak;
}

ManifoldPoint TransitionSampler::sample(const ManifoldPoint& x, Rng& rng) {
  manifold_.require_point(x);
  switch (manifold_.kind()) {
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus:
    case ManifoldKind::Euclidean: {
      const double sd = std::sqrt(t_);
      Vec step(manifold_.dimension(), 0.0);
      for (int i = 0; i < step.size(); ++i) step[i] = sd * standard_normal(rng);
      return manifold_.exp_map(x, TangentVector{x, step});
    }
    case ManifoldKind::Sphere2: break;
  }

  const double r = manifold_.radius();
  double theta = 0.0;
  for (;;) {
    ++proposals_;
    const double u = uniform01(rng);
    const double rho = std::sqrt(-2.0 * t_ * std::log1p(-u * truncation_mass_));
    theta = std::min(rho / r, kPi);
    const double ratio = sphere_ratio(theta);
    if (ratio > envelope_) {
      if (rebuilds_ >= kMaxEnvelopeRebuilds) {
        throw NumericError("sphere sampler: rejection envelope rebuilds exhausted");
      }
      ++rebuilds_;
      build_envelope(4 * scan_points_, std::isfinite(ratio) ? ratio : 0.0);
      continue;
    }
    if (uniform01(rng) * envelope_ <= ratio) break;
  }
  ++accepted_;
  const double phi = kTwoPi * uniform01(rng);
  const auto frame = manifold_.standard_frame(x);
  const Vec dir = frame[0].components * std::cos(phi) + frame[1].components * std::sin(phi);
  return manifold_.exp_map(x, TangentVector{x, dir * (r * theta)});
}

}  // namespace wiener
