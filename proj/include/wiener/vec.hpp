#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace wiener {

/// Largest ambient dimension handled by the fixed-capacity vector below.
inline constexpr int kMaxDim = 8;

/// Small fixed-capacity real vector used for points, tangent vectors and
/// ambient embeddings. Stored inline so hot Monte-Carlo loops never allocate.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int size, double fill = 0.0) : size_(check(size)) {
    std::fill_n(data_.begin(), size_, fill);
  }
  Vec(std::initializer_list<double> values) : size_(check(static_cast<int>(values.size()))) {
    std::copy(values.begin(), values.end(), data_.begin());
  }
  explicit Vec(std::span<const double> values) : size_(check(static_cast<int>(values.size()))) {
    std::copy(values.begin(), values.end(), data_.begin());
  }

  int size() const { return size_; }
  double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }
  const double* begin() const { return data_.data(); }
  const double* end() const { return data_.data() + size_; }
  double* begin() { return data_.data(); }
  double* end() { return data_.data() + size_; }
  std::span<const double> span() const { return {data_.data(), static_cast<std::size_t>(size_)}; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < size_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < size_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < size_; ++i) data_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }
  friend bool operator==(const Vec& a, const Vec& b) {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  static int check(int size) {
    if (size < 0 || size > kMaxDim) throw std::length_error("Vec: dimension exceeds kMaxDim");
    return size;
  }

  std::array<double, kMaxDim> data_{};
  int size_ = 0;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace wiener
