#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace sphmax {

/// Largest ambient dimension supported by the fixed-capacity vector type.
inline constexpr std::size_t kMaxDim = 8;

/// Small fixed-capacity real vector. Stored inline so that hot sampling loops
/// never allocate.
class Vec {
 public:
  Vec() = default;

  explicit Vec(std::size_t dim) : n_{dim} {
    if (dim > kMaxDim) throw std::invalid_argument("Vec: dimension exceeds kMaxDim");
  }

  Vec(std::initializer_list<double> values) : Vec(values.size()) {
    std::copy(values.begin(), values.end(), c_.begin());
  }

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }

  double* begin() { return c_.data(); }
  double* end() { return c_.data() + n_; }
  const double* begin() const { return c_.data(); }
  const double* end() const { return c_.data() + n_; }
  const double* data() const { return c_.data(); }

  double back() const { return c_[n_ - 1]; }

  Vec& operator+=(const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (std::size_t i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (std::size_t i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }

  friend bool operator==(const Vec& a, const Vec& b) {
    return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t n_ = 0;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// First n-1 coordinates.
inline Vec horizontal(const Vec& a) {
  Vec h(a.size() - 1);
  for (std::size_t i = 0; i + 1 < a.size(); ++i) h[i] = a[i];
  return h;
}

/// Appends a last coordinate.
inline Vec lift(const Vec& h, double last) {
  Vec a(h.size() + 1);
  for (std::size_t i = 0; i < h.size(); ++i) a[i] = h[i];
  a[h.size()] = last;
  return a;
}

inline Vec unit_axis(std::size_t dim, std::size_t axis) {
  Vec e(dim);
  e[axis] = 1.0;
  return e;
}

/// Cross product; both inputs must be three-dimensional.
inline Vec cross(const Vec& a, const Vec& b) {
  return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace sphmax
