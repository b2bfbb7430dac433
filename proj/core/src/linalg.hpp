#pragma once

// Small dense linear algebra used internally (dimension <= kMaxDim).

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace sphmax::detail {

template <typename T>
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<T> a;

  explicit SquareMatrix(std::size_t size) : n{size}, a(size * size, T{0}) {}

  T& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
  T operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

/// Determinant by LU with partial pivoting.
template <typename T>
T determinant(SquareMatrix<T> m) {
  const std::size_t n = m.n;
  T det{1};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(m(r, k)) > std::abs(m(piv, k))) piv = r;
    if (m(piv, k) == T{0}) return T{0};
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(piv, c));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const T f = m(r, k) / m(k, k);
      for (std::size_t c = k; c < n; ++c) m(r, c) -= f * m(k, c);
    }
  }
  return det;
}

/// Inverse by Gauss-Jordan with partial pivoting; returns false when singular.
inline bool invert(SquareMatrix<double> m, SquareMatrix<double>& inv) {
  const std::size_t n = m.n;
  inv = SquareMatrix<double>(n);
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(m(r, k)) > std::abs(m(piv, k))) piv = r;
    if (std::abs(m(piv, k)) < 1e-300) return false;
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(m(k, c), m(piv, c));
      std::swap(inv(k, c), inv(piv, c));
    }
    const double d = m(k, k);
    for (std::size_t c = 0; c < n; ++c) {
      m(k, c) /= d;
      inv(k, c) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const double f = m(r, k);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        m(r, c) -= f * m(k, c);
        inv(r, c) -= f * inv(k, c);
      }
    }
  }
  return true;
}

}  // namespace sphmax::detail
