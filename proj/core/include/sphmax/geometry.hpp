#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sphmax/vec.hpp"

namespace sphmax {

/// A Euclidean sphere C(x, r).
struct Sphere {
  Vec centre;
  double radius = 1.0;

  Sphere() = default;
  Sphere(Vec centre, double radius);

  std::size_t dim() const { return centre.size(); }

  friend bool operator==(const Sphere&, const Sphere&) = default;
};

enum class RegionKind { Annulus, PolarCap };

/// Height fraction of the north-polar cap: a point y of the annulus belongs to
/// the cap when y_n - x_n > polar_height_fraction(n) * r.
inline double polar_height_fraction(std::size_t n) { return 1.0 - 1.0 / (100.0 * static_cast<double>(n)); }

/// The annulus {y : ||y - x| - r| < delta} or its north-polar part.
struct Region {
  Sphere sphere;
  double delta = 0.1;
  RegionKind kind = RegionKind::Annulus;

  Region() = default;
  Region(Sphere sphere, double delta, RegionKind kind = RegionKind::Annulus);

  static Region annulus(Sphere s, double delta) { return {std::move(s), delta, RegionKind::Annulus}; }
  static Region polar_cap(Sphere s, double delta) { return {std::move(s), delta, RegionKind::PolarCap}; }

  std::size_t dim() const { return sphere.dim(); }

  bool contains(const Vec& y) const {
    const std::size_t n = y.size();
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - sphere.centre[i];
      d2 += d * d;
    }
    if (std::abs(std::sqrt(d2) - sphere.radius) >= delta) return false;
    if (kind == RegionKind::Annulus) return true;
    return y[n - 1] - sphere.centre[n - 1] > polar_height_fraction(n) * sphere.radius;
  }

  friend bool operator==(const Region&, const Region&) = default;
};

/// Closed neighbourhood {y : |<normal, y> - offset| <= halfThickness} of an
/// affine hyperplane. The normal is a unit vector.
struct Slab {
  Vec normal;
  double offset = 0.0;
  double halfThickness = 0.0;

  bool contains(const Vec& y) const { return std::abs(dot(normal, y) - offset) <= halfThickness; }
};

/// Distance and unit direction between two sphere centres.
struct DirectionData {
  double dist = 0.0;
  Vec eFull;
  /// Horizontal direction in R^{n-1}; present only when both centres lie on
  /// the slice {x_n = 0}.
  std::optional<Vec> eHoriz;
};

double centre_distance(const Sphere& a, const Sphere& b);

/// Throws std::invalid_argument("degenerate direction") for coincident centres.
DirectionData unit_direction(const Sphere& from, const Sphere& to);

inline bool region_contains(const Region& region, const Vec& y) { return region.contains(y); }

/// Slab containing Annulus(a, delta) ∩ Annulus(b, delta). The hyperplane comes
/// from subtracting the two sphere equations; the half-thickness is the exact
/// range of that offset over radii perturbed by less than delta:
/// ((r_a + r_b) delta + delta^2) / dist.
Slab slab_of_pair(const Sphere& a, const Sphere& b, double delta);

/// Residual norms below this (relative to the input norm) mark a dependent set.
inline constexpr double kDependenceTolerance = 1e-12;

/// Component of v orthogonal to span(basis), by sequential Gram-Schmidt with
/// reorthogonalisation. Throws std::invalid_argument for a dependent basis.
Vec proj_orthocomplement(std::span<const Vec> basis, const Vec& v);

/// |x_1 ∧ ... ∧ x_l| as the square root of the Gram determinant.
double wedge_norm_gram(std::span<const Vec> vectors);

/// |x_1 ∧ ... ∧ x_l| as |x_1| * prod_j |proj_{<x_1..x_{j-1}>^perp} x_j|.
double wedge_norm_projection(std::span<const Vec> vectors);

/// Both routes are evaluated; the Gram value is returned. Dependent input
/// returns 0.
double wedge_norm(std::span<const Vec> vectors);

}  // namespace sphmax
