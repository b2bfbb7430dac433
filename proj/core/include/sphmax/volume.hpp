#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sphmax/geometry.hpp"
#include "sphmax/vec.hpp"

namespace sphmax {

/// Axis-aligned box [lo, hi].
struct Box {
  Vec lo;
  Vec hi;

  std::size_t dim() const { return lo.size(); }
  bool empty() const;
  double volume() const;
  bool contains(const Vec& y) const;

  /// Half-length of the box's projection onto the direction u (its support
  /// radius about the centre).
  double support_radius(const Vec& u) const;
  Vec centre() const { return (lo + hi) * 0.5; }

  static Box intersect(const Box& a, const Box& b);
  static Box cube(std::size_t dim, double lo, double hi);
};

Box bounding_box(const Region& region);

/// Intersection of the regions' bounding boxes; contains ∩ regions.
Box bounding_box(std::span<const Region> regions);

enum class VolumeMethod { MonteCarlo, Grid };

struct VolumeEstimate {
  double value = 0.0;
  /// Binomial standard error for MonteCarlo. A run with zero hits reports
  /// domainVolume / samples so that 3 * stdError is the one-sided 95% bound.
  /// For Grid, the endpoint-rounding model h^n * sqrt(E / 12).
  double stdError = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  VolumeMethod method = VolumeMethod::MonteCarlo;
  /// Volume of the domain that was sampled (MonteCarlo) or swept (Grid).
  double domainVolume = 0.0;

  friend bool operator==(const VolumeEstimate&, const VolumeEstimate&) = default;
};

struct McOptions {
  /// Restrict sampling to the box intersected with the pairwise slabs.
  bool clipWithSlabs = true;
};

/// Uniform sampling domain: a parallelepiped given by independent slab
/// coordinates plus orthonormal complement coordinates, each clipped to the
/// box's projection.
class SamplingDomain {
 public:
  SamplingDomain(const Box& box, std::span<const Slab> slabs);

  bool empty() const { return empty_; }
  double volume() const { return volume_; }
  std::size_t dim() const { return dim_; }
  std::size_t slab_count() const { return slabCount_; }

  /// Maps unit-cube coordinates to a point of the domain.
  Vec point(std::span<const double> unit) const;

 private:
  std::size_t dim_ = 0;
  std::size_t slabCount_ = 0;
  bool empty_ = false;
  double volume_ = 0.0;
  std::vector<double> lo_;
  std::vector<double> width_;
  std::vector<double> inverse_;  // row-major dim x dim
};

/// Pairwise slabs of all region pairs with distinct centres.
std::vector<Slab> pairwise_slabs(std::span<const Region> regions);

/// Monte-Carlo estimate of |∩ regions|. Deterministic for a fixed seed and
/// independent of the number of worker threads. Throws for samples == 0.
VolumeEstimate mc_volume(std::span<const Region> regions, const Box& box, std::uint64_t samples, std::uint64_t seed,
                         McOptions options = {});

/// Same, with box = bounding_box(regions).
VolumeEstimate mc_volume(std::span<const Region> regions, std::uint64_t samples, std::uint64_t seed,
                         McOptions options = {});

/// Cell-centre rasterisation on a grid of spacing h anchored at the corner of
/// bounding_box(regions). Each column along the last axis is counted from the
/// exact membership intervals. Requires h <= delta / 4 for every region.
VolumeEstimate grid_volume(std::span<const Region> regions, double h);

/// Same grid, testing every cell centre with Region::contains.
VolumeEstimate grid_volume_cellwise(std::span<const Region> regions, double h);

/// (d)-volume of ∩ slabs ∩ box for slabs in R^d with independent normals.
/// Uses prod(2 w_j) / |n_1 ∧ ... ∧ n_k| when the parallelepiped lies inside the
/// box, exact box arithmetic for axis-aligned normals, and a column sweep with
/// exact column lengths otherwise.
double parallelepiped_volume(std::span<const Slab> slabs, const Box& box);

struct BoundPrediction {
  int m = 2;
  double delta = 0.0;
  std::vector<double> tList;      // t_2 .. t_m
  std::vector<double> thetaList;  // theta_3 .. theta_m
  double value = 0.0;
};

/// delta^m / (prod t_j prod theta_j). Requires delta <= t_j <= 1 and
/// delta / t_j <= theta_j <= 1.
BoundPrediction predicted_tuple_bound(int m, double delta, std::span<const double> tList,
                                      std::span<const double> thetaList);

/// Volume of the unit ball in R^n.
double unit_ball_volume(std::size_t n);

/// Fraction of the unit sphere S^{n-1} with last coordinate > a.
double spherical_cap_fraction(std::size_t n, double a);

double annulus_volume(std::size_t n, double radius, double delta);
double polar_cap_volume(std::size_t n, double radius, double delta);
double region_volume(const Region& region);

}  // namespace sphmax
