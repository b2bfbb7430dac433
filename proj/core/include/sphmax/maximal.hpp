#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "sphmax/configurations.hpp"
#include "sphmax/geometry.hpp"
#include "sphmax/rng.hpp"
#include "sphmax/volume.hpp"

namespace sphmax {

struct IndicatorBall {
  Vec centre;
  double radius = 1.0;
};

struct IndicatorAnnulus {
  Sphere sphere;
  double delta = 0.1;
};

struct Constant {
  double value = 0.0;
};

/// Indicator of the open half-space {y : <normal, y> > offset}.
struct IndicatorHalfSpace {
  Vec normal;
  double offset = 0.0;
};

/// Non-negative samples on a regular grid. Cell i covers
/// [origin + i h, origin + (i + 1) h) per axis; the field is zero outside.
/// Values are stored row-major with the last axis fastest.
class VoxelGrid {
 public:
  VoxelGrid(Vec origin, double spacing, std::vector<std::size_t> extents, std::vector<double> values);

  const Vec& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const std::vector<std::size_t>& extents() const { return extents_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t dim() const { return extents_.size(); }

  double value_at(const Vec& y) const;
  Box box() const;

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

 private:
  Vec origin_;
  double spacing_ = 1.0;
  std::vector<std::size_t> extents_;
  std::vector<double> values_;
};

void write_voxel_grid(std::ostream& out, const VoxelGrid& grid);
VoxelGrid read_voxel_grid(std::istream& in);

using FieldTerm = std::variant<IndicatorBall, IndicatorAnnulus, Constant, IndicatorHalfSpace, VoxelGrid>;

/// Finite sum of non-negative terms.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(FieldTerm term) { terms_.push_back(std::move(term)); }  // NOLINT(google-explicit-constructor)

  const std::vector<FieldTerm>& terms() const { return terms_; }
  double operator()(const Vec& y) const;

  friend ScalarField operator+(ScalarField a, const ScalarField& b);

 private:
  std::vector<FieldTerm> terms_;
};

/// Bounding box of a term's support; nullopt for unbounded support.
std::optional<Box> term_support(const FieldTerm& term);
double term_value(const FieldTerm& term, const Vec& y);

struct AverageEstimate {
  double value = 0.0;
  double stdError = 0.0;
};

/// Uniform point of the region: exact radial sampling for annuli, rejection
/// from the bounding box for polar caps.
Vec sample_in_region(const Region& region, Rng& rng);

/// (1/|R|) ∫_R f with |R| analytic. Constant terms are exact. Each other term
/// is sampled either over its support box (when that is smaller than R) or
/// over R itself; terms draw from substreams (seed, term index).
AverageEstimate region_average(const ScalarField& f, const Region& region, std::uint64_t samples, std::uint64_t seed);

struct MaxProbeConfig {
  std::size_t n = 3;
  double delta = 1.0 / 16.0;
  /// Lebesgue exponent; defaults to p_n = n / (n - 1) when 0.
  double p = 0.0;
  /// Radius grid step; defaults to delta / 2 when 0.
  double radiusStep = 0.0;
  double rMin = 1.0;
  double rMax = 2.0;
  std::uint64_t samples = 4096;
  std::uint64_t seed = 1;

  double exponent() const;
  double step() const;
  void validate() const;
};

inline double critical_exponent(std::size_t n) { return static_cast<double>(n) / (static_cast<double>(n) - 1.0); }

/// Radii rMin, rMin + step, ..., with rMax always included.
std::vector<double> radius_grid(const MaxProbeConfig& cfg);

struct MaxValue {
  double value = 0.0;
  double stdError = 0.0;
  double radius = 0.0;
};

/// max over the radius grid of region_average(f, C^delta(x, r)). The average at
/// (x, r_k) uses substream (cfg.seed, pointIndex, k).
MaxValue eval_max(const ScalarField& f, const Vec& x, const MaxProbeConfig& cfg, RegionKind variant,
                  std::uint64_t pointIndex = 0);

/// (sum |v|^p h^d)^(1/p).
double lp_norm(std::span<const double> values, double h, std::size_t d, double p);

struct NormEstimate {
  double value = 0.0;
  double stdError = 0.0;
  std::size_t points = 0;
  double spacing = 0.0;
};

/// L^p norm (p = cfg.exponent()) of x -> eval_max(f, x) over the cell centres
/// of a grid on Q^{n-1} x {0} with spacing <= delta, every point moved by
/// `shift`. Error by the delta method.
NormEstimate sliced_max_norm(const ScalarField& f, const MaxProbeConfig& cfg, RegionKind variant = RegionKind::PolarCap,
                             const Vec& shift = {});

/// Same over a grid on Q^n (n-dimensional measure).
NormEstimate full_max_norm(const ScalarField& f, const MaxProbeConfig& cfg, RegionKind variant = RegionKind::Annulus);

struct MultiplicityEstimate {
  double value = 0.0;
  double stdError = 0.0;
  std::uint64_t samples = 0;
  double domainVolume = 0.0;
};

/// ∫ (sum_C chi_{C^{delta,*}})^n by uniform sampling of the union of the cap
/// bounding boxes. Integer accumulation keeps the result independent of
/// thread scheduling.
MultiplicityEstimate multiplicity_functional(const SphereFamily& family, std::uint64_t samples, std::uint64_t seed);

/// sum over ordered n-tuples of |∩ C_j^{delta,*}|, each multiset of indices
/// estimated once with mc_volume and weighted by its number of orderings.
MultiplicityEstimate multiplicity_tuple_sum(const SphereFamily& family, std::uint64_t samplesPerTuple,
                                            std::uint64_t seed);

struct FocusingResult {
  std::size_t n = 3;
  double p = 1.0;
  std::vector<double> deltas;
  std::vector<double> ratios;
  /// Slope of log ratio against log(1/delta).
  double slope = 0.0;
  double slopeStdError = 0.0;
  /// n/p - (n - 1).
  double predictedSlope = 0.0;
};

/// ||M^delta f||_p / ||f||_p on the shell {1 <= |x| <= 2} for f = 1_{B(0, delta)}.
/// M^delta f is radial, so the norm is a radial integral of eval_max at
/// x = s e_1 over `radialPoints` midpoints s in [1, 2].
double focusing_ratio(const MaxProbeConfig& cfg, std::size_t radialPoints = 16);

FocusingResult focusing_probe(std::size_t n, double p, std::span<const double> deltas, std::uint64_t samples,
                              std::uint64_t seed, std::size_t radialPoints = 16);

}  // namespace sphmax
