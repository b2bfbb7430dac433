#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sphmax/geometry.hpp"

namespace sphmax {

/// Finite family of spheres with delta-separated centres on the slice
/// {x_n = 0}, inside Q^{n-1} where Q = [-1/(2 sqrt n), 1/(2 sqrt n)].
struct SphereFamily {
  std::size_t n = 3;
  double delta = 0.0;
  std::vector<Sphere> spheres;

  std::size_t size() const { return spheres.size(); }
  bool empty() const { return spheres.empty(); }

  friend bool operator==(const SphereFamily&, const SphereFamily&) = default;
};

/// Side length of Q, chosen so that Q^n has diameter 1.
double cube_side(std::size_t n);

/// Number of jittered-grid sites available to random_family.
std::size_t family_capacity(std::size_t n, double delta);

/// Jittered grid: sites on a lattice of spacing 1.5 delta inside Q^{n-1},
/// each moved by at most delta/4, so any two centres are at least delta
/// apart. A seeded subset of targetCount sites is kept; radii are uniform in
/// [radiusMin, radiusMax] (equal bounds give translated caps, the extremal
/// case for the multiplicity functional). Throws std::invalid_argument when
/// targetCount exceeds capacity.
SphereFamily random_family(std::size_t n, double delta, std::size_t targetCount, std::uint64_t seed,
                           double radiusMin = 1.0, double radiusMax = 2.0);

/// Every jittered-grid site within horizontal distance `spread` of a random
/// focus point, with radii chosen so that all spheres pass through the focus
/// (which lies in every polar cap).
SphereFamily focused_family(std::size_t n, double delta, std::uint64_t seed, double focusHeight = 1.85,
                            double spread = 0.14);

/// Smallest pairwise centre distance (infinity for fewer than two spheres).
double min_separation(const SphereFamily& family);

void write_family(std::ostream& out, const SphereFamily& family);
SphereFamily read_family(std::istream& in);

// ---------------------------------------------------------------------------
// Extremal triples

enum class TripleKind { Enemy, Collinear, Generic };

struct TripleSpec {
  TripleKind kind = TripleKind::Generic;
  std::array<Sphere, 3> spheres;
  /// Volume scaling exponent of the full-annulus triple intersection.
  double expectedExponent = 3.0;
  /// Enemy: |t_2 x t_3| of the unit tangent directions at the tangency point.
  /// Collinear: max |r_j - dist(centre_j, circle)|.
  /// Generic: |n_1 ∧ n_2 ∧ n_3| of unit normals at the common point.
  double certificate = 0.0;
  /// Common point of the three spheres (tangency point, a circle point, or
  /// the upper intersection point).
  Vec commonPoint;
  /// Rejected draws before acceptance (generic_triple only).
  std::size_t retries = 0;
};

/// C_1 = sphere(0, radius1) and C_j centred at (centre_j, 0) through
/// p = radius1 (cos phi, sin phi, 0), so the circles C_1 ∩ C_2 and C_1 ∩ C_3
/// are tangent at p. Throws when a centre is parallel to p.
TripleSpec enemy_triple(double delta, double phi, const Vec& centre2, const Vec& centre3, double radius1 = 1.0);

/// Centres 0, spacing e_1, 2 spacing e_1 sharing the circle
/// {y_1 = c, y_2^2 + y_3^2 = rho^2}. Throws when a radius leaves [1, 2].
TripleSpec collinear_triple(double spacing, double circlePlaneOffset, double circleRadius);

/// Certifies a given triple as transversal: the spheres meet and the unit
/// normals at the upper common point span a volume of at least
/// kGenericTransversality. Throws otherwise.
TripleSpec make_generic_triple(const std::array<Sphere, 3>& spheres);

inline constexpr double kGenericTransversality = 0.1;

/// Random transversal triple: pairwise distances in [0.5, 1], angle between
/// centre differences in [pi/3, 2 pi/3], radii in [1, 2]. Draws are retried
/// until make_generic_triple accepts and an MC probe at delta = 1/32 hits.
TripleSpec generic_triple(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dyadic classification

/// The power of two t with value in (t/2, t].
double dyadic_ceiling(double value);

/// Dyadic distance class t of dist(a, b) in (t/2, t]; nullopt (degenerate,
/// coincident scale) when dist < 2 delta.
std::optional<double> distance_bucket(const Sphere& a, const Sphere& b, double delta);

/// |proj_{span(e(C_1, C_i))^perp} e(C_1, C_j)| for priors C_1, ..., C_{j-1}.
/// Throws when the prior directions are dependent.
double angular_projection(std::span<const Sphere> priors, const Sphere& candidate);

/// Dyadic angular class theta with v in (theta/2, theta], or nullopt
/// (degenerate) when v <= 2 delta / t. With a single prior the span is {0}
/// and v = 1.
std::optional<double> angular_bucket(std::span<const Sphere> priors, const Sphere& candidate, double delta, double t);

/// A cell (J, t, theta) of the tuple decomposition. J ⊆ {3..m}; tList holds
/// t_2..t_m; thetaList holds theta_j for j in J, in increasing j.
struct BucketSignature {
  int m = 2;
  std::vector<int> J;
  std::vector<double> tList;
  std::vector<double> thetaList;

  friend auto operator<=>(const BucketSignature&, const BucketSignature&) = default;
  friend bool operator==(const BucketSignature&, const BucketSignature&) = default;
};

/// Classifies an ordered tuple of family indices: nullopt when some pair is
/// closer than 2 delta (coincident class), otherwise its unique signature.
std::optional<BucketSignature> classify_tuple(const SphereFamily& family, std::span<const std::size_t> tuple);

/// Direct membership test of a tuple in the cell of a signature, from the set
/// definitions (distance shells, angular shells and degenerate wedges relative
/// to the enumeration of {1, 2} ∪ J).
bool tuple_in_bucket(const SphereFamily& family, std::span<const std::size_t> tuple, const BucketSignature& sig);

/// Every signature that can occur for tuples of length m at this delta.
std::vector<BucketSignature> enumerate_signatures(int m, double delta);

struct BucketReport {
  int m = 0;
  std::uint64_t totalTuples = 0;
  std::uint64_t classified = 0;
  std::uint64_t coincident = 0;
  std::map<BucketSignature, std::uint64_t> buckets;
  /// Distinct-index support of each coincident tuple, with multiplicity.
  std::map<std::vector<std::size_t>, std::uint64_t> coincidentSupports;
  /// Tuples whose signature was rechecked against every enumerated cell.
  std::uint64_t verifiedTuples = 0;
  /// Every tuple lies in exactly one cell (or is coincident and in none).
  bool partitionOk = true;
};

/// Classifies all ordered m-tuples of the family. With `verify`, each tuple is
/// also tested against every enumerated signature via tuple_in_bucket.
BucketReport bucket_audit(const SphereFamily& family, int m, bool verify = true);

struct CardinalityReport {
  std::size_t j = 2;
  double t = 0.0;
  double theta = 0.0;
  /// #C^{priors}_{t,theta} and its ratio to theta^{n-j+1} t^{n-1} / delta^{n-1}.
  std::uint64_t count = 0;
  double ratio = 0.0;
  /// #C^{C_1}_t and its ratio to (t/delta)^{n-1}.
  std::uint64_t distanceCount = 0;
  double distanceRatio = 0.0;
  /// #C^{priors}_{t,<=delta/t} and its ratio to (t/delta)^{i-1}, i = #priors.
  std::uint64_t degenerateCount = 0;
  double degenerateRatio = 0.0;
};

/// Exhaustive scan of the family against fixed priors (indices; priors[0] is
/// C_1) for one (t, theta) cell.
CardinalityReport cardinality_audit(const SphereFamily& family, std::span<const std::size_t> priors, double t,
                                    double theta);

/// One scan classifying every other member against the priors: counts per
/// (t, theta) cell and per (t, degenerate) cell, theta = 0 marking degenerate.
std::map<std::pair<double, double>, std::uint64_t> cardinality_scan(const SphereFamily& family,
                                                                   std::span<const std::size_t> priors);

}  // namespace sphmax
