#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sphmax/rng.hpp"
#include "sphmax/volume.hpp"

using namespace sphmax;

namespace {

bool agree(const VolumeEstimate& a, const VolumeEstimate& b, double k = 3.0) {
  return std::abs(a.value - b.value) <= k * std::hypot(a.stdError, b.stdError);
}

}  // namespace

TEST(AnalyticVolume, Shell) {
  const double expected = 4.0 * std::numbers::pi / 3.0 * (std::pow(1.01, 3) - std::pow(0.99, 3));
  EXPECT_NEAR(annulus_volume(3, 1.0, 0.01), expected, 1e-15);
  EXPECT_NEAR(expected, 0.25137, 1e-4);
}

TEST(AnalyticVolume, CapMatchesGrid) {
  const Region cap = Region::polar_cap(Sphere(Vec{0, 0, 0}, 1.0), 0.01);
  const double analytic = polar_cap_volume(3, 1.0, 0.01);
  const std::vector<Region> one{cap};
  const VolumeEstimate grid = grid_volume(one, 0.0025 / 4);
  EXPECT_NEAR(grid.value, analytic, 0.02 * analytic);
  EXPECT_NEAR(analytic, 5.616e-4, 1e-6);
}

TEST(AnalyticVolume, UnitBall) {
  EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
}

TEST(McVolume, SingleAnnulus) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0, 0}, 1.0), 0.01)};
  const VolumeEstimate e = mc_volume(r, 1'000'000, 5);
  EXPECT_LE(std::abs(e.value - annulus_volume(3, 1.0, 0.01)), 3.0 * e.stdError);
}

TEST(McVolume, SingleCap) {
  const std::vector<Region> r{Region::polar_cap(Sphere(Vec{0, 0, 0}, 1.0), 0.01)};
  const VolumeEstimate e = mc_volume(r, 1'000'000, 6);
  EXPECT_LE(std::abs(e.value - polar_cap_volume(3, 1.0, 0.01)), 3.0 * e.stdError);
}

TEST(McVolume, DisjointAnnuliGiveZero) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0, 0}, 2.0), 0.01),
                              Region::annulus(Sphere(Vec{5, 0, 0}, 2.0), 0.01)};
  const VolumeEstimate e = mc_volume(r, 100'000, 1);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.hits, 0u);
}

TEST(McVolume, ZeroSamplesThrow) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0, 0}, 1.0), 0.01)};
  EXPECT_THROW(mc_volume(r, 0, 1), std::invalid_argument);
}

TEST(McVolume, DeterministicForSeed) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0, 0}, 1.2), 0.05),
                              Region::annulus(Sphere(Vec{0.6, 0, 0}, 1.4), 0.05)};
  EXPECT_EQ(mc_volume(r, 200'000, 9), mc_volume(r, 200'000, 9));
  EXPECT_NE(mc_volume(r, 200'000, 9).value, mc_volume(r, 200'000, 10).value);
}

TEST(McVolume, SlabClippingAgreesWithPlainBox) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0, 0}, 1.2), 0.03),
                              Region::annulus(Sphere(Vec{0.5, 0.1, 0}, 1.5), 0.03)};
  const VolumeEstimate clipped = mc_volume(r, 1'000'000, 2);
  const VolumeEstimate plain = mc_volume(r, bounding_box(r), 1'000'000, 3, McOptions{false});
  EXPECT_TRUE(agree(clipped, plain));
  EXPECT_LT(clipped.domainVolume, plain.domainVolume);
}

TEST(GridVolume, SingleAnnulus) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0, 0}, 1.0), 0.01)};
  const VolumeEstimate g = grid_volume(r, 0.0025);
  EXPECT_NEAR(g.value, annulus_volume(3, 1.0, 0.01), 0.05 * annulus_volume(3, 1.0, 0.01));
}

TEST(GridVolume, EmptyIntersection) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0, 0}, 1.0), 0.05),
                              Region::annulus(Sphere(Vec{4, 0, 0}, 1.0), 0.05)};
  EXPECT_EQ(grid_volume(r, 0.01).value, 0.0);
}

TEST(GridVolume, ColumnSweepMatchesCellwise) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0}, 1.0), 0.1),
                              Region::annulus(Sphere(Vec{0.7, 0.2}, 1.3), 0.1)};
  EXPECT_NEAR(grid_volume(r, 0.02).value, grid_volume_cellwise(r, 0.02).value, 1e-12);
}

TEST(GridVolume, AgreesWithMonteCarloOnRandomPairs) {
  Rng rng(21);
  int agreeing = 0;
  const int trials = 20;
  for (int i = 0; i < trials; ++i) {
    const double delta = 1.0 / 32.0;
    const Sphere a(Vec{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 0}, rng.uniform(1, 2));
    const Sphere b(Vec{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 0}, rng.uniform(1, 2));
    const std::vector<Region> r{Region::annulus(a, delta), Region::annulus(b, delta)};
    const VolumeEstimate mc = mc_volume(r, 200'000, substream_seed(21, {std::uint64_t(i)}));
    const VolumeEstimate g = grid_volume(r, delta / 4);
    if (agree(mc, g)) ++agreeing;
  }
  EXPECT_GE(agreeing, 18);
}

TEST(Parallelepiped, OrthogonalSlabs) {
  const Slab s[] = {{Vec{1, 0}, 0.0, 0.1}, {Vec{0, 1}, 0.0, 0.2}};
  EXPECT_NEAR(parallelepiped_volume(s, Box::cube(2, -5, 5)), 4 * 0.1 * 0.2, 1e-14);
}

TEST(Parallelepiped, ObliqueSlabs) {
  const double a = std::numbers::pi / 6;
  const double w = 0.05;
  const Slab s[] = {{Vec{1, 0}, 0.0, w}, {Vec{std::cos(a), std::sin(a)}, 0.0, w}};
  EXPECT_NEAR(parallelepiped_volume(s, Box::cube(2, -5, 5)), 8 * w * w, 1e-14);
}

TEST(Parallelepiped, SingleSlabInUnitBox) {
  const double w = 0.1;
  const Slab s[] = {{Vec{1, 0}, 0.5, w}};
  EXPECT_NEAR(parallelepiped_volume(s, Box::cube(2, 0, 1)), 2 * w, 1e-14);
}

TEST(PredictedBound, PairArithmetic) {
  const double t[] = {0.5};
  EXPECT_NEAR(predicted_tuple_bound(2, 0.01, t, {}).value, 2e-4, 1e-18);
}

TEST(PredictedBound, TripleArithmetic) {
  const double t[] = {0.5, 0.5};
  const double th[] = {0.25};
  EXPECT_NEAR(predicted_tuple_bound(3, 0.01, t, th).value, 1.6e-5, 1e-18);
}

TEST(PredictedBound, ThetaBelowFloorThrows) {
  const double t[] = {0.5, 0.5};
  const double th[] = {0.01};
  EXPECT_THROW(predicted_tuple_bound(3, 0.01, t, th), std::invalid_argument);
}

TEST(BoundingBox, IntersectionOfRegionBoxes) {
  const std::vector<Region> r{Region::annulus(Sphere(Vec{0, 0}, 1.0), 0.1),
                              Region::annulus(Sphere(Vec{3, 0}, 1.0), 0.1)};
  EXPECT_TRUE(bounding_box(r).empty());
}
