#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "sphmax/maximal.hpp"

using namespace sphmax;

namespace {

const Sphere kUnit(Vec{0, 0, 0}, 1.0);

// (1/|R|) ∫_R 1_B by cell-centre integration over the ball's bounding box.
double grid_average_of_ball(const Region& region, const Vec& c, double rho, double h) {
  const int cells = static_cast<int>(std::ceil(2 * rho / h));
  double sum = 0.0;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j)
      for (int k = 0; k < cells; ++k) {
        const Vec y{c[0] - rho + (i + 0.5) * h, c[1] - rho + (j + 0.5) * h, c[2] - rho + (k + 0.5) * h};
        if (distance(y, c) < rho && region.contains(y)) sum += h * h * h;
      }
  return sum / region_volume(region);
}

}  // namespace

TEST(RegionAverage, ConstantIsExact) {
  const AverageEstimate a = region_average(ScalarField{Constant{1.0}}, Region::polar_cap(kUnit, 0.05), 4096, 1);
  EXPECT_EQ(a.value, 1.0);
  EXPECT_EQ(a.stdError, 0.0);
}

TEST(RegionAverage, HalfSpaceByRegionSymmetry) {
  const ScalarField f{IndicatorHalfSpace{Vec{0, 0, 1}, 0.0}};
  const AverageEstimate a = region_average(f, Region::annulus(kUnit, 0.05), 200'000, 2);
  EXPECT_NEAR(a.value, 0.5, 3 * a.stdError + 1e-12);
}

TEST(RegionAverage, SmallBallOnSphereMatchesGrid) {
  const double delta = 0.05;
  const Vec p{1, 0, 0};
  const Region r = Region::annulus(kUnit, delta);
  const AverageEstimate a = region_average(ScalarField{IndicatorBall{p, delta}}, r, 400'000, 3);
  const double grid = grid_average_of_ball(r, p, delta, delta / 40);
  EXPECT_NEAR(a.value, grid, 3 * a.stdError + 0.01 * grid);
}

TEST(RegionAverage, SmallBallScalesAsDeltaSquared) {
  const Vec p{0, 0, 1};
  const double a1 = region_average(ScalarField{IndicatorBall{p, 0.04}}, Region::annulus(kUnit, 0.04), 200'000, 4).value;
  const double a2 = region_average(ScalarField{IndicatorBall{p, 0.02}}, Region::annulus(kUnit, 0.02), 200'000, 5).value;
  EXPECT_NEAR(a1 / a2, 4.0, 0.25);
}

TEST(RegionAverage, DisjointSupportIsZero) {
  const AverageEstimate a =
      region_average(ScalarField{IndicatorBall{Vec{5, 5, 5}, 0.3}}, Region::annulus(kUnit, 0.05), 4096, 1);
  EXPECT_EQ(a.value, 0.0);
}

TEST(SampleInRegion, CapSamplesLieInsideTheAnnulus) {
  Rng rng(9);
  const Region cap = Region::polar_cap(Sphere(Vec{0.1, 0.2, 0}, 1.6), 0.02);
  const Region ann = Region::annulus(cap.sphere, cap.delta);
  for (int i = 0; i < 5000; ++i) {
    const Vec y = sample_in_region(cap, rng);
    EXPECT_TRUE(cap.contains(y));
    EXPECT_TRUE(ann.contains(y));
  }
}

TEST(SampleInRegion, AnnulusRadiusDistribution) {
  Rng rng(10);
  const Region ann = Region::annulus(kUnit, 0.2);
  int inner = 0;
  const int total = 100'000;
  for (int i = 0; i < total; ++i)
    if (norm(sample_in_region(ann, rng)) < 1.0) ++inner;
  const double expected = (1.0 - std::pow(0.8, 3)) / (std::pow(1.2, 3) - std::pow(0.8, 3));
  EXPECT_NEAR(static_cast<double>(inner) / total, expected, 0.005);
}

TEST(EvalMax, ConstantIsOne) {
  MaxProbeConfig cfg;
  EXPECT_EQ(eval_max(ScalarField{Constant{1.0}}, Vec{0.1, 0, 0}, cfg, RegionKind::PolarCap).value, 1.0);
}

TEST(EvalMax, ZeroIsZero) {
  MaxProbeConfig cfg;
  EXPECT_EQ(eval_max(ScalarField{Constant{0.0}}, Vec{0.1, 0, 0}, cfg, RegionKind::Annulus).value, 0.0);
  EXPECT_EQ(eval_max(ScalarField{}, Vec{0.1, 0, 0}, cfg, RegionKind::Annulus).value, 0.0);
}

TEST(EvalMax, FocusingBallAttainedAtItsDistance) {
  MaxProbeConfig cfg;
  cfg.delta = 1.0 / 32;
  cfg.samples = 20'000;
  const ScalarField f{IndicatorBall{Vec{0, 0, 0}, cfg.delta}};
  const MaxValue m = eval_max(f, Vec{1.5, 0, 0}, cfg, RegionKind::Annulus);
  EXPECT_NEAR(m.radius, 1.5, cfg.delta);
  // Dense scan with ten times finer radius steps does not exceed it by more
  // than the expected constant factor.
  MaxProbeConfig dense = cfg;
  dense.radiusStep = cfg.delta / 20;
  dense.rMin = 1.4;
  dense.rMax = 1.6;
  const MaxValue d = eval_max(f, Vec{1.5, 0, 0}, dense, RegionKind::Annulus);
  EXPECT_LE(d.value, 2.0 * m.value);
  EXPECT_GE(d.value, m.value - 3 * m.stdError);
}

TEST(RadiusGrid, IncludesEndpoints) {
  MaxProbeConfig cfg;
  cfg.delta = 0.3;
  const std::vector<double> g = radius_grid(cfg);
  EXPECT_EQ(g.front(), 1.0);
  EXPECT_EQ(g.back(), 2.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LE(g[i] - g[i - 1], 0.15 + 1e-12);
}

TEST(MaxProbeConfig, Defaults) {
  MaxProbeConfig cfg;
  cfg.n = 4;
  EXPECT_DOUBLE_EQ(cfg.exponent(), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(cfg.step(), cfg.delta / 2);
  cfg.delta = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(LpNorm, UnitDomain) {
  const std::vector<double> v(100, 1.0);
  EXPECT_NEAR(lp_norm(v, 0.1, 2, 1.7), 1.0, 1e-14);
}

TEST(LpNorm, Homogeneous) {
  std::vector<double> v{0.5, 1.5, 2.0, 0.25};
  const double base = lp_norm(v, 0.2, 3, 2.3);
  for (double& x : v) x *= 3.7;
  EXPECT_NEAR(lp_norm(v, 0.2, 3, 2.3), 3.7 * base, 1e-12 * base);
}

TEST(LpNorm, POneIsIntegral) {
  const std::vector<double> v{0.5, 1.5, 2.0, 0.25};
  EXPECT_NEAR(lp_norm(v, 0.5, 1, 1.0), 0.5 * 4.25, 1e-15);
}

TEST(SlicedMaxNorm, ConstantOne) {
  MaxProbeConfig cfg;
  cfg.delta = 1.0 / 8;
  const NormEstimate e = sliced_max_norm(ScalarField{Constant{1.0}}, cfg);
  EXPECT_NEAR(e.value, std::pow(cube_side(3) * cube_side(3), 1.0 / 1.5), 1e-12);
}

TEST(SlicedMaxNorm, Zero) {
  MaxProbeConfig cfg;
  cfg.delta = 1.0 / 8;
  EXPECT_EQ(sliced_max_norm(ScalarField{Constant{0.0}}, cfg).value, 0.0);
}

TEST(SlicedMaxNorm, AnnulusFieldIsPositive) {
  MaxProbeConfig cfg;
  cfg.delta = 1.0 / 8;
  cfg.samples = 1024;
  const ScalarField f{IndicatorAnnulus{Sphere(Vec{0, 0, 0}, 1.5), cfg.delta}};
  EXPECT_GT(sliced_max_norm(f, cfg, RegionKind::Annulus).value, 0.0);
  EXPECT_GT(full_max_norm(f, cfg, RegionKind::Annulus).value, 0.0);
}

TEST(SlicedMaxNorm, TranslationInvariance) {
  MaxProbeConfig cfg;
  cfg.delta = 1.0 / 8;
  cfg.samples = 2048;
  const Vec c{0.05, 0.02, 1.5};
  const Vec shift{0.07, -0.04, 0};
  const NormEstimate a = sliced_max_norm(ScalarField{IndicatorBall{c, 0.25}}, cfg);
  cfg.seed = 2;
  const NormEstimate b = sliced_max_norm(ScalarField{IndicatorBall{c + shift, 0.25}}, cfg, RegionKind::PolarCap, shift);
  EXPECT_NEAR(a.value, b.value, 3 * std::hypot(a.stdError, b.stdError));
}

TEST(EvalMax, Sublinear) {
  MaxProbeConfig cfg;
  cfg.delta = 1.0 / 16;
  cfg.samples = 4096;
  const ScalarField f{IndicatorBall{Vec{0.2, 0, 1.4}, 0.3}};
  const ScalarField g{IndicatorBall{Vec{-0.1, 0.1, 1.2}, 0.2}};
  for (std::uint64_t i = 0; i < 4; ++i) {
    const Vec x{0.05 * static_cast<double>(i), 0, 0};
    const MaxValue fg = eval_max(f + g, x, cfg, RegionKind::PolarCap, i);
    const MaxValue fv = eval_max(f, x, cfg, RegionKind::PolarCap, 10 + i);
    const MaxValue gv = eval_max(g, x, cfg, RegionKind::PolarCap, 20 + i);
    EXPECT_LE(fg.value, fv.value + gv.value +
                            3 * std::sqrt(fg.stdError * fg.stdError + fv.stdError * fv.stdError + gv.stdError * gv.stdError));
  }
}

TEST(Multiplicity, SingleSphereIsCapVolume) {
  const SphereFamily f{3, 1.0 / 32, {Sphere(Vec{0, 0, 0}, 1.5)}};
  const MultiplicityEstimate m = multiplicity_functional(f, 1'000'000, 1);
  const double exact = polar_cap_volume(3, 1.5, 1.0 / 32);
  EXPECT_NEAR(m.value, exact, 3 * m.stdError);
}

TEST(Multiplicity, DisjointCapsAdd) {
  const SphereFamily f{3, 1.0 / 32, {Sphere(Vec{0, 0, 0}, 1.0), Sphere(Vec{0.5, 0, 0}, 1.5), Sphere(Vec{0, 0.5, 0}, 1.2)}};
  const MultiplicityEstimate m = multiplicity_functional(f, 1'000'000, 2);
  double exact = 0.0;
  for (const Sphere& s : f.spheres) exact += polar_cap_volume(3, s.radius, f.delta);
  EXPECT_NEAR(m.value, exact, 3 * m.stdError);
}

TEST(Multiplicity, AgreesWithTupleSum) {
  const SphereFamily f = random_family(3, 1.0 / 16, 6, 3, 1.5, 1.5);
  const MultiplicityEstimate a = multiplicity_functional(f, 2'000'000, 4);
  const MultiplicityEstimate b = multiplicity_tuple_sum(f, 200'000, 5);
  EXPECT_NEAR(a.value, b.value, 3 * std::hypot(a.stdError, b.stdError));
}

TEST(Multiplicity, Deterministic) {
  const SphereFamily f = random_family(3, 1.0 / 16, 20, 3);
  const MultiplicityEstimate a = multiplicity_functional(f, 100'000, 4);
  const MultiplicityEstimate b = multiplicity_functional(f, 100'000, 4);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.stdError, b.stdError);
}

TEST(Focusing, SlopesFollowTheExponent) {
  const std::vector<double> deltas{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  for (double p : {1.2, 1.5, 2.0}) {
    const FocusingResult r = focusing_probe(3, p, deltas, 2048, 1, 8);
    EXPECT_NEAR(r.predictedSlope, 3.0 / p - 2.0, 1e-14);
    EXPECT_NEAR(r.slope, r.predictedSlope, 0.15) << "p = " << p;
  }
}

TEST(VoxelGrid, ValueLookupAndOutside) {
  const VoxelGrid g(Vec{0, 0}, 0.5, {2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(g.value_at(Vec{0.1, 0.1}), 1);
  EXPECT_EQ(g.value_at(Vec{0.1, 0.6}), 2);
  EXPECT_EQ(g.value_at(Vec{0.6, 0.1}), 3);
  EXPECT_EQ(g.value_at(Vec{0.9, 0.9}), 4);
  EXPECT_EQ(g.value_at(Vec{1.0, 0.1}), 0);
  EXPECT_EQ(g.value_at(Vec{-0.01, 0.1}), 0);
}

TEST(VoxelGrid, RoundTrip) {
  const VoxelGrid g(Vec{-0.25, 0.5, 1}, 0.125, {2, 1, 3}, {0.1, 0.2, 0.3, 0.4, 0.5, 1.0 / 3});
  std::stringstream ss;
  write_voxel_grid(ss, g);
  EXPECT_EQ(read_voxel_grid(ss), g);
}

TEST(VoxelGrid, AverageOfUniformGrid) {
  const VoxelGrid g(Vec{-3, -3, -3}, 6.0, {1, 1, 1}, {0.75});
  const AverageEstimate a = region_average(ScalarField{g}, Region::annulus(kUnit, 0.1), 4096, 1);
  EXPECT_NEAR(a.value, 0.75, 1e-12);
}
