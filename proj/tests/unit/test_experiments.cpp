#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sphmax/experiments.hpp"
#include "sphmax/fit.hpp"

using namespace sphmax;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sphmax-unit-" + name);
}

}  // namespace

TEST(FitExponent, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (int k = 3; k <= 8; ++k) pts.emplace_back(std::ldexp(1.0, -k), std::pow(std::ldexp(1.0, -k), 3));
  const FitResult f = fit_exponent(pts);
  EXPECT_NEAR(f.slope, 3.0, 1e-9);
  EXPECT_NEAR(f.stdError, 0.0, 1e-9);
  EXPECT_EQ(f.points.size(), pts.size());
}

TEST(FitExponent, NoisyPowerLaw) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<std::pair<double, double>> pts;
  for (int k = 3; k <= 10; ++k) {
    const double d = std::ldexp(1.0, -k);
    pts.emplace_back(d, 0.7 * std::pow(d, 2.5) * (1 + noise(gen)));
  }
  EXPECT_NEAR(fit_exponent(pts).slope, 2.5, 0.05);
}

TEST(FitExponent, TwoPointsThrow) {
  const std::vector<std::pair<double, double>> pts{{0.1, 1.0}, {0.05, 0.5}};
  EXPECT_THROW(fit_exponent(pts), std::invalid_argument);
}

TEST(FitExponent, NonPositiveValueThrows) {
  const std::vector<std::pair<double, double>> pts{{0.1, 1.0}, {0.05, 0.0}, {0.025, 0.1}};
  EXPECT_THROW(fit_exponent(pts), std::invalid_argument);
}

TEST(PredictedRhs, AExponent) {
  EXPECT_EQ(a_exponent(3, 3), -1);
  EXPECT_EQ(a_exponent(2, 3), 0);
  EXPECT_EQ(a_exponent(2, 5), -2);
}

TEST(PredictedRhs, MultiplicityDenominator) {
  const double v = predicted_rhs(RhsKind::Multiplicity, 3, 3, 1.0 / 64, {}, {}, 256);
  EXPECT_NEAR(v, std::log(64.0) * 64 * 256, 1e-9);
  EXPECT_NEAR(v, 68139, 1.0);
}

TEST(PredictedRhs, TupleSum) {
  const double t[] = {0.5, 0.25};
  const double th[] = {0.5};
  // delta^{-1} * theta_3^0 * t_2 t_3 * #C for n = 3, m = 3.
  EXPECT_NEAR(predicted_rhs(RhsKind::TupleSum, 3, 3, 0.01, t, th, 10), 100 * 0.125 * 10, 1e-9);
  const double t4[] = {0.5, 0.25, 0.5};
  const double th4[] = {0.5, 0.25};
  EXPECT_NEAR(predicted_rhs(RhsKind::TupleSum, 4, 4, 0.01, t4, th4, 1),
              std::pow(0.01, a_exponent(4, 4)) * 0.5 * std::pow(0.0625, 2), 1e-6);
}

TEST(PredictedRhs, OutOfRangeThrows) {
  const double t[] = {2.0};
  EXPECT_THROW(predicted_rhs(RhsKind::TupleSum, 3, 2, 0.01, t, {}, 1), std::invalid_argument);
  EXPECT_THROW(predicted_rhs(RhsKind::Multiplicity, 3, 3, 1.5, {}, {}, 1), std::invalid_argument);
}

TEST(Stability, WorstRatio) {
  const std::vector<std::pair<double, double>> k{{0.0625, 1.0}, {0.125, 2.0}, {0.03125, 1.5}};
  EXPECT_DOUBLE_EQ(worst_stability_ratio(k), 1.5);
  const std::vector<std::pair<double, double>> jump{{0.5, 0.0}, {0.25, 1.0}};
  EXPECT_TRUE(std::isinf(worst_stability_ratio(jump)));
}

TEST(Config, ParseDelta) {
  EXPECT_EQ(parse_delta("2^-5"), 1.0 / 32);
  EXPECT_EQ(parse_delta("1/32"), 1.0 / 32);
  EXPECT_EQ(parse_delta(" 0.03125 "), 1.0 / 32);
  EXPECT_THROW(parse_delta("abc"), std::invalid_argument);
}

TEST(Config, ParseFileOverridesDefaults) {
  std::istringstream in(
      "# comment\n"
      "delta = 2^-4, 2^-5,2^-6\n"
      "seed = 42   # trailing\n"
      "samples = 1e5\n"
      "family = random\n");
  const ExperimentConfig c = parse_config(in, default_config(ExperimentKind::Multiplicity));
  EXPECT_EQ(c.deltaList, (std::vector<double>{1.0 / 16, 1.0 / 32, 1.0 / 64}));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.samples, 100'000u);
  EXPECT_EQ(c.get_string("family", ""), "random");
  EXPECT_EQ(c.get_double("radius", 0.0), 1.5);
}

TEST(Config, MissingEqualsThrows) {
  std::istringstream in("delta 0.1\n");
  EXPECT_THROW(parse_config(in, ExperimentConfig{}), std::invalid_argument);
}

TEST(Config, EchoRoundTrips) {
  ExperimentConfig c = default_config(ExperimentKind::TupleBound);
  c.seed = 99;
  std::istringstream in(echo_config(c));
  const ExperimentConfig back = parse_config(in, ExperimentConfig{});
  EXPECT_EQ(echo_config(back), echo_config(c));
}

TEST(Config, ValidateRanges) {
  ExperimentConfig c = default_config(ExperimentKind::EnemyScan);
  EXPECT_NO_THROW(c.validate());
  c.samples = 100;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = default_config(ExperimentKind::EnemyScan);
  c.deltaList = {0.6};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.deltaList.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, KindNamesRoundTrip) {
  for (ExperimentKind k : all_kinds()) EXPECT_EQ(parse_kind(kind_name(k)), k);
  EXPECT_THROW(parse_kind("nope"), std::invalid_argument);
}

TEST(Run, EnemyScanShortSweep) {
  ExperimentConfig c = default_config(ExperimentKind::EnemyScan);
  c.deltaList = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  c.samples = 200'000;
  const ExperimentReport r = run_experiment(c);
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(std::stod(r.field("slope")), 2.5, 0.15);
  EXPECT_EQ(r.raw.rows.size(), 4u);
  EXPECT_FALSE(r.anchor.empty());
}

TEST(Run, ReportFilesAndDeterminism) {
  ExperimentConfig c = default_config(ExperimentKind::CollinearScan);
  c.deltaList = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  c.samples = 50'000;
  const auto dirA = scratch("a"), dirB = scratch("b");
  write_report(run_experiment(c), c, dirA);
  write_report(run_experiment(c), c, dirB);
  EXPECT_EQ(slurp(dirA / "raw.csv"), slurp(dirB / "raw.csv"));
  EXPECT_EQ(slurp(dirA / "config.echo"), echo_config(c));
  const std::string summary = slurp(dirA / "summary.txt");
  EXPECT_NE(summary.find("anchor: "), std::string::npos);
  EXPECT_NE(summary.find("seed: 1"), std::string::npos);
  EXPECT_NE(summary.find("result: "), std::string::npos);
  std::filesystem::remove_all(dirA);
  std::filesystem::remove_all(dirB);
}

TEST(Run, BucketAuditReportsPartition) {
  ExperimentConfig c = default_config(ExperimentKind::BucketAudit);
  c.deltaList = {1.0 / 32};
  c.extra["familySize"] = "16";
  c.samples = 10'000;
  const ExperimentReport r = run_experiment(c);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.field("partition"), "OK");
}

TEST(Run, InvalidConfigThrows) {
  ExperimentConfig c = default_config(ExperimentKind::Multiplicity);
  c.extra["family"] = "unknown";
  c.deltaList = {1.0 / 16};
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
}

TEST(Table, CsvLayout) {
  Table t{{"a", "b"}, {{"1", "2"}, {"3", "4"}}};
  std::ostringstream out;
  t.write_csv(out);
  EXPECT_EQ(out.str(), "a,b\n1,2\n3,4\n");
}
