// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <numbers>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sphmax/configurations.hpp"
#include "sphmax/experiments.hpp"
#include "sphmax/geometry.hpp"
#include "sphmax/maximal.hpp"
#include "sphmax/rng.hpp"
#include "sphmax/volume.hpp"

using namespace sphmax;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ExperimentReport run_default(ExperimentKind kind, std::function<void(ExperimentConfig&)> tweak = {}) {
  ExperimentConfig cfg = default_config(kind);
  if (tweak) tweak(cfg);
  return run_experiment(cfg);
}

std::string failures_of(const ExperimentReport& r) {
  std::string s;
  for (const std::string& f : r.failures) s += "; " + f;
  return s;
}

Outcome enemy_exponent() {
  const ExperimentReport r = run_default(ExperimentKind::EnemyScan);
  return {r.passed(), "slope " + r.field("slope") + " vs 2.5 ± 0.15 over 2^-5..2^-11, 10^6 samples" + failures_of(r)};
}

Outcome collinear_generic_exponents() {
  const ExperimentReport c = run_default(ExperimentKind::CollinearScan);
  const ExperimentReport g = run_default(ExperimentKind::GenericScan);
  return {c.passed() && g.passed(), "collinear slope " + c.field("slope") + " vs 2.0, generic slope " + g.field("slope") +
                                        " vs 3.0 (± 0.15)" + failures_of(c) + failures_of(g)};
}

Outcome polar_cap_rescue() {
  const ExperimentReport cap = run_default(ExperimentKind::TupleBound);
  const ExperimentReport enemy =
      run_default(ExperimentKind::TupleBound, [](ExperimentConfig& c) { c.extra["triples"] = "enemy"; });
  const double fullSlope = std::stod(enemy.field("K_full_annulus_slope"));
  const bool contrast = fullSlope < -0.3;
  return {cap.passed() && enemy.passed() && contrast,
          "cap triples worst K step " + cap.field("K_cap_worst_step_ratio") + ", enemy triples worst K step " +
              enemy.field("K_cap_worst_step_ratio") + " (cap hits " + enemy.field("cap_hits") +
              "), full-annulus K slope " + enemy.field("K_full_annulus_slope") + failures_of(cap) +
              failures_of(enemy)};
}

Outcome slab_containment() {
  Rng rng(substream_seed(4, {0}));
  const double delta = 1.0 / 32;
  std::uint64_t points = 0, failures = 0;
  for (int pair = 0; pair < 100; ++pair) {
    Sphere a, b;
    for (;;) {
      a = Sphere(Vec{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0.0}, rng.uniform(1.0, 2.0));
      const double d = rng.uniform(2 * delta, 0.6);
      const double phi = rng.uniform(0.0, 2 * std::numbers::pi);
      b = Sphere(a.centre + Vec{d * std::cos(phi), d * std::sin(phi), 0.0}, rng.uniform(1.0, 2.0));
      if (std::abs(a.radius - b.radius) < d) break;
    }
    const Region ra = Region::annulus(a, delta), rb = Region::annulus(b, delta);
    const Slab slab = slab_of_pair(a, b, delta);
    Rng draw(substream_seed(4, {1, std::uint64_t(pair)}));
    for (std::uint64_t got = 0; got < 10'000;) {
      const Vec y = sample_in_region(ra, draw);
      if (!rb.contains(y)) continue;
      ++got;
      ++points;
      if (!slab.contains(y)) ++failures;
    }
  }
  return {failures == 0, std::to_string(points) + " intersection points from 100 pairs, " + std::to_string(failures) +
                             " outside the slab"};
}

Outcome wedge_identity() {
  Rng rng(substream_seed(5, {0}));
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 5);
    const std::size_t l = 1 + rng.below(n);
    std::vector<Vec> v(l, Vec(n));
    for (Vec& x : v)
      for (std::size_t k = 0; k < n; ++k) x[k] = rng.normal();
    const double g = wedge_norm_gram(v), p = wedge_norm_projection(v);
    worst = std::max(worst, std::abs(g - p) / std::max(g, p));
  }
  return {worst <= 1e-10, fmt("worst relative gap %.3g over 10^4 inputs, dimensions 2-6", worst)};
}

Outcome oracle_equivalence() {
  const double delta = 1.0 / 32;
  Rng rng(substream_seed(6, {0}));
  int agree = 0, total = 0;
  while (total < 100) {
    const std::size_t m = total < 50 ? 2 : 3;
    std::vector<Region> regions;
    for (std::size_t j = 0; j < m; ++j)
      regions.push_back(Region::annulus(
          Sphere(Vec{rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25), 0.0}, rng.uniform(1.0, 2.0)), delta));
    const VolumeEstimate mc = mc_volume(regions, 200'000, substream_seed(6, {1, std::uint64_t(total)}));
    if (mc.hits == 0) continue;
    const VolumeEstimate grid = grid_volume(regions, delta / 4);
    if (std::abs(mc.value - grid.value) <= 3 * std::hypot(mc.stdError, grid.stdError)) ++agree;
    ++total;
  }
  int familiesOk = 0;
  const int families = 6;
  for (int f = 0; f < families; ++f) {
    const SphereFamily fam = random_family(3, 1.0 / 16, 3 + f, substream_seed(6, {2, std::uint64_t(f)}), 1.5, 1.5);
    const MultiplicityEstimate a = multiplicity_functional(fam, 1'000'000, substream_seed(6, {3, std::uint64_t(f)}));
    const MultiplicityEstimate b = multiplicity_tuple_sum(fam, 100'000, substream_seed(6, {4, std::uint64_t(f)}));
    if (std::abs(a.value - b.value) <= 3 * std::hypot(a.stdError, b.stdError)) ++familiesOk;
  }
  return {agree >= 95 && familiesOk == families,
          std::to_string(agree) + "/100 nonempty pair/triple volumes agree mc vs grid; " + std::to_string(familiesOk) +
              "/" + std::to_string(families) + " families (3-8 spheres) agree functional vs tuple sum"};
}

Outcome bucket_partition() {
  const ExperimentReport r = run_default(ExperimentKind::BucketAudit);
  SphereFamily f = random_family(3, 1.0 / 32, 64, 7);
  f.delta = 1.0 / 128;
  const BucketReport sep = bucket_audit(f, 3);
  const bool sepOk = sep.partitionOk && sep.classified == 249984;
  return {r.passed() && sepOk, "partition " + r.field("partition") + " at 2^-5..2^-7, K_base worst step " +
                                   r.field("K_base_worst_step_ratio") + "; separated family: " +
                                   std::to_string(sep.classified) + " tuples classified" + failures_of(r)};
}

Outcome cardinality_bounds() {
  const ExperimentReport r = run_default(ExperimentKind::Cardinality);
  return {r.passed(), "worst K steps: distance " + r.field("K_distance_worst_step_ratio") + ", angular " +
                          r.field("K_angular_worst_step_ratio") + ", degenerate " +
                          r.field("K_degenerate_worst_step_ratio") + failures_of(r)};
}

Outcome multiplicity_bound() {
  const ExperimentReport r = run_default(ExperimentKind::Multiplicity);
  return {r.passed(), "ratio max/min " + r.field("ratio_max_over_min") + " (limit 4) over 2^-4..2^-7" + failures_of(r)};
}

Outcome sharpness() {
  const ExperimentReport r = run_default(ExperimentKind::FocusingSweep);
  return {r.passed(), "slopes p=1.2: " + r.field("p=1.2 slope") + ", p=1.5: " + r.field("p=1.5 slope") +
                          ", p=2: " + r.field("p=2 slope") + " vs 0.5, 0, -0.5 (± 0.15)" + failures_of(r)};
}

Outcome determinism() {
  int identical = 0, total = 0;
  const auto root = std::filesystem::temp_directory_path() / "sphmax-acceptance";
  for (ExperimentKind kind : all_kinds()) {
    ExperimentConfig cfg = default_config(kind);
    cfg.deltaList.resize(std::min<std::size_t>(cfg.deltaList.size(), 3));
    cfg.samples = 20'000;
    cfg.extra["trials"] = "8";
    cfg.extra["anchors"] = "4";
    cfg.extra["familySize"] = kind == ExperimentKind::BucketAudit ? "16" : "capacity";
    cfg.extra["averageSamples"] = "256";
    if (kind == ExperimentKind::MaximalNorm) cfg.deltaList = {0.125};
    std::string csv[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / (std::string(kind_name(kind)) + std::to_string(rep));
      write_report(run_experiment(cfg), cfg, dir);
      std::ifstream in(dir / "raw.csv");
      std::stringstream ss;
      ss << in.rdbuf();
      csv[rep] = ss.str();
    }
    ++total;
    if (!csv[0].empty() && csv[0] == csv[1]) ++identical;
  }
  std::filesystem::remove_all(root);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " experiments produce byte-identical raw.csv on re-run"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"enemy exponent", enemy_exponent},
      {"collinear and generic exponents", collinear_generic_exponents},
      {"polar-cap rescue", polar_cap_rescue},
      {"slab containment", slab_containment},
      {"wedge identity", wedge_identity},
      {"oracle equivalence", oracle_equivalence},
      {"bucket partition", bucket_partition},
      {"cardinality bounds", cardinality_bounds},
      {"multiplicity bound", multiplicity_bound},
      {"sharpness dichotomy", sharpness},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
