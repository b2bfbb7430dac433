#include "sphmax/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "sphmax/configurations.hpp"
#include "sphmax/fit.hpp"
#include "sphmax/maximal.hpp"
#include "sphmax/rng.hpp"
#include "sphmax/volume.hpp"

namespace sphmax {

// ---------------------------------------------------------------------------
// Closed forms

int a_exponent(int m, int n) { return m - (m - 1) * (n - 1); }

double predicted_rhs(RhsKind kind, int n, int m, double delta, std::span<const double> tList,
                     std::span<const double> thetaList, std::size_t familySize) {
  if (n < 2) throw std::invalid_argument("predicted_rhs: n must be at least 2");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("predicted_rhs: delta must lie in (0, 1)");
  const double nd = n;
  const double count = static_cast<double>(familySize);
  if (kind == RhsKind::Multiplicity) return std::log(1.0 / delta) * std::pow(delta, nd - (nd - 1.0) * (nd - 1.0)) * count;

  if (m < 2 || m > n) throw std::invalid_argument("predicted_rhs: m must lie in [2, n]");
  if (tList.size() != static_cast<std::size_t>(m - 1) || thetaList.size() != static_cast<std::size_t>(m - 2))
    throw std::invalid_argument("predicted_rhs: parameter list sizes do not match m");
  double value = std::pow(delta, a_exponent(m, n)) * count;
  for (std::size_t i = 0; i < tList.size(); ++i) {
    const double t = tList[i];
    if (t < delta * (1.0 - 1e-12) || t > 1.0 + 1e-12) throw std::invalid_argument("predicted_rhs: t out of range");
    value *= std::pow(t, nd - 2.0);
  }
  for (std::size_t i = 0; i < thetaList.size(); ++i) {
    const double theta = thetaList[i];
    const double t = tList[i + 1];
    if (theta < delta / t * (1.0 - 1e-12) || theta > 1.0 + 1e-12)
      throw std::invalid_argument("predicted_rhs: theta out of range");
    value *= std::pow(theta, nd - static_cast<double>(i + 3));
  }
  return value;
}

double worst_stability_ratio(std::span<const std::pair<double, double>> deltaK) {
  std::vector<std::pair<double, double>> v(deltaK.begin(), deltaK.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double worst = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double prev = v[i - 1].second, cur = v[i].second;
    if (prev == 0.0) {
      if (cur > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, cur / prev);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Reports

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

std::string ExperimentReport::field(std::string_view key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  return {};
}

std::string summary_text(const ExperimentReport& report, const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "experiment: " << kind_name(report.kind) << '\n';
  out << "anchor: " << report.anchor << '\n';
  for (const auto& [k, v] : report.summary) out << k << ": " << v << '\n';
  for (const std::string& w : report.warnings) out << "warning: " << w << '\n';
  for (const std::string& f : report.failures) out << "failure: " << f << '\n';
  out << "result: " << (report.passed() ? "PASS" : "FAIL") << '\n';
  out << "\n# resolved config\n" << echo_config(cfg);
  return out.str();
}

void write_report(const ExperimentReport& report, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("raw.csv");
    report.raw.write_csv(f);
  }
  {
    auto f = open("summary.txt");
    f << summary_text(report, cfg);
  }
  {
    auto f = open("config.echo");
    f << echo_config(cfg);
  }
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_list(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_exact(v[i]);
  return s;
}

std::string fmt_int_list(std::span<const int> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::vector<double> sorted_deltas(const ExperimentConfig& cfg) {
  std::vector<double> d = cfg.deltaList;
  std::sort(d.begin(), d.end(), std::greater<>());
  return d;
}

void add(ExperimentReport& r, std::string key, std::string value) { r.summary.emplace_back(std::move(key), std::move(value)); }

void check_stability(ExperimentReport& r, const std::string& name, const std::vector<std::pair<double, double>>& deltaK) {
  const double worst = worst_stability_ratio(deltaK);
  add(r, name + "_worst_step_ratio", fmt(worst));
  if (!(worst <= 2.0)) r.failures.push_back(name + ": K(delta/2) / K(delta) = " + fmt(worst) + " exceeds 2");
}

std::string k_list(const std::vector<std::pair<double, double>>& deltaK) {
  std::string s;
  for (const auto& [d, k] : deltaK) s += (s.empty() ? "" : " ") + fmt(d) + "=>" + fmt(k);
  return s;
}

Vec vec2(const std::vector<double>& v, const char* what) {
  if (v.size() != 2) throw std::invalid_argument(std::string("config: ") + what + " needs two coordinates");
  return Vec{v[0], v[1]};
}

void require_dim3(const ExperimentConfig& cfg) {
  if (cfg.n != 3) throw std::invalid_argument("config: this experiment is defined for n = 3");
}

std::vector<Region> regions_of(std::span<const Sphere> spheres, double delta, RegionKind kind) {
  std::vector<Region> out;
  for (const Sphere& s : spheres) out.emplace_back(s, delta, kind);
  return out;
}

// ---------------------------------------------------------------------------
// Triple scans

ExperimentReport run_scan(const ExperimentConfig& cfg) {
  require_dim3(cfg);
  ExperimentReport r;
  r.kind = cfg.experiment;
  const std::vector<double> deltas = sorted_deltas(cfg);
  TripleSpec triple;
  switch (cfg.experiment) {
    case ExperimentKind::EnemyScan:
      r.anchor = "enemy scenario: tangent pairwise circles give a triple intersection of volume ~ delta^(5/2)";
      triple = enemy_triple(deltas.front(), cfg.get_double("phi", 0.0), vec2(cfg.get_list("centre2", {}), "centre2"),
                            vec2(cfg.get_list("centre3", {}), "centre3"), cfg.get_double("radius1", 1.0));
      if (triple.certificate > 1e-10) r.failures.push_back("tangency certificate " + fmt(triple.certificate));
      break;
    case ExperimentKind::CollinearScan:
      r.anchor = "collinear centres sharing a circle give the weaker volume bound ~ delta^2";
      triple = collinear_triple(cfg.get_double("spacing", 0.5), cfg.get_double("offset", 1.8), cfg.get_double("rho", 0.8));
      if (triple.certificate > 1e-12) r.failures.push_back("common-circle certificate " + fmt(triple.certificate));
      break;
    default:
      r.anchor = "transversal triples give the volume bound ~ delta^3";
      if (cfg.get_string("triple", "random") == "example")
        triple = make_generic_triple({Sphere(Vec{0.0, 0.0, 0.0}, 1.2), Sphere(Vec{0.7, 0.0, 0.0}, 1.3),
                                      Sphere(Vec{0.0, 0.7, 0.0}, 1.4)});
      else
        triple = generic_triple(cfg.seed);
      break;
  }

  r.raw.columns = {"delta", "value", "std_error", "hits", "samples", "domain_volume"};
  std::vector<std::pair<double, double>> points;
  bool zeroHits = false;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const std::vector<Region> regions = regions_of(triple.spheres, deltas[k], RegionKind::Annulus);
    const VolumeEstimate e = mc_volume(regions, cfg.samples, substream_seed(cfg.seed, {k}));
    r.raw.rows.push_back({format_exact(deltas[k]), format_exact(e.value), format_exact(e.stdError),
                          std::to_string(e.hits), std::to_string(e.samples), format_exact(e.domainVolume)});
    if (e.hits == 0) {
      zeroHits = true;
      r.failures.push_back("no hits at delta = " + fmt(deltas[k]));
    } else {
      points.emplace_back(deltas[k], e.value);
    }
  }

  for (std::size_t j = 0; j < 3; ++j) {
    const Sphere& s = triple.spheres[j];
    add(r, "sphere" + std::to_string(j + 1),
        "centre (" + fmt(s.centre[0]) + ", " + fmt(s.centre[1]) + ", " + fmt(s.centre[2]) + ") radius " + fmt(s.radius));
  }
  add(r, "certificate", fmt(triple.certificate));
  add(r, "retries", std::to_string(triple.retries));
  add(r, "expected_exponent", fmt(triple.expectedExponent));
  if (!zeroHits && points.size() >= 3) {
    const FitResult fit = fit_exponent(points);
    add(r, "slope", fmt(fit.slope));
    add(r, "slope_stderr", fmt(fit.stdError));
    add(r, "tolerance", "0.15");
    if (std::abs(fit.slope - triple.expectedExponent) > 0.15)
      r.failures.push_back("slope " + fmt(fit.slope) + " differs from " + fmt(triple.expectedExponent) + " by more than 0.15");
  } else if (points.size() < 3) {
    r.failures.push_back("fewer than three usable deltas");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Tuple bound

Vec random_in_disk(Rng& rng, double radius) {
  for (;;) {
    const Vec v{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    if (norm2(v) <= 1.0) return v * radius;
  }
}

double log_uniform(Rng& rng, double lo, double hi) { return lo >= hi ? hi : lo * std::exp(rng.uniform() * std::log(hi / lo)); }

// Three spheres through a common point q whose normals at q lie well inside
// the polar cones, with centre distances and angles spread over all scales.
std::optional<std::array<Sphere, 3>> cap_triple(Rng& rng, double delta) {
  const double height = rng.uniform(1.3, 1.9);
  const double reach = 0.07 * height;
  const Vec q{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
  const Vec c1 = q + random_in_disk(rng, reach / 2.0);
  const double dLo = 2.5 * delta;
  if (dLo >= reach) return std::nullopt;
  for (int attempt = 0; attempt < 256; ++attempt) {
    const double d2 = log_uniform(rng, dLo, reach);
    const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Vec u{std::cos(a), std::sin(a)};
    const Vec w{-u[1], u[0]};
    const Vec c2 = c1 + u * d2;
    const double d3 = log_uniform(rng, dLo, reach);
    const double v = log_uniform(rng, std::min(1.0, 3.0 * delta / d3), 1.0);
    const double along = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::sqrt(std::max(0.0, 1.0 - v * v));
    const double across = rng.uniform() < 0.5 ? -v : v;
    const Vec c3 = c1 + (u * along + w * across) * d3;
    if (distance(c2, q) > reach || distance(c3, q) > reach) continue;
    std::array<Sphere, 3> out;
    const Vec centres[3] = {c1, c2, c3};
    for (std::size_t j = 0; j < 3; ++j)
      out[j] = Sphere(lift(centres[j], 0.0), std::hypot(distance(centres[j], q), height));
    return out;
  }
  return std::nullopt;
}

// Enemy triple in Q^2 x {0}: C_1 = sphere(0, 1.5) and two centres at generic
// positions, each circle C_1 ∩ C_j passing through the equator point p.
std::optional<TripleSpec> random_enemy(Rng& rng) {
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Vec p{std::cos(phi), std::sin(phi)};
  Vec c[2];
  for (Vec& cj : c) {
    cj = random_in_disk(rng, 0.4);
    const double len = norm(cj);
    if (len < 0.05 || std::abs(dot(cj, p)) > 0.98 * len) return std::nullopt;
  }
  if (distance(c[0], c[1]) < 0.05) return std::nullopt;
  return enemy_triple(0.01, phi, c[0], c[1], 1.5);
}

struct TupleClass {
  double t2, t3, theta3;
};

std::optional<TupleClass> classify_triple(const std::array<Sphere, 3>& s, double delta) {
  if (centre_distance(s[1], s[2]) < 2.0 * delta) return std::nullopt;
  const auto t2 = distance_bucket(s[0], s[1], delta);
  const auto t3 = distance_bucket(s[0], s[2], delta);
  if (!t2 || !t3 || *t2 > 1.0 || *t3 > 1.0) return std::nullopt;
  const Sphere priors[2] = {s[0], s[1]};
  const auto theta = angular_bucket(priors, s[2], delta, *t3);
  if (!theta) return std::nullopt;
  return TupleClass{*t2, *t3, *theta};
}

ExperimentReport run_tuple_bound(const ExperimentConfig& cfg) {
  require_dim3(cfg);
  ExperimentReport r;
  r.kind = cfg.experiment;
  const std::string mode = cfg.get_string("triples", "cap");
  const bool enemy = mode == "enemy";
  if (!enemy && mode != "cap") throw std::invalid_argument("config: triples must be 'cap' or 'enemy'");
  r.anchor = enemy ? "polar regions rescue the enemy scenario: |cap triple| <~ delta^3 / (t2 t3 theta3)"
                   : "general tuple bound: |C1* ∩ C2* ∩ C3*| <~ delta^3 / (t2 t3 theta3)";
  const std::uint64_t trials = cfg.get_uint("trials", 48);
  const std::vector<double> deltas = sorted_deltas(cfg);

  std::vector<TripleSpec> enemies;
  if (enemy) {
    for (std::uint64_t t = 0; enemies.size() < trials && t < 100 * trials; ++t) {
      Rng rng(substream_seed(cfg.seed, {1000, t}));
      if (auto e = random_enemy(rng)) enemies.push_back(*e);
    }
  }

  r.raw.columns = {"delta", "trial", "t2", "t3", "theta3", "volume", "std_error", "hits", "bound", "ratio"};
  if (enemy) {
    r.raw.columns.push_back("full_volume");
    r.raw.columns.push_back("full_ratio");
  }
  std::vector<std::pair<double, double>> kCap, kFull;
  std::size_t classifiedTotal = 0;
  std::uint64_t capHits = 0;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double delta = deltas[k];
    double worst = 0.0, worstFull = 0.0;
    for (std::uint64_t t = 0; t < (enemy ? enemies.size() : trials); ++t) {
      std::optional<std::array<Sphere, 3>> spheres;
      if (enemy) {
        spheres = enemies[t].spheres;
      } else {
        Rng rng(substream_seed(cfg.seed, {k, t}));
        spheres = cap_triple(rng, delta);
      }
      if (!spheres) continue;
      const auto cls = classify_triple(*spheres, delta);
      if (!cls) continue;
      ++classifiedTotal;
      const double tl[2] = {cls->t2, cls->t3};
      const double th[1] = {cls->theta3};
      const double bound = predicted_tuple_bound(3, delta, tl, th).value;
      const VolumeEstimate e =
          mc_volume(regions_of(*spheres, delta, RegionKind::PolarCap), cfg.samples, substream_seed(cfg.seed, {k, t, 1}));
      const double ratio = e.value / bound;
      capHits += e.hits;
      worst = std::max(worst, ratio);
      std::vector<std::string> row{format_exact(delta),     std::to_string(t),       format_exact(cls->t2),
                                   format_exact(cls->t3),   format_exact(cls->theta3), format_exact(e.value),
                                   format_exact(e.stdError), std::to_string(e.hits), format_exact(bound),
                                   format_exact(ratio)};
      if (enemy) {
        const VolumeEstimate full = mc_volume(regions_of(*spheres, delta, RegionKind::Annulus), cfg.samples,
                                              substream_seed(cfg.seed, {k, t, 2}));
        worstFull = std::max(worstFull, full.value / bound);
        row.push_back(format_exact(full.value));
        row.push_back(format_exact(full.value / bound));
      }
      r.raw.rows.push_back(std::move(row));
    }
    kCap.emplace_back(delta, worst);
    if (enemy) kFull.emplace_back(delta, worstFull);
  }
  add(r, "trials_per_delta", std::to_string(enemy ? enemies.size() : trials));
  add(r, "classified_tuples", std::to_string(classifiedTotal));
  add(r, "K_cap", k_list(kCap));
  if (enemy) add(r, "cap_hits", std::to_string(capHits));
  check_stability(r, "K_cap", kCap);
  if (enemy) {
    add(r, "K_full_annulus", k_list(kFull));
    std::vector<std::pair<double, double>> positive;
    for (const auto& p : kFull)
      if (p.second > 0.0) positive.push_back(p);
    if (positive.size() >= 3) add(r, "K_full_annulus_slope", fmt(fit_exponent(positive).slope));
    std::vector<std::pair<double, double>> capPositive;
    for (const auto& p : kCap)
      if (p.second > 0.0) capPositive.push_back(p);
    if (capPositive.size() >= 3) add(r, "K_cap_slope", fmt(fit_exponent(capPositive).slope));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Multiplicity

SphereFamily make_family(const ExperimentConfig& cfg, double delta, std::uint64_t seed) {
  const std::string mode = cfg.get_string("family", "translated");
  const std::string sizeText = cfg.get_string("familySize", "capacity");
  const std::size_t capacity = family_capacity(cfg.n, delta);
  const std::size_t size = sizeText == "capacity" ? capacity : std::min<std::size_t>(capacity, cfg.get_uint("familySize", 0));
  if (mode == "translated") {
    const double radius = cfg.get_double("radius", 1.5);
    return random_family(cfg.n, delta, size, seed, radius, radius);
  }
  if (mode == "random") return random_family(cfg.n, delta, size, seed);
  if (mode == "focused") return focused_family(cfg.n, delta, seed);
  throw std::invalid_argument("config: family must be 'translated', 'random' or 'focused'");
}

ExperimentReport run_multiplicity(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.kind = cfg.experiment;
  r.anchor = "multiplicity bound: ∫(Σ chi_{C*})^n <~ log(1/delta) delta^(n-(n-1)^2) #C";
  const std::vector<double> deltas = sorted_deltas(cfg);
  r.raw.columns = {"delta", "family_size", "value", "std_error", "denominator", "ratio"};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const SphereFamily family = make_family(cfg, deltas[k], substream_seed(cfg.seed, {k}));
    const MultiplicityEstimate e = multiplicity_functional(family, cfg.samples, substream_seed(cfg.seed, {k, 1}));
    const double den = predicted_rhs(RhsKind::Multiplicity, static_cast<int>(cfg.n), static_cast<int>(cfg.n), deltas[k],
                                     {}, {}, family.size());
    const double ratio = e.value / den;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    r.raw.rows.push_back({format_exact(deltas[k]), std::to_string(family.size()), format_exact(e.value),
                          format_exact(e.stdError), format_exact(den), format_exact(ratio)});
    if (e.value > 0.0 && e.stdError > 0.05 * e.value)
      r.warnings.push_back("relative error above 5% at delta = " + fmt(deltas[k]));
  }
  add(r, "family", cfg.get_string("family", "translated"));
  add(r, "ratio_min", fmt(lo));
  add(r, "ratio_max", fmt(hi));
  const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  add(r, "ratio_max_over_min", fmt(spread));
  if (!(spread <= 4.0)) r.failures.push_back("ratio max/min " + fmt(spread) + " exceeds 4");
  return r;
}

// ---------------------------------------------------------------------------
// Cardinality

ExperimentReport run_cardinality(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.kind = cfg.experiment;
  r.anchor = "cardinality bounds: #C_t <~ (t/delta)^(n-1), #C_{t,theta} <~ theta^(n-j+1) t^(n-1) / delta^(n-1), "
             "#C_{t,<=delta/t} <~ (t/delta)^(i-1)";
  const std::vector<double> deltas = sorted_deltas(cfg);
  const std::uint64_t anchors = cfg.get_uint("anchors", 16);
  const double n = static_cast<double>(cfg.n);
  r.raw.columns = {"delta", "c1", "c2", "cell", "t", "theta", "count", "bound", "ratio"};
  std::vector<std::pair<double, double>> kDist, kAng, kDeg;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double delta = deltas[k];
    const SphereFamily family = random_family(cfg.n, delta, family_capacity(cfg.n, delta), substream_seed(cfg.seed, {k}));
    Rng pick(substream_seed(cfg.seed, {k, 1}));
    double worstDist = 0.0, worstAng = 0.0, worstDeg = 0.0;
    auto emit = [&](std::size_t c1, long long c2, const char* cell, double t, double theta, std::uint64_t count,
                    double bound) {
      const double ratio = static_cast<double>(count) / bound;
      r.raw.rows.push_back({format_exact(delta), std::to_string(c1), std::to_string(c2), cell, format_exact(t),
                            format_exact(theta), std::to_string(count), format_exact(bound), format_exact(ratio)});
      return ratio;
    };
    for (std::uint64_t a = 0; a < anchors && family.size() > 1; ++a) {
      const std::size_t c1 = static_cast<std::size_t>(pick.below(family.size()));
      const std::size_t one[1] = {c1};
      std::map<double, std::vector<std::size_t>> byT;
      for (std::size_t i = 0; i < family.size(); ++i) {
        if (i == c1) continue;
        byT[dyadic_ceiling(centre_distance(family.spheres[c1], family.spheres[i]))].push_back(i);
      }
      for (const auto& [t, members] : byT) {
        const CardinalityReport rep = cardinality_audit(family, one, t, 1.0);
        worstDist = std::max(worstDist, emit(c1, -1, "distance", t, 1.0, rep.distanceCount, std::pow(t / delta, n - 1.0)));
        if (t < 2.0 * delta) continue;
        const std::size_t c2 = members[static_cast<std::size_t>(pick.below(members.size()))];
        const std::size_t priors[2] = {c1, c2};
        for (const auto& [cellKey, count] : cardinality_scan(family, priors)) {
          const auto [tc, theta] = cellKey;
          if (theta > 0.0) {
            const double bound = std::pow(theta, n - 2.0) * std::pow(tc / delta, n - 1.0);
            worstAng = std::max(worstAng, emit(c1, static_cast<long long>(c2), "angular", tc, theta, count, bound));
          } else {
            worstDeg = std::max(worstDeg, emit(c1, static_cast<long long>(c2), "degenerate", tc, 0.0, count, tc / delta));
          }
        }
      }
    }
    kDist.emplace_back(delta, worstDist);
    kAng.emplace_back(delta, worstAng);
    kDeg.emplace_back(delta, worstDeg);
  }
  add(r, "K_distance", k_list(kDist));
  add(r, "K_angular", k_list(kAng));
  add(r, "K_degenerate", k_list(kDeg));
  check_stability(r, "K_distance", kDist);
  check_stability(r, "K_angular", kAng);
  check_stability(r, "K_degenerate", kDeg);
  return r;
}

// ---------------------------------------------------------------------------
// Bucket audit

ExperimentReport run_bucket_audit(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.kind = cfg.experiment;
  r.anchor = "tuple decomposition: coincident class plus cells (J, t, theta) partition all ordered tuples; "
             "coincident total <~ delta #C";
  const std::vector<double> deltas = sorted_deltas(cfg);
  const int m = static_cast<int>(cfg.get_uint("m", 3));
  if (m < 1 || m > static_cast<int>(cfg.n)) throw std::invalid_argument("config: m must lie in [1, n]");
  const std::size_t size = cfg.get_uint("familySize", 64);
  r.raw.columns = {"delta", "J", "t_list", "theta_list", "count"};
  std::vector<std::pair<double, double>> kBase;
  bool allOk = true;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double delta = deltas[k];
    const SphereFamily family = random_family(cfg.n, delta, size, substream_seed(cfg.seed, {k}));
    const BucketReport rep = bucket_audit(family, m, true);
    std::uint64_t expected = 1;
    for (int i = 0; i < m; ++i) expected *= family.size();
    const bool ok = rep.partitionOk && rep.classified + rep.coincident == expected && rep.verifiedTuples == expected;
    allOk = allOk && ok;
    for (const auto& [sig, count] : rep.buckets)
      r.raw.rows.push_back({format_exact(delta), fmt_int_list(sig.J), fmt_list(sig.tList), fmt_list(sig.thetaList),
                            std::to_string(count)});

    double baseTotal = 0.0;
    std::size_t idx = 0;
    for (const auto& [support, count] : rep.coincidentSupports) {
      std::vector<Sphere> spheres;
      for (std::size_t i : support) spheres.push_back(family.spheres[i]);
      const std::vector<Region> caps = regions_of(spheres, delta, RegionKind::PolarCap);
      ++idx;
      if (bounding_box(caps).empty()) continue;
      baseTotal += static_cast<double>(count) * mc_volume(caps, cfg.samples, substream_seed(cfg.seed, {k, idx})).value;
    }
    const double kb = baseTotal / (delta * static_cast<double>(family.size()));
    kBase.emplace_back(delta, kb);
    const std::string tag = "delta=" + fmt(delta);
    add(r, tag + " partition", ok ? "OK" : "VIOLATED");
    add(r, tag + " tuples classified", std::to_string(rep.classified));
    add(r, tag + " coincident-class", std::to_string(rep.coincident));
    add(r, tag + " cells", std::to_string(rep.buckets.size()));
    add(r, tag + " coincident total", fmt(baseTotal));
    add(r, tag + " K_base", fmt(kb));
    if (!ok) r.failures.push_back("partition violated at delta = " + fmt(delta));
  }
  add(r, "partition", allOk ? "OK" : "VIOLATED");
  if (kBase.size() >= 2) check_stability(r, "K_base", kBase);
  return r;
}

// ---------------------------------------------------------------------------
// Maximal norm probes

Vec rotate_quarter(const Vec& v) {
  Vec out = v;
  out[0] = -v[1];
  out[1] = v[0];
  return out;
}

ExperimentReport run_maximal_norm(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.kind = cfg.experiment;
  r.anchor = "sliced norm reduction: ||M^{delta,*} f||_{L^{p_n}(Q^{n-1} x {0})} with translation and rotation symmetry";
  const std::vector<double> deltas = sorted_deltas(cfg);
  const std::size_t n = cfg.n;
  r.raw.columns = {"delta", "probe", "value", "std_error", "reference", "reference_std_error", "pass"};
  std::size_t statMisses = 0;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    MaxProbeConfig mc;
    mc.n = n;
    mc.delta = deltas[k];
    mc.samples = cfg.get_uint("averageSamples", 4096);
    mc.seed = substream_seed(cfg.seed, {k});
    const double p = mc.exponent();
    auto row = [&](const std::string& probe, double v, double se, double ref, double refSe, bool pass) {
      r.raw.rows.push_back({format_exact(deltas[k]), probe, format_exact(v), format_exact(se), format_exact(ref),
                            format_exact(refSe), pass ? "1" : "0"});
    };

    const NormEstimate one = sliced_max_norm(ScalarField{Constant{1.0}}, mc);
    const double exactOne = std::pow(std::pow(cube_side(n), static_cast<double>(n - 1)), 1.0 / p);
    const bool oneOk = std::abs(one.value - exactOne) <= 1e-9 * exactOne;
    row("constant", one.value, one.stdError, exactOne, 0.0, oneOk);
    if (!oneOk) r.failures.push_back("constant field norm mismatch at delta = " + fmt(deltas[k]));

    Vec centre(n);
    centre[0] = 0.05;
    centre[1] = 0.02;
    centre[n - 1] = 1.5;
    const ScalarField ball{IndicatorBall{centre, 0.25}};
    const NormEstimate base = sliced_max_norm(ball, mc);

    Vec shift(n);
    shift[0] = 0.07;
    shift[1] = -0.04;
    MaxProbeConfig mcShift = mc;
    mcShift.seed = substream_seed(cfg.seed, {k, 1});
    const NormEstimate moved = sliced_max_norm(ScalarField{IndicatorBall{centre + shift, 0.25}}, mcShift,
                                               RegionKind::PolarCap, shift);
    const double tol = 3.0 * std::hypot(base.stdError, moved.stdError);
    const bool transOk = std::abs(base.value - moved.value) <= tol;
    row("translation", moved.value, moved.stdError, base.value, base.stdError, transOk);

    MaxProbeConfig mcRot = mc;
    mcRot.seed = substream_seed(cfg.seed, {k, 2});
    const NormEstimate rotated = sliced_max_norm(ScalarField{IndicatorBall{rotate_quarter(centre), 0.25}}, mcRot);
    const bool rotOk = std::abs(base.value - rotated.value) <= 3.0 * std::hypot(base.stdError, rotated.stdError);
    row("rotation", rotated.value, rotated.stdError, base.value, base.stdError, rotOk);

    Vec other = centre;
    other[0] = -0.1;
    other[n - 1] = 1.3;
    const ScalarField g{IndicatorBall{other, 0.2}};
    bool subOk = true;
    for (std::uint64_t i = 0; i < 4; ++i) {
      Vec x(n);
      x[0] = 0.05 * static_cast<double>(i);
      const MaxValue fg = eval_max(ball + g, x, mc, RegionKind::PolarCap, 100 + i);
      const MaxValue fv = eval_max(ball, x, mc, RegionKind::PolarCap, 200 + i);
      const MaxValue gv = eval_max(g, x, mc, RegionKind::PolarCap, 300 + i);
      const double slack = 3.0 * std::sqrt(fg.stdError * fg.stdError + fv.stdError * fv.stdError + gv.stdError * gv.stdError);
      const bool ok = fg.value <= fv.value + gv.value + slack;
      subOk = subOk && ok;
      row("sublinearity", fg.value, fg.stdError, fv.value + gv.value, slack / 3.0, ok);
    }

    const ScalarField shell{IndicatorAnnulus{Sphere(Vec(n), 1.5), deltas[k]}};
    const NormEstimate sliced = sliced_max_norm(shell, mc, RegionKind::Annulus);
    const NormEstimate full = full_max_norm(shell, mc, RegionKind::Annulus);
    row("slice_vs_full", sliced.value, sliced.stdError, full.value, full.stdError, sliced.value > 0.0);

    for (const auto& [name, ok] : {std::pair{"translation", transOk}, std::pair{"rotation", rotOk},
                                   std::pair{"sublinearity", subOk}})
      if (!ok) {
        ++statMisses;
        r.warnings.push_back(std::string(name) + " 3-sigma miss at delta = " + fmt(deltas[k]));
      }
    add(r, "delta=" + fmt(deltas[k]) + " sliced_norm", fmt(base.value) + " +- " + fmt(base.stdError));
    add(r, "delta=" + fmt(deltas[k]) + " shell sliced/full", fmt(sliced.value) + " / " + fmt(full.value));
  }
  add(r, "statistical_misses", std::to_string(statMisses));
  if (statMisses >= 3) r.failures.push_back("repeated 3-sigma misses across deltas");
  return r;
}

// ---------------------------------------------------------------------------
// Focusing

ExperimentReport run_focusing(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.kind = cfg.experiment;
  r.anchor = "sharpness: ||M^delta f||_p / ||f||_p grows polynomially in 1/delta below p_n = n/(n-1)";
  const std::vector<double> deltas = sorted_deltas(cfg);
  const std::vector<double> ps = cfg.get_list("p", {1.2, 1.5, 2.0});
  const std::uint64_t samples = cfg.get_uint("averageSamples", 4096);
  const std::size_t radial = cfg.get_uint("radialPoints", 16);
  r.raw.columns = {"p", "delta", "ratio"};
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const FocusingResult res = focusing_probe(cfg.n, ps[i], deltas, samples, substream_seed(cfg.seed, {i}), radial);
    for (std::size_t k = 0; k < res.deltas.size(); ++k)
      r.raw.rows.push_back({format_exact(ps[i]), format_exact(res.deltas[k]), format_exact(res.ratios[k])});
    const std::string tag = "p=" + fmt(ps[i]);
    add(r, tag + " slope", fmt(res.slope));
    add(r, tag + " predicted", fmt(res.predictedSlope));
    add(r, tag + " slope_stderr", fmt(res.slopeStdError));
    if (std::abs(res.slope - res.predictedSlope) > 0.15)
      r.failures.push_back(tag + ": slope " + fmt(res.slope) + " differs from " + fmt(res.predictedSlope) + " by more than 0.15");
  }
  add(r, "critical_exponent", fmt(critical_exponent(cfg.n)));
  return r;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport r;
  switch (cfg.experiment) {
    case ExperimentKind::EnemyScan:
    case ExperimentKind::CollinearScan:
    case ExperimentKind::GenericScan:
      r = run_scan(cfg);
      break;
    case ExperimentKind::TupleBound:
      r = run_tuple_bound(cfg);
      break;
    case ExperimentKind::Multiplicity:
      r = run_multiplicity(cfg);
      break;
    case ExperimentKind::Cardinality:
      r = run_cardinality(cfg);
      break;
    case ExperimentKind::BucketAudit:
      r = run_bucket_audit(cfg);
      break;
    case ExperimentKind::MaximalNorm:
      r = run_maximal_norm(cfg);
      break;
    case ExperimentKind::FocusingSweep:
      r = run_focusing(cfg);
      break;
  }
  r.summary.insert(r.summary.begin(), {"seed", std::to_string(cfg.seed)});
  return r;
}

}  // namespace sphmax
