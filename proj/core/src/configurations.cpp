#include "sphmax/configurations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "sphmax/parallel.hpp"
#include "sphmax/rng.hpp"
#include "sphmax/volume.hpp"

namespace sphmax {

namespace {

constexpr double kLatticeFactor = 1.5;

// Lattice sites per axis: first site at -side/2 + delta/4, last one at most
// side/2 - delta/4, so jittered centres stay inside Q.
std::size_t sites_per_axis(std::size_t n, double delta) {
  const double side = cube_side(n);
  if (side < delta / 2.0) return 0;
  return static_cast<std::size_t>(std::floor((side - delta / 2.0) / (kLatticeFactor * delta))) + 1;
}

void check_family_args(std::size_t n, double delta) {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("family: dimension out of range");
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("family: delta must lie in (0, 1/2)");
}

Vec lattice_site(std::size_t n, double delta, std::size_t perAxis, std::size_t index) {
  const double start = -cube_side(n) / 2.0 + delta / 4.0;
  Vec h(n - 1);
  for (std::size_t a = 0; a + 1 < n; ++a) {
    h[a] = start + kLatticeFactor * delta * static_cast<double>(index % perAxis);
    index /= perAxis;
  }
  return h;
}

// Uniform point of the (d)-ball of the given radius, by rejection.
Vec ball_jitter(Rng& rng, std::size_t d, double radius) {
  Vec v(d);
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) v[i] = rng.uniform(-1.0, 1.0);
    if (norm2(v) <= 1.0) return v * radius;
  }
}

Vec jittered_site(std::size_t n, double delta, std::size_t perAxis, std::size_t index, Rng& rng) {
  return lattice_site(n, delta, perAxis, index) + ball_jitter(rng, n - 1, delta / 4.0);
}

Vec random_unit(Rng& rng, std::size_t d) {
  Vec v(d);
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) v[i] = rng.normal();
    const double len = norm(v);
    if (len > 1e-12) return v * (1.0 / len);
  }
}

}  // namespace

double cube_side(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

std::size_t family_capacity(std::size_t n, double delta) {
  check_family_args(n, delta);
  const std::size_t perAxis = sites_per_axis(n, delta);
  std::size_t cap = 1;
  for (std::size_t a = 0; a + 1 < n; ++a) cap *= perAxis;
  return cap;
}

SphereFamily random_family(std::size_t n, double delta, std::size_t targetCount, std::uint64_t seed,
                           double radiusMin, double radiusMax) {
  if (!(radiusMin > 0.0 && radiusMax >= radiusMin)) throw std::invalid_argument("random_family: invalid radius range");
  const std::size_t capacity = family_capacity(n, delta);
  if (targetCount > capacity) throw std::invalid_argument("random_family: count exceeds grid capacity");
  const std::size_t perAxis = sites_per_axis(n, delta);

  // Partial Fisher-Yates over site indices.
  std::vector<std::size_t> sites(capacity);
  std::iota(sites.begin(), sites.end(), std::size_t{0});
  Rng pick(substream_seed(seed, {0}));
  for (std::size_t i = 0; i < targetCount; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(pick.below(capacity - i));
    std::swap(sites[i], sites[j]);
  }
  sites.resize(targetCount);
  std::sort(sites.begin(), sites.end());

  SphereFamily family{n, delta, {}};
  family.spheres.reserve(targetCount);
  for (std::size_t site : sites) {
    Rng rng(substream_seed(seed, {1, site}));
    const Vec h = jittered_site(n, delta, perAxis, site, rng);
    const double radius = rng.uniform(radiusMin, radiusMax);
    family.spheres.emplace_back(lift(h, 0.0), radius);
  }
  return family;
}

SphereFamily focused_family(std::size_t n, double delta, std::uint64_t seed, double focusHeight, double spread) {
  check_family_args(n, delta);
  if (!(focusHeight >= 1.0) || !(std::hypot(spread, focusHeight) <= 2.0))
    throw std::invalid_argument("focused_family: radii would leave [1, 2]");
  const double half = cube_side(n) / 2.0;
  if (!(spread > 0.0 && spread < half)) throw std::invalid_argument("focused_family: spread out of range");
  const std::size_t perAxis = sites_per_axis(n, delta);
  const std::size_t capacity = family_capacity(n, delta);

  Rng pick(substream_seed(seed, {0}));
  Vec focus(n - 1);
  for (std::size_t a = 0; a + 1 < n; ++a) focus[a] = pick.uniform(-(half - spread), half - spread);

  SphereFamily family{n, delta, {}};
  for (std::size_t site = 0; site < capacity; ++site) {
    Rng rng(substream_seed(seed, {1, site}));
    const Vec h = jittered_site(n, delta, perAxis, site, rng);
    const double d = distance(h, focus);
    if (d > spread) continue;
    family.spheres.emplace_back(lift(h, 0.0), std::hypot(d, focusHeight));
  }
  return family;
}

double min_separation(const SphereFamily& family) {
  double best = std::numeric_limits<double>::infinity();
  const auto& s = family.spheres;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) best = std::min(best, centre_distance(s[i], s[j]));
  return best;
}

// ---------------------------------------------------------------------------
// Extremal triples

TripleSpec enemy_triple(double delta, double phi, const Vec& centre2, const Vec& centre3, double radius1) {
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("enemy_triple: delta must lie in (0, 1/2)");
  if (centre2.size() != 2 || centre3.size() != 2) throw std::invalid_argument("enemy_triple: centres must be planar");
  if (!(radius1 > 0.0)) throw std::invalid_argument("enemy_triple: radius must be positive");
  const Vec p{radius1 * std::cos(phi), radius1 * std::sin(phi), 0.0};
  const Vec x2 = lift(centre2, 0.0);
  const Vec x3 = lift(centre3, 0.0);
  if (norm(centre2) == 0.0 || norm(centre3) == 0.0 || centre2 == centre3)
    throw std::invalid_argument("enemy_triple: coincident centres");

  // Tangent of the circle C_1 ∩ C_j at p: orthogonal to both sphere normals.
  auto tangent = [&](const Vec& x) {
    const Vec t = cross(p, x);
    const double len = norm(t);
    if (len <= 1e-9 * norm(p) * norm(x)) throw std::invalid_argument("enemy_triple: centre parallel to tangency point");
    return t * (1.0 / len);
  };
  const Vec t2 = tangent(x2);
  const Vec t3 = tangent(x3);

  TripleSpec spec;
  spec.kind = TripleKind::Enemy;
  spec.spheres = {Sphere(Vec(3), radius1), Sphere(x2, distance(p, x2)), Sphere(x3, distance(p, x3))};
  spec.expectedExponent = 2.5;
  spec.certificate = norm(cross(t2, t3));
  spec.commonPoint = p;
  return spec;
}

TripleSpec collinear_triple(double spacing, double circlePlaneOffset, double circleRadius) {
  if (!(spacing > 0.0) || !(circleRadius > 0.0)) throw std::invalid_argument("collinear_triple: invalid geometry");
  TripleSpec spec;
  spec.kind = TripleKind::Collinear;
  spec.expectedExponent = 2.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double x = spacing * static_cast<double>(j);
    const double r = std::hypot(circlePlaneOffset - x, circleRadius);
    if (r < 1.0 || r > 2.0) throw std::invalid_argument("collinear_triple: radius outside [1, 2]");
    spec.spheres[j] = Sphere(Vec{x, 0.0, 0.0}, r);
  }
  double worst = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 8.0;
    const Vec y{circlePlaneOffset, circleRadius * std::cos(a), circleRadius * std::sin(a)};
    for (const Sphere& s : spec.spheres) worst = std::max(worst, std::abs(distance(y, s.centre) - s.radius));
  }
  spec.certificate = worst;
  spec.commonPoint = Vec{circlePlaneOffset, 0.0, circleRadius};
  return spec;
}

TripleSpec make_generic_triple(const std::array<Sphere, 3>& spheres) {
  for (const Sphere& s : spheres)
    if (s.dim() != 3) throw std::invalid_argument("make_generic_triple: spheres must lie in R^3");
  const Vec& x1 = spheres[0].centre;
  const Vec a = spheres[1].centre - x1;
  const Vec b = spheres[2].centre - x1;
  const Vec axis = cross(a, b);
  const double axisLen = norm(axis);
  if (axisLen <= 1e-9 * norm(a) * norm(b)) throw std::invalid_argument("make_generic_triple: collinear centres");

  // With y = x1 + z: 2<a, z> = |a|^2 + r1^2 - r2^2 and likewise for b.
  const double r1 = spheres[0].radius;
  const double ca = 0.5 * (norm2(a) + r1 * r1 - spheres[1].radius * spheres[1].radius);
  const double cb = 0.5 * (norm2(b) + r1 * r1 - spheres[2].radius * spheres[2].radius);
  const double aa = dot(a, a), ab = dot(a, b), bb = dot(b, b);
  const double det = aa * bb - ab * ab;
  const double alpha = (ca * bb - cb * ab) / det;
  const double beta = (cb * aa - ca * ab) / det;
  const Vec z0 = a * alpha + b * beta;
  const double h2 = r1 * r1 - norm2(z0);
  if (h2 <= 0.0) throw std::invalid_argument("make_generic_triple: spheres do not meet");
  Vec u = axis * (1.0 / axisLen);
  if (u[2] < 0.0) u = -u;
  const Vec y = x1 + z0 + u * std::sqrt(h2);

  std::vector<Vec> normals;
  for (const Sphere& s : spheres) normals.push_back((y - s.centre) * (1.0 / s.radius));
  const double transversality = wedge_norm(normals);
  if (transversality < kGenericTransversality) throw std::invalid_argument("make_generic_triple: not transversal");

  TripleSpec spec;
  spec.kind = TripleKind::Generic;
  spec.spheres = spheres;
  spec.expectedExponent = 3.0;
  spec.certificate = transversality;
  spec.commonPoint = y;
  return spec;
}

TripleSpec generic_triple(std::uint64_t seed) {
  constexpr double kProbeDelta = 1.0 / 32.0;
  constexpr std::uint64_t kProbeSamples = 1u << 16;
  constexpr std::size_t kMaxAttempts = 100000;
  std::size_t retries = 0;
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(substream_seed(seed, {attempt}));
    const Vec u2 = random_unit(rng, 3);
    Vec w = random_unit(rng, 3);
    w -= u2 * dot(u2, w);
    if (norm(w) < 1e-6) {
      ++retries;
      continue;
    }
    w *= 1.0 / norm(w);
    const double angle = rng.uniform(std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0);
    const Vec u3 = u2 * std::cos(angle) + w * std::sin(angle);
    const Vec x2 = u2 * rng.uniform(0.5, 1.0);
    const Vec x3 = u3 * rng.uniform(0.5, 1.0);
    const double d23 = distance(x2, x3);
    const std::array<double, 3> radii{rng.uniform(1.0, 2.0), rng.uniform(1.0, 2.0), rng.uniform(1.0, 2.0)};
    if (d23 < 0.5 || d23 > 1.0) {
      ++retries;
      continue;
    }
    const std::array<Sphere, 3> spheres{Sphere(Vec(3), radii[0]), Sphere(x2, radii[1]), Sphere(x3, radii[2])};
    TripleSpec spec;
    try {
      spec = make_generic_triple(spheres);
    } catch (const std::invalid_argument&) {
      ++retries;
      continue;
    }
    std::vector<Region> regions;
    for (const Sphere& s : spheres) regions.push_back(Region::annulus(s, kProbeDelta));
    if (mc_volume(regions, kProbeSamples, substream_seed(seed, {attempt, 1})).hits == 0) {
      ++retries;
      continue;
    }
    spec.retries = retries;
    return spec;
  }
  throw std::runtime_error("generic_triple: no transversal triple found");
}

// ---------------------------------------------------------------------------
// Dyadic classification

double dyadic_ceiling(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw std::invalid_argument("dyadic_ceiling: value must be positive");
  int e = 0;
  const double f = std::frexp(value, &e);  // value = f 2^e, f in [1/2, 1)
  return f == 0.5 ? value : std::ldexp(1.0, e);
}

std::optional<double> distance_bucket(const Sphere& a, const Sphere& b, double delta) {
  const double d = centre_distance(a, b);
  if (d < 2.0 * delta) return std::nullopt;
  return dyadic_ceiling(d);
}

double angular_projection(std::span<const Sphere> priors, const Sphere& candidate) {
  if (priors.empty()) throw std::invalid_argument("angular_projection: no priors");
  std::vector<Vec> basis;
  for (std::size_t i = 1; i < priors.size(); ++i) basis.push_back(unit_direction(priors[0], priors[i]).eFull);
  const Vec e = unit_direction(priors[0], candidate).eFull;
  return std::min(1.0, norm(proj_orthocomplement(basis, e)));
}

std::optional<double> angular_bucket(std::span<const Sphere> priors, const Sphere& candidate, double delta, double t) {
  const double v = angular_projection(priors, candidate);
  if (v <= 2.0 * delta / t) return std::nullopt;
  return dyadic_ceiling(v);
}

namespace {

bool any_coincident_pair(const SphereFamily& family, std::span<const std::size_t> tuple) {
  for (std::size_t a = 0; a < tuple.size(); ++a)
    for (std::size_t b = a + 1; b < tuple.size(); ++b)
      if (centre_distance(family.spheres[tuple[a]], family.spheres[tuple[b]]) < 2.0 * family.delta) return true;
  return false;
}

}  // namespace

std::optional<BucketSignature> classify_tuple(const SphereFamily& family, std::span<const std::size_t> tuple) {
  if (tuple.empty()) throw std::invalid_argument("classify_tuple: empty tuple");
  if (any_coincident_pair(family, tuple)) return std::nullopt;
  const double delta = family.delta;
  BucketSignature sig;
  sig.m = static_cast<int>(tuple.size());
  const Sphere& c1 = family.spheres[tuple[0]];
  std::vector<Sphere> priors{c1};
  for (std::size_t j = 1; j < tuple.size(); ++j) {
    const Sphere& cj = family.spheres[tuple[j]];
    const double t = *distance_bucket(c1, cj, delta);
    sig.tList.push_back(t);
    if (j == 1) {
      priors.push_back(cj);
      continue;
    }
    if (const auto theta = angular_bucket(priors, cj, delta, t)) {
      sig.J.push_back(static_cast<int>(j + 1));
      sig.thetaList.push_back(*theta);
      priors.push_back(cj);
    }
  }
  return sig;
}

bool tuple_in_bucket(const SphereFamily& family, std::span<const std::size_t> tuple, const BucketSignature& sig) {
  const std::size_t m = tuple.size();
  if (sig.m != static_cast<int>(m) || sig.tList.size() + 1 != m || sig.J.size() != sig.thetaList.size()) return false;
  const double delta = family.delta;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (!(centre_distance(family.spheres[tuple[a]], family.spheres[tuple[b]]) >= 2.0 * delta)) return false;

  const Sphere& c1 = family.spheres[tuple[0]];
  for (std::size_t j = 2; j <= m; ++j) {
    const double t = sig.tList[j - 2];
    const double d = centre_distance(c1, family.spheres[tuple[j - 1]]);
    if (!(d > t / 2.0 && d <= t)) return false;
  }

  // sigma enumerates {1, 2} ∪ J increasingly; the priors of index j are the
  // sigma values not exceeding j - 1.
  std::vector<int> sigma{1, 2};
  sigma.insert(sigma.end(), sig.J.begin(), sig.J.end());
  for (std::size_t k = 0; k + 1 < sigma.size(); ++k)
    if (sigma[k] >= sigma[k + 1]) return false;
  for (int j = 3; j <= static_cast<int>(m); ++j) {
    std::vector<Sphere> priors;
    for (int s : sigma)
      if (s <= j - 1) priors.push_back(family.spheres[tuple[static_cast<std::size_t>(s - 1)]]);
    const double t = sig.tList[static_cast<std::size_t>(j - 2)];
    const double v = angular_projection(priors, family.spheres[tuple[static_cast<std::size_t>(j - 1)]]);
    const auto inJ = std::find(sig.J.begin(), sig.J.end(), j);
    if (inJ == sig.J.end()) {
      if (!(v <= 2.0 * delta / t)) return false;
    } else {
      const double theta = sig.thetaList[static_cast<std::size_t>(inJ - sig.J.begin())];
      if (!(v > 2.0 * delta / t && v > theta / 2.0 && v <= theta)) return false;
    }
  }
  return true;
}

std::vector<BucketSignature> enumerate_signatures(int m, double delta) {
  if (m < 1) throw std::invalid_argument("enumerate_signatures: m must be positive");
  std::vector<double> tValues;
  for (double t = dyadic_ceiling(2.0 * delta); t <= 1.0; t *= 2.0) tValues.push_back(t);

  std::vector<BucketSignature> out;
  BucketSignature cur;
  cur.m = m;
  // Depth-first over j = 2..m choosing t_j, then membership of j in J and theta_j.
  auto recurse = [&](auto&& self, int j) -> void {
    if (j > m) {
      out.push_back(cur);
      return;
    }
    for (double t : tValues) {
      cur.tList.push_back(t);
      if (j <= 2) {
        self(self, j + 1);
      } else {
        self(self, j + 1);
        double thetaMin = dyadic_ceiling(2.0 * delta / t);
        if (thetaMin == 2.0 * delta / t) thetaMin *= 2.0;
        for (double theta = thetaMin; theta <= 1.0; theta *= 2.0) {
          cur.J.push_back(j);
          cur.thetaList.push_back(theta);
          self(self, j + 1);
          cur.J.pop_back();
          cur.thetaList.pop_back();
        }
      }
      cur.tList.pop_back();
    }
  };
  recurse(recurse, 2);
  std::sort(out.begin(), out.end());
  return out;
}

BucketReport bucket_audit(const SphereFamily& family, int m, bool verify) {
  if (m < 1) throw std::invalid_argument("bucket_audit: m must be positive");
  BucketReport report;
  report.m = m;
  const std::size_t n = family.size();
  if (n == 0) return report;
  const std::vector<BucketSignature> all = verify ? enumerate_signatures(m, family.delta) : std::vector<BucketSignature>{};

  std::vector<BucketReport> partial(n);
  parallel_for(n, [&](std::size_t first) {
    BucketReport& r = partial[first];
    std::vector<std::size_t> tuple(static_cast<std::size_t>(m), 0);
    tuple[0] = first;
    std::size_t rest = 1;
    for (int k = 1; k < m; ++k) rest *= n;
    for (std::size_t code = 0; code < rest; ++code) {
      std::size_t c = code;
      for (std::size_t k = static_cast<std::size_t>(m) - 1; k >= 1; --k) {
        tuple[k] = c % n;
        c /= n;
      }
      ++r.totalTuples;
      const auto sig = classify_tuple(family, tuple);
      if (sig) {
        ++r.classified;
        ++r.buckets[*sig];
      } else {
        ++r.coincident;
        std::vector<std::size_t> support(tuple);
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        ++r.coincidentSupports[support];
      }
      if (verify) {
        std::size_t matches = 0;
        bool matchedOwn = false;
        for (const BucketSignature& s : all)
          if (tuple_in_bucket(family, tuple, s)) {
            ++matches;
            matchedOwn = matchedOwn || (sig && s == *sig);
          }
        const bool ok = sig ? (matches == 1 && matchedOwn) : matches == 0;
        if (!ok) r.partitionOk = false;
        ++r.verifiedTuples;
      }
    }
  });

  for (const BucketReport& r : partial) {
    report.totalTuples += r.totalTuples;
    report.classified += r.classified;
    report.coincident += r.coincident;
    report.verifiedTuples += r.verifiedTuples;
    report.partitionOk = report.partitionOk && r.partitionOk;
    for (const auto& [k, v] : r.buckets) report.buckets[k] += v;
    for (const auto& [k, v] : r.coincidentSupports) report.coincidentSupports[k] += v;
  }
  return report;
}

std::map<std::pair<double, double>, std::uint64_t> cardinality_scan(const SphereFamily& family,
                                                                   std::span<const std::size_t> priors) {
  if (priors.empty()) throw std::invalid_argument("cardinality_scan: no priors");
  std::vector<Sphere> prior;
  for (std::size_t i : priors) prior.push_back(family.spheres.at(i));
  std::map<std::pair<double, double>, std::uint64_t> counts;
  const Sphere& c1 = prior[0];
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (std::find(priors.begin(), priors.end(), k) != priors.end()) continue;
    const Sphere& ck = family.spheres[k];
    const double d = centre_distance(c1, ck);
    if (d == 0.0) continue;
    const double t = dyadic_ceiling(d);
    const auto theta = angular_bucket(prior, ck, family.delta, t);
    ++counts[{t, theta.value_or(0.0)}];
  }
  return counts;
}

CardinalityReport cardinality_audit(const SphereFamily& family, std::span<const std::size_t> priors, double t,
                                    double theta) {
  if (priors.empty()) throw std::invalid_argument("cardinality_audit: no priors");
  if (!(t > 0.0) || !(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("cardinality_audit: invalid cell");
  const auto counts = cardinality_scan(family, priors);
  CardinalityReport rep;
  rep.j = priors.size() + 1;
  rep.t = t;
  rep.theta = theta;
  if (auto it = counts.find({t, theta}); it != counts.end()) rep.count = it->second;
  if (auto it = counts.find({t, 0.0}); it != counts.end()) rep.degenerateCount = it->second;

  const Sphere& c1 = family.spheres.at(priors[0]);
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (k == priors[0]) continue;
    const double d = centre_distance(c1, family.spheres[k]);
    if (d > t / 2.0 && d <= t) ++rep.distanceCount;
  }

  const double n = static_cast<double>(family.n);
  const double j = static_cast<double>(rep.j);
  const double scale = t / family.delta;
  rep.ratio = static_cast<double>(rep.count) / (std::pow(theta, n - j + 1.0) * std::pow(scale, n - 1.0));
  rep.distanceRatio = static_cast<double>(rep.distanceCount) / std::pow(scale, n - 1.0);
  rep.degenerateRatio =
      static_cast<double>(rep.degenerateCount) / std::pow(scale, static_cast<double>(priors.size()) - 1.0);
  return rep;
}

}  // namespace sphmax
