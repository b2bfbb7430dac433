#include "sphmax/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sphmax/fit.hpp"
#include "sphmax/parallel.hpp"

namespace sphmax {

// ---------------------------------------------------------------------------
// Fields

VoxelGrid::VoxelGrid(Vec origin, double spacing, std::vector<std::size_t> extents, std::vector<double> values)
    : origin_{std::move(origin)}, spacing_{spacing}, extents_{std::move(extents)}, values_{std::move(values)} {
  if (!(spacing_ > 0.0)) throw std::invalid_argument("VoxelGrid: spacing must be positive");
  if (extents_.empty() || origin_.size() != extents_.size())
    throw std::invalid_argument("VoxelGrid: origin and extents disagree");
  std::size_t total = 1;
  for (std::size_t e : extents_) total *= e;
  if (values_.size() != total) throw std::invalid_argument("VoxelGrid: value count does not match extents");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("VoxelGrid: values must be finite and >= 0");
}

double VoxelGrid::value_at(const Vec& y) const {
  std::size_t index = 0;
  for (std::size_t a = 0; a < extents_.size(); ++a) {
    const double u = std::floor((y[a] - origin_[a]) / spacing_);
    if (u < 0.0 || u >= static_cast<double>(extents_[a])) return 0.0;
    index = index * extents_[a] + static_cast<std::size_t>(u);
  }
  return values_[index];
}

Box VoxelGrid::box() const {
  Box b{origin_, origin_};
  for (std::size_t a = 0; a < extents_.size(); ++a) b.hi[a] += spacing_ * static_cast<double>(extents_[a]);
  return b;
}

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_voxel_grid(std::ostream& out, const VoxelGrid& grid) {
  const std::size_t d = grid.dim();
  out << d << '\n';
  for (std::size_t a = 0; a < d; ++a) out << exact(grid.origin()[a]) << (a + 1 < d ? ' ' : '\n');
  out << exact(grid.spacing()) << '\n';
  for (std::size_t a = 0; a < d; ++a) out << grid.extents()[a] << (a + 1 < d ? ' ' : '\n');
  const std::size_t row = grid.extents().back();
  const auto& v = grid.values();
  for (std::size_t i = 0; i < v.size(); ++i) out << exact(v[i]) << ((i + 1) % row == 0 ? '\n' : ' ');
  if (!out) throw std::runtime_error("write_voxel_grid: stream failure");
}

VoxelGrid read_voxel_grid(std::istream& in) {
  std::size_t d = 0;
  if (!(in >> d) || d == 0 || d > kMaxDim) throw std::runtime_error("read_voxel_grid: malformed dimension");
  Vec origin(d);
  for (std::size_t a = 0; a < d; ++a)
    if (!(in >> origin[a])) throw std::runtime_error("read_voxel_grid: malformed origin");
  double h = 0.0;
  if (!(in >> h)) throw std::runtime_error("read_voxel_grid: malformed spacing");
  std::vector<std::size_t> extents(d);
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) {
    if (!(in >> extents[a])) throw std::runtime_error("read_voxel_grid: malformed extents");
    total *= extents[a];
  }
  std::vector<double> values(total);
  for (double& v : values)
    if (!(in >> v)) throw std::runtime_error("read_voxel_grid: truncated values");
  return VoxelGrid(origin, h, std::move(extents), std::move(values));
}

double term_value(const FieldTerm& term, const Vec& y) {
  struct Visitor {
    const Vec& y;
    double operator()(const IndicatorBall& b) const { return distance(y, b.centre) < b.radius ? 1.0 : 0.0; }
    double operator()(const IndicatorAnnulus& a) const {
      return std::abs(distance(y, a.sphere.centre) - a.sphere.radius) < a.delta ? 1.0 : 0.0;
    }
    double operator()(const Constant& c) const { return std::abs(c.value); }
    double operator()(const IndicatorHalfSpace& h) const { return dot(h.normal, y) > h.offset ? 1.0 : 0.0; }
    double operator()(const VoxelGrid& g) const { return g.value_at(y); }
  };
  return std::visit(Visitor{y}, term);
}

std::optional<Box> term_support(const FieldTerm& term) {
  struct Visitor {
    std::optional<Box> operator()(const IndicatorBall& b) const {
      Box box{b.centre, b.centre};
      for (std::size_t i = 0; i < b.centre.size(); ++i) {
        box.lo[i] -= b.radius;
        box.hi[i] += b.radius;
      }
      return box;
    }
    std::optional<Box> operator()(const IndicatorAnnulus& a) const {
      return bounding_box(Region::annulus(a.sphere, a.delta));
    }
    std::optional<Box> operator()(const Constant&) const { return std::nullopt; }
    std::optional<Box> operator()(const IndicatorHalfSpace&) const { return std::nullopt; }
    std::optional<Box> operator()(const VoxelGrid& g) const { return g.box(); }
  };
  return std::visit(Visitor{}, term);
}

double ScalarField::operator()(const Vec& y) const {
  double s = 0.0;
  for (const FieldTerm& t : terms_) s += term_value(t, y);
  return s;
}

ScalarField operator+(ScalarField a, const ScalarField& b) {
  a.terms_.insert(a.terms_.end(), b.terms_.begin(), b.terms_.end());
  return a;
}

// ---------------------------------------------------------------------------
// Averages

Vec sample_in_region(const Region& region, Rng& rng) {
  const std::size_t n = region.dim();
  if (region.kind == RegionKind::PolarCap) {
    const Box box = bounding_box(region);
    Vec y(n);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) y[i] = rng.uniform(box.lo[i], box.hi[i]);
      if (region.contains(y)) return y;
    }
  }
  const double nd = static_cast<double>(n);
  const double r = region.sphere.radius;
  const double inner = std::pow(std::max(0.0, r - region.delta), nd);
  const double outer = std::pow(r + region.delta, nd);
  Vec u(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) u[i] = rng.normal();
    const double len = norm(u);
    if (len < 1e-12) continue;
    const double rho = std::pow(inner + (outer - inner) * rng.uniform(), 1.0 / nd);
    const Vec y = region.sphere.centre + u * (rho / len);
    if (region.contains(y)) return y;
  }
}

namespace {

// Exact disjointness of a ball or annulus term from the region's annulus.
bool term_misses_region(const FieldTerm& term, const Region& region) {
  const double r = region.sphere.radius;
  const double dl = region.delta;
  if (const auto* b = std::get_if<IndicatorBall>(&term)) {
    const double d = distance(b->centre, region.sphere.centre);
    return std::abs(d - r) >= dl + b->radius;
  }
  if (const auto* a = std::get_if<IndicatorAnnulus>(&term)) {
    const double d = distance(a->sphere.centre, region.sphere.centre);
    const double ro = r + dl, ri = r - dl;
    const double so = a->sphere.radius + a->delta, si = a->sphere.radius - a->delta;
    return d >= ro + so || d + so <= ri || d + ro <= si;
  }
  return false;
}

}  // namespace

AverageEstimate region_average(const ScalarField& f, const Region& region, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("region_average: samples must be positive");
  const double regionVolume = region_volume(region);
  if (!(regionVolume > 0.0)) throw std::invalid_argument("region_average: zero-measure region");
  const Box regionBox = bounding_box(region);
  const double count = static_cast<double>(samples);

  AverageEstimate est;
  double variance = 0.0;
  for (std::size_t k = 0; k < f.terms().size(); ++k) {
    const FieldTerm& term = f.terms()[k];
    if (const auto* c = std::get_if<Constant>(&term)) {
      est.value += std::abs(c->value);
      continue;
    }
    if (term_misses_region(term, region)) continue;
    Rng rng(substream_seed(seed, {k}));
    double sum = 0.0, sum2 = 0.0, scale = 1.0;
    const std::optional<Box> support = term_support(term);
    const Box domain = support ? Box::intersect(*support, regionBox) : regionBox;
    if (support && domain.empty()) continue;
    if (support && domain.volume() < regionVolume) {
      // Support route: |D| / |R| * mean over D of g 1_R.
      scale = domain.volume() / regionVolume;
      Vec y(region.dim());
      for (std::uint64_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = rng.uniform(domain.lo[i], domain.hi[i]);
        const double v = region.contains(y) ? term_value(term, y) : 0.0;
        sum += v;
        sum2 += v * v;
      }
    } else {
      for (std::uint64_t s = 0; s < samples; ++s) {
        const double v = term_value(term, sample_in_region(region, rng));
        sum += v;
        sum2 += v * v;
      }
    }
    const double mean = sum / count;
    const double var = std::max(0.0, sum2 / count - mean * mean);
    est.value += scale * mean;
    variance += scale * scale * var / count;
  }
  est.stdError = std::sqrt(variance);
  return est;
}

// ---------------------------------------------------------------------------
// Maximal operator

double MaxProbeConfig::exponent() const { return p > 0.0 ? p : critical_exponent(n); }
double MaxProbeConfig::step() const { return radiusStep > 0.0 ? radiusStep : delta / 2.0; }

void MaxProbeConfig::validate() const {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("MaxProbeConfig: dimension out of range");
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("MaxProbeConfig: delta must lie in (0, 1/2)");
  if (!(exponent() >= 1.0)) throw std::invalid_argument("MaxProbeConfig: p must be >= 1");
  if (step() > delta / 2.0) throw std::invalid_argument("MaxProbeConfig: radius step exceeds delta/2");
  if (!(rMin > delta && rMax >= rMin)) throw std::invalid_argument("MaxProbeConfig: invalid radius range");
  if (samples == 0) throw std::invalid_argument("MaxProbeConfig: samples must be positive");
}

std::vector<double> radius_grid(const MaxProbeConfig& cfg) {
  cfg.validate();
  const double h = cfg.step();
  const auto steps = static_cast<std::size_t>(std::floor((cfg.rMax - cfg.rMin) / h + 1e-9));
  std::vector<double> radii;
  for (std::size_t k = 0; k <= steps; ++k) radii.push_back(cfg.rMin + h * static_cast<double>(k));
  if (cfg.rMax - radii.back() > 1e-12) radii.push_back(cfg.rMax);
  return radii;
}

MaxValue eval_max(const ScalarField& f, const Vec& x, const MaxProbeConfig& cfg, RegionKind variant,
                  std::uint64_t pointIndex) {
  if (x.size() != cfg.n) throw std::invalid_argument("eval_max: point dimension mismatch");
  const std::vector<double> radii = radius_grid(cfg);
  MaxValue best;
  best.radius = radii.front();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const Region region(Sphere(x, radii[k]), cfg.delta, variant);
    const AverageEstimate a = region_average(f, region, cfg.samples, substream_seed(cfg.seed, {pointIndex, k}));
    if (a.value > best.value) best = {a.value, a.stdError, radii[k]};
  }
  return best;
}

double lp_norm(std::span<const double> values, double h, std::size_t d, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (!(h > 0.0)) throw std::invalid_argument("lp_norm: spacing must be positive");
  const double cell = std::pow(h, static_cast<double>(d));
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), p) * cell;
  return std::pow(s, 1.0 / p);
}

namespace {

NormEstimate grid_max_norm(const ScalarField& f, const MaxProbeConfig& cfg, RegionKind variant, std::size_t gridDim,
                           const Vec& shift) {
  cfg.validate();
  const std::size_t n = cfg.n;
  const double side = cube_side(n);
  const auto perAxis = static_cast<std::size_t>(std::ceil(side / cfg.delta - 1e-9));
  const double h = side / static_cast<double>(perAxis);
  std::size_t total = 1;
  for (std::size_t a = 0; a < gridDim; ++a) total *= perAxis;

  std::vector<MaxValue> values(total);
  parallel_for(total, [&](std::size_t idx) {
    Vec x(n);
    std::size_t c = idx;
    for (std::size_t a = 0; a < gridDim; ++a) {
      x[a] = -side / 2.0 + (static_cast<double>(c % perAxis) + 0.5) * h;
      c /= perAxis;
    }
    if (!shift.empty()) x += shift;
    values[idx] = eval_max(f, x, cfg, variant, idx);
  });

  const double p = cfg.exponent();
  std::vector<double> v(total);
  for (std::size_t i = 0; i < total; ++i) v[i] = values[i].value;
  NormEstimate est;
  est.value = lp_norm(v, h, gridDim, p);
  est.points = total;
  est.spacing = h;
  if (est.value > 0.0) {
    // d N / d v_i = N^(1-p) v_i^(p-1) h^d.
    const double cell = std::pow(h, static_cast<double>(gridDim));
    double var = 0.0;
    for (const MaxValue& m : values) {
      const double g = std::pow(est.value, 1.0 - p) * std::pow(m.value, p - 1.0) * cell;
      var += g * g * m.stdError * m.stdError;
    }
    est.stdError = std::sqrt(var);
  }
  return est;
}

}  // namespace

NormEstimate sliced_max_norm(const ScalarField& f, const MaxProbeConfig& cfg, RegionKind variant, const Vec& shift) {
  if (!shift.empty() && shift.size() != cfg.n) throw std::invalid_argument("sliced_max_norm: shift dimension mismatch");
  return grid_max_norm(f, cfg, variant, cfg.n - 1, shift);
}

NormEstimate full_max_norm(const ScalarField& f, const MaxProbeConfig& cfg, RegionKind variant) {
  return grid_max_norm(f, cfg, variant, cfg.n, {});
}

// ---------------------------------------------------------------------------
// Multiplicity

namespace {

constexpr std::uint64_t kChunk = 1u << 15;

std::vector<Region> cap_regions(const SphereFamily& family) {
  std::vector<Region> caps;
  caps.reserve(family.size());
  for (const Sphere& s : family.spheres) caps.push_back(Region::polar_cap(s, family.delta));
  return caps;
}

// Uniform bins over a box; each bin lists the regions whose bounding box meets it.
struct BinIndex {
  Box box;
  std::size_t perAxis = 1;
  std::vector<std::vector<std::uint32_t>> bins;

  BinIndex(const Box& b, const std::vector<Box>& boxes) : box{b} {
    const std::size_t d = b.dim();
    perAxis = d >= 3 ? 24 : 64;
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= perAxis;
    bins.resize(total);
    for (std::uint32_t r = 0; r < boxes.size(); ++r) {
      std::vector<std::size_t> lo(d), hi(d);
      for (std::size_t a = 0; a < d; ++a) {
        lo[a] = cell(a, boxes[r].lo[a]);
        hi[a] = cell(a, boxes[r].hi[a]);
      }
      std::vector<std::size_t> cur(lo);
      for (bool more = true; more;) {
        std::size_t idx = 0;
        for (std::size_t a = 0; a < d; ++a) idx = idx * perAxis + cur[a];
        bins[idx].push_back(r);
        more = false;
        for (std::size_t a = d; a-- > 0;) {
          if (cur[a] < hi[a]) {
            ++cur[a];
            more = true;
            break;
          }
          cur[a] = lo[a];
        }
      }
    }
  }

  std::size_t cell(std::size_t a, double v) const {
    const double w = box.hi[a] - box.lo[a];
    const double u = w > 0.0 ? (v - box.lo[a]) / w * static_cast<double>(perAxis) : 0.0;
    return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(perAxis - 1)));
  }

  const std::vector<std::uint32_t>& at(const Vec& y) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < box.dim(); ++a) idx = idx * perAxis + cell(a, y[a]);
    return bins[idx];
  }
};

}  // namespace

MultiplicityEstimate multiplicity_functional(const SphereFamily& family, std::uint64_t samples, std::uint64_t seed) {
  if (family.empty()) throw std::invalid_argument("multiplicity_functional: empty family");
  if (samples == 0) throw std::invalid_argument("multiplicity_functional: samples must be positive");
  const std::vector<Region> caps = cap_regions(family);
  std::vector<Box> boxes;
  for (const Region& c : caps) boxes.push_back(bounding_box(c));
  Box box = boxes.front();
  for (const Box& b : boxes)
    for (std::size_t a = 0; a < box.dim(); ++a) {
      box.lo[a] = std::min(box.lo[a], b.lo[a]);
      box.hi[a] = std::max(box.hi[a], b.hi[a]);
    }
  const BinIndex index(box, boxes);
  const std::size_t n = family.n;

  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> sums(chunks, 0);
  std::vector<double> squares(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(substream_seed(seed, {c}));
    const std::uint64_t count = std::min(kChunk, samples - c * kChunk);
    Vec y(n);
    std::uint64_t s = 0;
    double s2 = 0.0;
    for (std::uint64_t k = 0; k < count; ++k) {
      for (std::size_t i = 0; i < n; ++i) y[i] = rng.uniform(box.lo[i], box.hi[i]);
      std::uint64_t mult = 0;
      for (std::uint32_t r : index.at(y)) mult += caps[r].contains(y) ? 1 : 0;
      std::uint64_t power = 1;
      for (std::size_t i = 0; i < n; ++i) power *= mult;
      s += power;
      s2 += static_cast<double>(power) * static_cast<double>(power);
    }
    sums[c] = s;
    squares[c] = s2;
  });

  std::uint64_t total = 0;
  double total2 = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    total += sums[c];
    total2 += squares[c];
  }
  const double vol = box.volume();
  const double count = static_cast<double>(samples);
  const double mean = static_cast<double>(total) / count;
  const double var = std::max(0.0, total2 / count - mean * mean);
  MultiplicityEstimate est;
  est.value = vol * mean;
  est.stdError = vol * std::sqrt(var / count);
  est.samples = samples;
  est.domainVolume = vol;
  return est;
}

MultiplicityEstimate multiplicity_tuple_sum(const SphereFamily& family, std::uint64_t samplesPerTuple,
                                            std::uint64_t seed) {
  if (family.empty()) throw std::invalid_argument("multiplicity_tuple_sum: empty family");
  const std::vector<Region> caps = cap_regions(family);
  const std::size_t n = family.n;
  const std::size_t N = family.size();

  // Nondecreasing index sequences of length n.
  std::vector<std::vector<std::size_t>> multisets;
  std::vector<std::size_t> cur(n, 0);
  for (;;) {
    multisets.push_back(cur);
    std::size_t a = n;
    while (a > 0 && cur[a - 1] == N - 1) --a;
    if (a == 0) break;
    ++cur[a - 1];
    for (std::size_t b = a; b < n; ++b) cur[b] = cur[a - 1];
  }

  std::vector<double> value(multisets.size()), var(multisets.size());
  parallel_for(multisets.size(), [&](std::size_t k) {
    const auto& ms = multisets[k];
    double weight = 1.0;
    for (std::size_t i = 2; i <= n; ++i) weight *= static_cast<double>(i);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && ms[j] == ms[i]) ++j;
      for (std::size_t f = 2; f <= j - i; ++f) weight /= static_cast<double>(f);
      i = j;
    }
    std::vector<Region> regions;
    for (std::size_t i : ms) regions.push_back(caps[i]);
    const VolumeEstimate e = mc_volume(regions, samplesPerTuple, substream_seed(seed, {k}));
    value[k] = weight * e.value;
    var[k] = weight * weight * e.stdError * e.stdError;
  });

  MultiplicityEstimate est;
  double v2 = 0.0;
  for (std::size_t k = 0; k < multisets.size(); ++k) {
    est.value += value[k];
    v2 += var[k];
  }
  est.stdError = std::sqrt(v2);
  est.samples = samplesPerTuple * multisets.size();
  return est;
}

// ---------------------------------------------------------------------------
// Focusing

double focusing_ratio(const MaxProbeConfig& cfg, std::size_t radialPoints) {
  cfg.validate();
  if (radialPoints == 0) throw std::invalid_argument("focusing_ratio: radialPoints must be positive");
  const std::size_t n = cfg.n;
  const double nd = static_cast<double>(n);
  const double p = cfg.exponent();
  const ScalarField f{IndicatorBall{Vec(n), cfg.delta}};
  const double sphereArea = nd * unit_ball_volume(n);

  std::vector<double> m(radialPoints);
  parallel_for(radialPoints, [&](std::size_t i) {
    const double s = 1.0 + (static_cast<double>(i) + 0.5) / static_cast<double>(radialPoints);
    m[i] = eval_max(f, unit_axis(n, 0) * s, cfg, RegionKind::Annulus, i).value;
  });
  double integral = 0.0;
  for (std::size_t i = 0; i < radialPoints; ++i) {
    const double s = 1.0 + (static_cast<double>(i) + 0.5) / static_cast<double>(radialPoints);
    integral += sphereArea * std::pow(s, nd - 1.0) * std::pow(m[i], p) / static_cast<double>(radialPoints);
  }
  const double fNorm = std::pow(unit_ball_volume(n) * std::pow(cfg.delta, nd), 1.0 / p);
  return std::pow(integral, 1.0 / p) / fNorm;
}

FocusingResult focusing_probe(std::size_t n, double p, std::span<const double> deltas, std::uint64_t samples,
                              std::uint64_t seed, std::size_t radialPoints) {
  FocusingResult res;
  res.n = n;
  res.p = p;
  res.predictedSlope = static_cast<double>(n) / p - (static_cast<double>(n) - 1.0);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    MaxProbeConfig cfg;
    cfg.n = n;
    cfg.delta = deltas[k];
    cfg.p = p;
    cfg.samples = samples;
    cfg.seed = substream_seed(seed, {k});
    const double ratio = focusing_ratio(cfg, radialPoints);
    res.deltas.push_back(deltas[k]);
    res.ratios.push_back(ratio);
    pts.emplace_back(deltas[k], ratio);
  }
  const FitResult fit = fit_exponent(pts);
  res.slope = -fit.slope;
  res.slopeStdError = fit.stdError;
  return res;
}

}  // namespace sphmax
