#include "sphmax/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "linalg.hpp"
#include "sphmax/parallel.hpp"
#include "sphmax/rng.hpp"

namespace sphmax {

namespace {

constexpr std::uint64_t kChunk = 1u << 15;
constexpr std::size_t kMaxCandidateSlabs = 12;

struct Interval {
  double lo;
  double hi;
};

// Open membership intervals of a region along the vertical line above u
// (u holds the first n-1 coordinates).
void column_intervals(const Region& region, const double* u, std::vector<Interval>& out) {
  out.clear();
  const Sphere& s = region.sphere;
  const std::size_t n = s.dim();
  double rho2 = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = u[i] - s.centre[i];
    rho2 += d * d;
  }
  const double outer = s.radius + region.delta;
  const double b2 = outer * outer - rho2;
  if (b2 <= 0.0) return;
  const double b = std::sqrt(b2);
  const double z0 = s.centre[n - 1];
  const double inner = s.radius - region.delta;
  const double a2 = inner > 0.0 ? inner * inner - rho2 : -1.0;
  if (a2 > 0.0) {
    const double a = std::sqrt(a2);
    out.push_back({z0 - b, z0 - a});
    out.push_back({z0 + a, z0 + b});
  } else {
    out.push_back({z0 - b, z0 + b});
  }
  if (region.kind == RegionKind::PolarCap) {
    const double floor = z0 + polar_height_fraction(n) * s.radius;
    std::erase_if(out, [&](Interval& iv) {
      iv.lo = std::max(iv.lo, floor);
      return iv.lo >= iv.hi;
    });
  }
}

void intersect_into(const std::vector<Interval>& a, const std::vector<Interval>& b, std::vector<Interval>& out) {
  out.clear();
  for (const Interval& x : a)
    for (const Interval& y : b) {
      const double lo = std::max(x.lo, y.lo);
      const double hi = std::min(x.hi, y.hi);
      if (lo < hi) out.push_back({lo, hi});
    }
}

// Number of lattice points z0 + (k + 1/2) h, 0 <= k < count, strictly inside (lo, hi).
std::int64_t lattice_points(double lo, double hi, double z0, double h, std::int64_t count) {
  std::int64_t kmin = static_cast<std::int64_t>(std::floor((lo - z0) / h - 0.5)) + 1;
  std::int64_t kmax = static_cast<std::int64_t>(std::ceil((hi - z0) / h - 0.5)) - 1;
  kmin = std::max<std::int64_t>(kmin, 0);
  kmax = std::min<std::int64_t>(kmax, count - 1);
  return kmax >= kmin ? kmax - kmin + 1 : 0;
}

struct GridLayout {
  Box box;
  double h = 0.0;
  std::size_t n = 0;
  std::vector<std::int64_t> counts;
  std::int64_t columns = 1;
};

GridLayout make_layout(std::span<const Region> regions, double h) {
  if (regions.empty()) throw std::invalid_argument("grid_volume: no regions");
  if (!(h > 0.0)) throw std::invalid_argument("grid_volume: resolution must be positive");
  for (const Region& r : regions)
    if (h > r.delta / 4.0) throw std::invalid_argument("grid_volume: resolution too coarse (h > delta/4)");
  GridLayout g;
  g.box = bounding_box(regions);
  g.h = h;
  g.n = g.box.dim();
  if (g.n < 2) throw std::invalid_argument("grid_volume: dimension must be at least 2");
  g.counts.assign(g.n, 0);
  if (g.box.empty()) {
    g.columns = 0;
    return g;
  }
  for (std::size_t i = 0; i < g.n; ++i) {
    g.counts[i] = static_cast<std::int64_t>(std::ceil((g.box.hi[i] - g.box.lo[i]) / h));
    if (i + 1 < g.n) g.columns *= g.counts[i];
  }
  return g;
}

// Calls visit(slice, u) for every column centre u, with slices (first-axis
// index) processed in parallel.
template <typename Visit>
void for_each_column(const GridLayout& g, std::size_t slice, Visit&& visit) {
  const std::size_t hn = g.n - 1;
  std::vector<std::int64_t> idx(hn, 0);
  idx[0] = static_cast<std::int64_t>(slice);
  double u[kMaxDim];
  while (true) {
    for (std::size_t i = 0; i < hn; ++i) u[i] = g.box.lo[i] + (static_cast<double>(idx[i]) + 0.5) * g.h;
    visit(static_cast<const double*>(u));
    std::size_t axis = hn;
    while (axis > 1) {
      --axis;
      if (++idx[axis] < g.counts[axis]) break;
      idx[axis] = 0;
      if (axis == 1) return;
    }
    if (hn == 1) return;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Box

bool Box::empty() const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) return true;
  return lo.empty();
}

double Box::volume() const {
  if (empty()) return 0.0;
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Box::contains(const Vec& y) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (y[i] < lo[i] || y[i] > hi[i]) return false;
  return true;
}

double Box::support_radius(const Vec& u) const {
  double s = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) s += std::abs(u[i]) * 0.5 * (hi[i] - lo[i]);
  return s;
}

Box Box::intersect(const Box& a, const Box& b) {
  Box out{a.lo, a.hi};
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out.lo[i] = std::max(a.lo[i], b.lo[i]);
    out.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  return out;
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  Box b{Vec(dim), Vec(dim)};
  for (std::size_t i = 0; i < dim; ++i) {
    b.lo[i] = lo;
    b.hi[i] = hi;
  }
  return b;
}

Box bounding_box(const Region& region) {
  const Sphere& s = region.sphere;
  const std::size_t n = s.dim();
  const double outer = s.radius + region.delta;
  Box b{s.centre, s.centre};
  if (region.kind == RegionKind::Annulus) {
    for (std::size_t i = 0; i < n; ++i) {
      b.lo[i] -= outer;
      b.hi[i] += outer;
    }
    return b;
  }
  const double floor = polar_height_fraction(n) * s.radius;
  const double half = std::sqrt(std::max(0.0, outer * outer - floor * floor));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    b.lo[i] -= half;
    b.hi[i] += half;
  }
  b.lo[n - 1] += floor;
  b.hi[n - 1] += outer;
  return b;
}

Box bounding_box(std::span<const Region> regions) {
  if (regions.empty()) throw std::invalid_argument("bounding_box: no regions");
  Box b = bounding_box(regions[0]);
  for (std::size_t i = 1; i < regions.size(); ++i) b = Box::intersect(b, bounding_box(regions[i]));
  return b;
}

// ---------------------------------------------------------------------------
// SamplingDomain

namespace {

struct Candidate {
  double volume = std::numeric_limits<double>::infinity();
  bool empty = false;
  std::size_t slabRows = 0;
  std::vector<Vec> rows;
  std::vector<double> lo;
  std::vector<double> width;
};

Candidate evaluate_subset(const Box& box, std::span<const Slab> slabs, unsigned mask) {
  const std::size_t n = box.dim();
  const Vec c = box.centre();
  Candidate cand;
  std::vector<Vec> ortho;
  std::vector<Vec> normals;
  for (std::size_t j = 0; j < slabs.size(); ++j) {
    if (!(mask & (1u << j))) continue;
    const Slab& s = slabs[j];
    normals.push_back(s.normal);
    Vec r = s.normal;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : ortho) r -= q * dot(q, r);
    const double len = norm(r);
    if (len < 1e-6) return cand;  // numerically dependent: reject subset
    ortho.push_back(r * (1.0 / len));
    const double cn = dot(s.normal, c);
    const double sr = box.support_radius(s.normal);
    const double lo = std::max(s.offset - s.halfThickness, cn - sr);
    const double hi = std::min(s.offset + s.halfThickness, cn + sr);
    cand.rows.push_back(s.normal);
    cand.lo.push_back(lo);
    cand.width.push_back(hi - lo);
  }
  cand.slabRows = normals.size();
  const double wedge = wedge_norm_projection(normals);
  for (std::size_t axis = 0; axis < n && ortho.size() < n; ++axis) {
    Vec r = unit_axis(n, axis);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : ortho) r -= q * dot(q, r);
    const double len = norm(r);
    if (len < 1e-8) continue;
    const Vec b = r * (1.0 / len);
    ortho.push_back(b);
    const double cb = dot(b, c);
    const double sr = box.support_radius(b);
    cand.rows.push_back(b);
    cand.lo.push_back(cb - sr);
    cand.width.push_back(2.0 * sr);
  }
  double vol = normals.empty() ? 1.0 : 1.0 / wedge;
  for (double w : cand.width) {
    if (w <= 0.0) {
      cand.empty = true;
      cand.volume = 0.0;
      return cand;
    }
    vol *= w;
  }
  cand.volume = vol;
  return cand;
}

}  // namespace

SamplingDomain::SamplingDomain(const Box& box, std::span<const Slab> slabs) : dim_{box.dim()} {
  if (box.empty()) {
    empty_ = true;
    return;
  }
  std::vector<Slab> pool(slabs.begin(), slabs.end());
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Slab& a, const Slab& b) { return a.halfThickness < b.halfThickness; });
  if (pool.size() > kMaxCandidateSlabs) pool.resize(kMaxCandidateSlabs);

  Candidate best = evaluate_subset(box, pool, 0u);
  const unsigned limit = 1u << pool.size();
  for (unsigned mask = 1; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > dim_) continue;
    Candidate cand = evaluate_subset(box, pool, mask);
    if (cand.empty) {
      best = std::move(cand);
      break;
    }
    if (cand.rows.size() == dim_ && cand.volume < best.volume) best = std::move(cand);
  }
  if (best.empty) {
    empty_ = true;
    return;
  }
  slabCount_ = best.slabRows;

  detail::SquareMatrix<double> a(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) a(r, c) = best.rows[r][c];
  detail::SquareMatrix<double> inv(dim_);
  if (!detail::invert(a, inv)) throw std::runtime_error("SamplingDomain: singular frame");
  inverse_ = inv.a;
  lo_ = std::move(best.lo);
  width_ = std::move(best.width);
  volume_ = best.volume;
}

Vec SamplingDomain::point(std::span<const double> unit) const {
  double s[kMaxDim];
  for (std::size_t i = 0; i < dim_; ++i) s[i] = lo_[i] + width_[i] * unit[i];
  Vec y(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    double acc = 0.0;
    const double* row = inverse_.data() + r * dim_;
    for (std::size_t c = 0; c < dim_; ++c) acc += row[c] * s[c];
    y[r] = acc;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Monte Carlo

std::vector<Slab> pairwise_slabs(std::span<const Region> regions) {
  std::vector<Slab> slabs;
  for (std::size_t i = 0; i < regions.size(); ++i)
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      if (regions[i].sphere.centre == regions[j].sphere.centre) continue;
      const double delta = std::max(regions[i].delta, regions[j].delta);
      slabs.push_back(slab_of_pair(regions[i].sphere, regions[j].sphere, delta));
    }
  return slabs;
}

VolumeEstimate mc_volume(std::span<const Region> regions, const Box& box, std::uint64_t samples, std::uint64_t seed,
                         McOptions options) {
  if (samples == 0) throw std::invalid_argument("mc_volume: samples must be positive");
  if (regions.empty()) throw std::invalid_argument("mc_volume: no regions");
  const std::vector<Slab> slabs = options.clipWithSlabs ? pairwise_slabs(regions) : std::vector<Slab>{};
  const SamplingDomain domain(box, slabs);

  VolumeEstimate est;
  est.samples = samples;
  est.method = VolumeMethod::MonteCarlo;
  if (domain.empty()) return est;

  const std::size_t n = domain.dim();
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(substream_seed(seed, {c}));
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t count = std::min(kChunk, samples - begin);
    double u[kMaxDim];
    std::uint64_t h = 0;
    for (std::uint64_t k = 0; k < count; ++k) {
      for (std::size_t i = 0; i < n; ++i) u[i] = rng.uniform();
      const Vec y = domain.point(std::span<const double>(u, n));
      bool inside = true;
      for (const Region& r : regions)
        if (!r.contains(y)) {
          inside = false;
          break;
        }
      h += inside ? 1 : 0;
    }
    hits[c] = h;
  });
  for (std::uint64_t h : hits) est.hits += h;

  const double vol = domain.volume();
  const double p = static_cast<double>(est.hits) / static_cast<double>(samples);
  est.domainVolume = vol;
  est.value = vol * p;
  est.stdError = est.hits == 0 ? vol / static_cast<double>(samples)
                               : vol * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return est;
}

VolumeEstimate mc_volume(std::span<const Region> regions, std::uint64_t samples, std::uint64_t seed,
                         McOptions options) {
  if (regions.empty()) throw std::invalid_argument("mc_volume: no regions");
  return mc_volume(regions, bounding_box(regions), samples, seed, options);
}

// ---------------------------------------------------------------------------
// Grid

VolumeEstimate grid_volume(std::span<const Region> regions, double h) {
  const GridLayout g = make_layout(regions, h);
  VolumeEstimate est;
  est.method = VolumeMethod::Grid;
  if (g.columns == 0) return est;

  const std::size_t slices = static_cast<std::size_t>(g.counts[0]);
  std::vector<std::int64_t> cells(slices, 0);
  std::vector<std::int64_t> endpoints(slices, 0);
  const double z0 = g.box.lo[g.n - 1];
  const std::int64_t nz = g.counts[g.n - 1];
  parallel_for(slices, [&](std::size_t slice) {
    std::vector<Interval> acc, tmp, cur;
    std::int64_t count = 0;
    std::int64_t ends = 0;
    for_each_column(g, slice, [&](const double* u) {
      column_intervals(regions[0], u, acc);
      for (std::size_t r = 1; r < regions.size() && !acc.empty(); ++r) {
        column_intervals(regions[r], u, cur);
        intersect_into(acc, cur, tmp);
        std::swap(acc, tmp);
      }
      for (const Interval& iv : acc) {
        count += lattice_points(iv.lo, iv.hi, z0, g.h, nz);
        ends += 2;
      }
    });
    cells[slice] = count;
    endpoints[slice] = ends;
  });

  std::int64_t total = 0;
  std::int64_t ends = 0;
  for (std::size_t s = 0; s < slices; ++s) {
    total += cells[s];
    ends += endpoints[s];
  }
  const double cell = std::pow(g.h, static_cast<double>(g.n));
  est.hits = static_cast<std::uint64_t>(total);
  est.samples = static_cast<std::uint64_t>(g.columns * nz);
  est.value = static_cast<double>(total) * cell;
  est.stdError = cell * std::sqrt(static_cast<double>(ends) / 12.0);
  est.domainVolume = static_cast<double>(est.samples) * cell;
  return est;
}

VolumeEstimate grid_volume_cellwise(std::span<const Region> regions, double h) {
  const GridLayout g = make_layout(regions, h);
  VolumeEstimate est;
  est.method = VolumeMethod::Grid;
  if (g.columns == 0) return est;

  const std::size_t slices = static_cast<std::size_t>(g.counts[0]);
  std::vector<std::int64_t> cells(slices, 0);
  const std::int64_t nz = g.counts[g.n - 1];
  parallel_for(slices, [&](std::size_t slice) {
    std::int64_t count = 0;
    for_each_column(g, slice, [&](const double* u) {
      Vec y(g.n);
      for (std::size_t i = 0; i + 1 < g.n; ++i) y[i] = u[i];
      for (std::int64_t k = 0; k < nz; ++k) {
        y[g.n - 1] = g.box.lo[g.n - 1] + (static_cast<double>(k) + 0.5) * g.h;
        bool inside = true;
        for (const Region& r : regions)
          if (!r.contains(y)) {
            inside = false;
            break;
          }
        count += inside ? 1 : 0;
      }
    });
    cells[slice] = count;
  });
  std::int64_t total = 0;
  for (std::int64_t c : cells) total += c;
  const double cell = std::pow(g.h, static_cast<double>(g.n));
  est.hits = static_cast<std::uint64_t>(total);
  est.samples = static_cast<std::uint64_t>(g.columns * nz);
  est.value = static_cast<double>(total) * cell;
  est.domainVolume = static_cast<double>(est.samples) * cell;
  return est;
}

// ---------------------------------------------------------------------------
// Parallelepipeds

double parallelepiped_volume(std::span<const Slab> slabs, const Box& box) {
  const std::size_t d = box.dim();
  if (slabs.size() > d) throw std::invalid_argument("parallelepiped_volume: more slabs than dimensions");
  std::vector<Vec> normals;
  for (const Slab& s : slabs) {
    if (s.normal.size() != d) throw std::invalid_argument("parallelepiped_volume: dimension mismatch");
    normals.push_back(s.normal);
  }
  const double wedge = wedge_norm(normals);
  if (!slabs.empty() && wedge == 0.0) throw std::invalid_argument("parallelepiped_volume: dependent normals");
  if (box.empty()) return 0.0;

  // Bounded parallelepiped strictly inside the box: change of variables.
  if (slabs.size() == d) {
    detail::SquareMatrix<double> a(d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) a(r, c) = normals[r][c];
    detail::SquareMatrix<double> inv(d);
    if (!detail::invert(a, inv)) throw std::invalid_argument("parallelepiped_volume: dependent normals");
    bool inside = true;
    for (unsigned corner = 0; corner < (1u << d) && inside; ++corner) {
      Vec v(d);
      for (std::size_t r = 0; r < d; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double sc = slabs[c].offset + ((corner >> c) & 1u ? 1.0 : -1.0) * slabs[c].halfThickness;
          acc += inv(r, c) * sc;
        }
        v[r] = acc;
      }
      inside = box.contains(v);
    }
    if (inside) {
      double prod = 1.0;
      for (const Slab& s : slabs) prod *= 2.0 * s.halfThickness;
      return prod / wedge;
    }
  }

  // Axis-aligned normals: the intersection is itself a box.
  const bool axis_aligned = std::all_of(slabs.begin(), slabs.end(), [](const Slab& s) {
    return std::count_if(s.normal.begin(), s.normal.end(), [](double x) { return x != 0.0; }) == 1;
  });
  if (axis_aligned) {
    Box clipped = box;
    for (const Slab& s : slabs) {
      const std::size_t axis = static_cast<std::size_t>(
          std::find_if(s.normal.begin(), s.normal.end(), [](double x) { return x != 0.0; }) - s.normal.begin());
      const double sign = s.normal[axis];
      const double a = (s.offset - s.halfThickness) / sign;
      const double b = (s.offset + s.halfThickness) / sign;
      clipped.lo[axis] = std::max(clipped.lo[axis], std::min(a, b));
      clipped.hi[axis] = std::min(clipped.hi[axis], std::max(a, b));
    }
    return clipped.volume();
  }

  // Column sweep along the last axis with exact column lengths.
  const std::size_t hn = d - 1;
  const double budget = 4.0e6;
  const std::int64_t per_axis =
      hn == 0 ? 1 : std::max<std::int64_t>(16, static_cast<std::int64_t>(std::pow(budget, 1.0 / static_cast<double>(hn))));
  std::vector<double> step(hn);
  std::int64_t columns = 1;
  for (std::size_t i = 0; i < hn; ++i) {
    step[i] = (box.hi[i] - box.lo[i]) / static_cast<double>(per_axis);
    columns *= per_axis;
  }
  double total = 0.0;
  std::vector<std::int64_t> idx(hn, 0);
  for (std::int64_t col = 0; col < columns; ++col) {
    std::int64_t rem = col;
    double lo = box.lo[d - 1];
    double hi = box.hi[d - 1];
    Vec u(d);
    for (std::size_t i = 0; i < hn; ++i) {
      idx[i] = rem % per_axis;
      rem /= per_axis;
      u[i] = box.lo[i] + (static_cast<double>(idx[i]) + 0.5) * step[i];
    }
    for (const Slab& s : slabs) {
      double partial = 0.0;
      for (std::size_t i = 0; i < hn; ++i) partial += s.normal[i] * u[i];
      const double nz = s.normal[d - 1];
      if (nz == 0.0) {
        if (std::abs(partial - s.offset) > s.halfThickness) hi = lo;
        continue;
      }
      const double a = (s.offset - s.halfThickness - partial) / nz;
      const double b = (s.offset + s.halfThickness - partial) / nz;
      lo = std::max(lo, std::min(a, b));
      hi = std::min(hi, std::max(a, b));
    }
    if (hi > lo) total += hi - lo;
  }
  double cell = 1.0;
  for (double s : step) cell *= s;
  return total * cell;
}

// ---------------------------------------------------------------------------
// Bounds and analytic volumes

BoundPrediction predicted_tuple_bound(int m, double delta, std::span<const double> tList,
                                      std::span<const double> thetaList) {
  if (m < 2) throw std::invalid_argument("predicted_tuple_bound: m must be at least 2");
  if (tList.size() != static_cast<std::size_t>(m - 1) || thetaList.size() != static_cast<std::size_t>(m - 2))
    throw std::invalid_argument("predicted_tuple_bound: expected m-1 distances and m-2 angles");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("predicted_tuple_bound: delta out of range");
  constexpr double slack = 1e-12;
  BoundPrediction out;
  out.m = m;
  out.delta = delta;
  out.tList.assign(tList.begin(), tList.end());
  out.thetaList.assign(thetaList.begin(), thetaList.end());
  double denom = 1.0;
  for (double t : tList) {
    if (t < delta * (1.0 - slack) || t > 1.0 + slack)
      throw std::invalid_argument("predicted_tuple_bound: t out of [delta, 1]");
    denom *= t;
  }
  for (std::size_t k = 0; k < thetaList.size(); ++k) {
    const double theta = thetaList[k];
    const double t = tList[k + 1];
    if (theta < (delta / t) * (1.0 - slack) || theta > 1.0 + slack)
      throw std::invalid_argument("predicted_tuple_bound: theta out of [delta/t, 1]");
    denom *= theta;
  }
  out.value = std::pow(delta, m) / denom;
  return out;
}

double unit_ball_volume(std::size_t n) {
  const double half = static_cast<double>(n) / 2.0;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double spherical_cap_fraction(std::size_t n, double a) {
  if (a >= 1.0) return 0.0;
  if (a <= -1.0) return 1.0;
  if (a < 0.0) return 1.0 - spherical_cap_fraction(n, -a);
  const double dn = static_cast<double>(n);
  return 0.5 * boost::math::ibeta((dn - 1.0) / 2.0, 0.5, 1.0 - a * a);
}

double annulus_volume(std::size_t n, double radius, double delta) {
  const double dn = static_cast<double>(n);
  const double inner = std::max(0.0, radius - delta);
  return unit_ball_volume(n) * (std::pow(radius + delta, dn) - std::pow(inner, dn));
}

double polar_cap_volume(std::size_t n, double radius, double delta) {
  const double dn = static_cast<double>(n);
  const double floor = polar_height_fraction(n) * radius;
  const double lo = std::max(radius - delta, floor);
  const double hi = radius + delta;
  if (hi <= lo) return 0.0;
  const double surface = dn * unit_ball_volume(n);
  auto integrand = [&](double rho) { return surface * std::pow(rho, dn - 1.0) * spherical_cap_fraction(n, floor / rho); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15, 1e-13);
}

double region_volume(const Region& region) {
  return region.kind == RegionKind::Annulus ? annulus_volume(region.dim(), region.sphere.radius, region.delta)
                                            : polar_cap_volume(region.dim(), region.sphere.radius, region.delta);
}

}  // namespace sphmax
