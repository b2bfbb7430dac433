#include "sphmax/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "linalg.hpp"

namespace sphmax {

Sphere::Sphere(Vec c, double r) : centre{std::move(c)}, radius{r} {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("Sphere: radius must be positive");
  if (centre.empty()) throw std::invalid_argument("Sphere: empty centre");
}

Region::Region(Sphere s, double d, RegionKind k) : sphere{std::move(s)}, delta{d}, kind{k} {
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("Region: delta must lie in (0, 1/2)");
}

double centre_distance(const Sphere& a, const Sphere& b) { return distance(a.centre, b.centre); }

DirectionData unit_direction(const Sphere& from, const Sphere& to) {
  const Vec diff = to.centre - from.centre;
  const double d = norm(diff);
  if (d == 0.0) throw std::invalid_argument("degenerate direction");
  DirectionData out;
  out.dist = d;
  out.eFull = diff * (1.0 / d);
  if (from.centre.back() == 0.0 && to.centre.back() == 0.0) out.eHoriz = horizontal(out.eFull);
  return out;
}

Slab slab_of_pair(const Sphere& a, const Sphere& b, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("slab_of_pair: delta must be positive");
  const DirectionData dir = unit_direction(a, b);
  const double r = a.radius;
  const double rb = b.radius;
  Slab slab;
  slab.normal = dir.eFull;
  slab.offset = (r * r - rb * rb - (norm2(a.centre) - norm2(b.centre))) / (2.0 * dir.dist);
  slab.halfThickness = ((r + rb) * delta + delta * delta) / dir.dist;
  return slab;
}

namespace {

// Removes the components along an orthonormal set, twice.
Vec strip(const std::vector<Vec>& ortho, Vec v) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Vec& q : ortho) v -= q * dot(q, v);
  return v;
}

}  // namespace

Vec proj_orthocomplement(std::span<const Vec> basis, const Vec& v) {
  std::vector<Vec> ortho;
  ortho.reserve(basis.size());
  for (const Vec& b : basis) {
    const Vec r = strip(ortho, b);
    const double len = norm(r);
    if (len <= kDependenceTolerance * norm(b) || len == 0.0)
      throw std::invalid_argument("proj_orthocomplement: dependent basis");
    ortho.push_back(r * (1.0 / len));
  }
  return strip(ortho, v);
}

double wedge_norm_projection(std::span<const Vec> vectors) {
  std::vector<Vec> ortho;
  double product = 1.0;
  for (const Vec& x : vectors) {
    const Vec r = strip(ortho, x);
    const double len = norm(r);
    if (len <= kDependenceTolerance * norm(x)) return 0.0;
    product *= len;
    ortho.push_back(r * (1.0 / len));
  }
  return product;
}

double wedge_norm_gram(std::span<const Vec> vectors) {
  const std::size_t l = vectors.size();
  if (l == 0) return 1.0;
  detail::SquareMatrix<long double> g(l);
  long double diag = 1.0L;
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      long double s = 0.0L;
      for (std::size_t k = 0; k < vectors[i].size(); ++k)
        s += static_cast<long double>(vectors[i][k]) * static_cast<long double>(vectors[j][k]);
      g(i, j) = s;
    }
    diag *= g(i, i);
  }
  if (diag == 0.0L) return 0.0;
  const long double det = detail::determinant(g);
  // Below the resolution of an extended-precision LU the determinant is noise.
  const long double floor = 1e-18L * diag;
  if (det <= floor) return 0.0;
  return static_cast<double>(std::sqrt(det));
}

double wedge_norm(std::span<const Vec> vectors) {
  const double gram = wedge_norm_gram(vectors);
  const double proj = wedge_norm_projection(vectors);
  if (gram == 0.0 || proj == 0.0) return 0.0;
  return gram;
}

}  // namespace sphmax
