#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sphmax/configurations.hpp"

namespace sphmax {

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_family(std::ostream& out, const SphereFamily& family) {
  out << family.n << ' ' << exact(family.delta) << ' ' << family.size() << '\n';
  for (const Sphere& s : family.spheres) {
    if (s.dim() != family.n) throw std::invalid_argument("write_family: sphere dimension mismatch");
    for (double c : s.centre) out << exact(c) << ' ';
    out << exact(s.radius) << '\n';
  }
  if (!out) throw std::runtime_error("write_family: stream failure");
}

SphereFamily read_family(std::istream& in) {
  SphereFamily family;
  std::size_t count = 0;
  if (!(in >> family.n >> family.delta >> count)) throw std::runtime_error("read_family: malformed header");
  if (family.n < 1 || family.n > kMaxDim) throw std::runtime_error("read_family: dimension out of range");
  family.spheres.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec c(family.n);
    double r = 0.0;
    for (std::size_t k = 0; k < family.n; ++k)
      if (!(in >> c[k])) throw std::runtime_error("read_family: truncated record");
    if (!(in >> r)) throw std::runtime_error("read_family: truncated record");
    family.spheres.emplace_back(c, r);
  }
  return family;
}

}  // namespace sphmax
