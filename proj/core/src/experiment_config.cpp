#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "sphmax/experiments.hpp"
#include "sphmax/vec.hpp"

namespace sphmax {

namespace {

struct KindName {
  ExperimentKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::EnemyScan, "enemy-scan"},       {ExperimentKind::CollinearScan, "collinear-scan"},
    {ExperimentKind::GenericScan, "generic-scan"},   {ExperimentKind::TupleBound, "tuple-bound"},
    {ExperimentKind::Multiplicity, "multiplicity"},  {ExperimentKind::Cardinality, "cardinality"},
    {ExperimentKind::BucketAudit, "bucket-audit"},   {ExperimentKind::MaximalNorm, "maximal-norm"},
    {ExperimentKind::FocusingSweep, "focusing-sweep"},
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_number(std::string_view text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    const std::string item = trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> dyadic_range(int from, int to) {
  std::vector<double> v;
  for (int k = from; k <= to; ++k) v.push_back(std::ldexp(1.0, -k));
  return v;
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
  for (const KindName& k : kKindNames)
    if (k.kind == kind) return k.name;
  throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind parse_kind(std::string_view name) {
  for (const KindName& k : kKindNames)
    if (k.name == name) return k.kind;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

std::vector<ExperimentKind> all_kinds() {
  std::vector<ExperimentKind> out;
  for (const KindName& k : kKindNames) out.push_back(k.kind);
  return out;
}

std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_delta(std::string_view text) {
  const std::string s = trim(text);
  if (const auto caret = s.find('^'); caret != std::string::npos) {
    const double base = parse_number(s.substr(0, caret));
    const double exponent = parse_number(s.substr(caret + 1));
    return std::pow(base, exponent);
  }
  if (const auto slash = s.find('/'); slash != std::string::npos)
    return parse_number(s.substr(0, slash)) / parse_number(s.substr(slash + 1));
  return parse_number(s);
}

void ExperimentConfig::validate() const {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("config: dimension out of range");
  if (deltaList.empty()) throw std::invalid_argument("config: delta list is empty");
  for (double d : deltaList)
    if (!(d > 0.0 && d < 0.5)) throw std::invalid_argument("config: every delta must lie in (0, 1/2)");
  if (samples < 10'000) throw std::invalid_argument("config: samples must be at least 10^4");
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = extra.find(key);
  return it == extra.end() ? fallback : parse_delta(it->second);
}

std::uint64_t ExperimentConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  const auto it = extra.find(key);
  if (it == extra.end()) return fallback;
  const double v = parse_delta(it->second);
  if (!(v >= 0.0) || v != std::floor(v)) throw std::invalid_argument("config: '" + key + "' must be a count");
  return static_cast<std::uint64_t>(v);
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = extra.find(key);
  return it == extra.end() ? fallback : it->second;
}

std::vector<double> ExperimentConfig::get_list(const std::string& key, std::vector<double> fallback) const {
  const auto it = extra.find(key);
  if (it == extra.end()) return fallback;
  std::vector<double> out;
  for (const std::string& item : split(it->second, ',')) out.push_back(parse_delta(item));
  return out;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.outputPath = "sphmax-out/" + std::string(kind_name(kind));
  switch (kind) {
    case ExperimentKind::EnemyScan:
      cfg.deltaList = dyadic_range(5, 11);
      cfg.extra = {{"phi", "0"}, {"centre2", "-0.3,0.4"}, {"centre3", "0.2,-0.6"}};
      break;
    case ExperimentKind::CollinearScan:
      cfg.deltaList = dyadic_range(5, 11);
      cfg.extra = {{"spacing", "0.5"}, {"offset", "1.8"}, {"rho", "0.8"}};
      break;
    case ExperimentKind::GenericScan:
      cfg.deltaList = dyadic_range(5, 11);
      cfg.extra = {{"triple", "random"}};
      break;
    case ExperimentKind::TupleBound:
      cfg.deltaList = dyadic_range(10, 14);
      cfg.samples = 200'000;
      cfg.extra = {{"triples", "cap"}, {"trials", "48"}};
      break;
    case ExperimentKind::Multiplicity:
      cfg.deltaList = dyadic_range(4, 7);
      cfg.samples = 2'000'000;
      cfg.extra = {{"family", "translated"}, {"radius", "1.5"}, {"familySize", "capacity"}};
      break;
    case ExperimentKind::Cardinality:
      cfg.deltaList = dyadic_range(4, 7);
      cfg.samples = 10'000;
      cfg.extra = {{"anchors", "16"}};
      break;
    case ExperimentKind::BucketAudit:
      cfg.deltaList = dyadic_range(5, 7);
      cfg.samples = 32'768;
      cfg.extra = {{"familySize", "64"}, {"m", "3"}};
      break;
    case ExperimentKind::MaximalNorm:
      cfg.deltaList = dyadic_range(3, 4);
      cfg.samples = 10'000;
      cfg.extra = {{"averageSamples", "4096"}};
      break;
    case ExperimentKind::FocusingSweep:
      cfg.deltaList = dyadic_range(3, 7);
      cfg.samples = 10'000;
      cfg.extra = {{"p", "1.2,1.5,2"}, {"averageSamples", "4096"}, {"radialPoints", "16"}};
      break;
  }
  return cfg;
}

void apply_setting(ExperimentConfig& cfg, const std::string& rawKey, const std::string& rawValue) {
  const std::string key = trim(rawKey);
  const std::string value = trim(rawValue);
  if (key.empty()) throw std::invalid_argument("config: empty key");
  if (key == "experiment") {
    cfg.experiment = parse_kind(value);
  } else if (key == "n" || key == "dim") {
    cfg.n = static_cast<std::size_t>(parse_number(value));
  } else if (key == "delta") {
    cfg.deltaList.clear();
    for (const std::string& item : split(value, ',')) cfg.deltaList.push_back(parse_delta(item));
  } else if (key == "seed") {
    cfg.seed = std::stoull(value);
  } else if (key == "samples") {
    const double v = parse_delta(value);
    if (!(v >= 1.0)) throw std::invalid_argument("config: samples must be positive");
    cfg.samples = static_cast<std::uint64_t>(v);
  } else if (key == "out") {
    cfg.outputPath = value;
  } else {
    cfg.extra[key] = value;
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineNo) + ": expected 'key = value'");
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

std::string echo_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "experiment = " << kind_name(cfg.experiment) << '\n';
  out << "n = " << cfg.n << '\n';
  out << "delta = ";
  for (std::size_t i = 0; i < cfg.deltaList.size(); ++i) out << (i ? "," : "") << format_exact(cfg.deltaList[i]);
  out << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "samples = " << cfg.samples << '\n';
  out << "out = " << cfg.outputPath << '\n';
  for (const auto& [k, v] : cfg.extra) out << k << " = " << v << '\n';
  return out.str();
}

}  // namespace sphmax
