#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sphmax {

enum class ExperimentKind {
  EnemyScan,
  CollinearScan,
  GenericScan,
  TupleBound,
  Multiplicity,
  Cardinality,
  BucketAudit,
  MaximalNorm,
  FocusingSweep,
};

/// CLI spelling, e.g. "enemy-scan".
std::string_view kind_name(ExperimentKind kind);
/// Throws std::invalid_argument for an unknown name.
ExperimentKind parse_kind(std::string_view name);
std::vector<ExperimentKind> all_kinds();

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::EnemyScan;
  std::size_t n = 3;
  std::vector<double> deltaList;
  std::uint64_t seed = 1;
  std::uint64_t samples = 1'000'000;
  std::string outputPath = "sphmax-out";
  /// Experiment-specific parameters (see default_config).
  std::map<std::string, std::string> extra;

  /// Throws std::invalid_argument on an empty or out-of-range delta list,
  /// samples < 10^4, or an unsupported dimension.
  void validate() const;

  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
};

/// Defaults per experiment, including its extra keys.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses "2^-5", "0.03125" or "1/32".
double parse_delta(std::string_view text);

/// Applies "key = value" lines ('#' starts a comment) on top of `base`.
/// Known keys: experiment, n (or dim), delta (comma list, repeatable),
/// seed, samples, out; anything else goes to `extra`.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base);

/// Applies one key/value pair with the same rules as parse_config.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// The fully resolved config in parse_config syntax.
std::string echo_config(const ExperimentConfig& cfg);

/// %.17g, the round-trip representation used in CSV output.
std::string format_exact(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::EnemyScan;
  /// The statement of the source result the experiment tests.
  std::string anchor;
  Table raw;
  std::vector<std::pair<std::string, std::string>> summary;
  /// Hard invariant violations; any entry makes the run fail.
  std::vector<std::string> failures;
  /// Isolated statistical misses.
  std::vector<std::string> warnings;

  bool passed() const { return failures.empty(); }
  /// Value of a summary field, or "" when absent.
  std::string field(std::string_view key) const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Human-readable summary: anchor, named fields, warnings, failures, and the
/// resolved config.
std::string summary_text(const ExperimentReport& report, const ExperimentConfig& cfg);

/// Writes <dir>/raw.csv, <dir>/summary.txt and <dir>/config.echo.
void write_report(const ExperimentReport& report, const ExperimentConfig& cfg, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Closed-form right-hand sides

/// a(m, n) = m - (m - 1)(n - 1).
int a_exponent(int m, int n);

enum class RhsKind {
  /// delta^{a(m,n)} prod_{j=3}^m theta_j^{n-j} prod_{j=2}^m t_j^{n-2} #C.
  TupleSum,
  /// ln(1/delta) delta^{n-(n-1)^2} #C.
  Multiplicity,
};

double predicted_rhs(RhsKind kind, int n, int m, double delta, std::span<const double> tList,
                     std::span<const double> thetaList, std::size_t familySize);

/// Checks K(delta/2) <= 2 K(delta) along deltas sorted in decreasing order.
/// Returns the largest consecutive ratio K(delta/2) / K(delta) (infinity when
/// some K(delta) is zero and its successor is not).
double worst_stability_ratio(std::span<const std::pair<double, double>> deltaK);

}  // namespace sphmax
