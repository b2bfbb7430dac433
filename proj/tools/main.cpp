// sphmax: command-line front end for the experiments.
//
//   sphmax enemy-scan --delta 2^-5 --delta 2^-6 --delta 2^-7 --out runs/enemy
//   sphmax multiplicity --config mult.cfg --set family=random
//
// Exit status: 0 when every invariant holds, 1 on an invariant failure,
// 2 on a configuration or I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sphmax/experiments.hpp"

namespace {

struct CommonFlags {
  std::string configPath;
  std::optional<std::size_t> dim;
  std::vector<std::string> deltas;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> samples;
  std::optional<std::string> out;
  std::vector<std::string> settings;
  bool quiet = false;
};

sphmax::ExperimentConfig resolve(sphmax::ExperimentKind kind, const CommonFlags& flags) {
  sphmax::ExperimentConfig cfg = sphmax::default_config(kind);
  if (!flags.configPath.empty()) {
    std::ifstream in(flags.configPath);
    if (!in) throw std::invalid_argument("cannot open config file " + flags.configPath);
    cfg = sphmax::parse_config(in, cfg);
    if (cfg.experiment != kind) throw std::invalid_argument("config file names a different experiment");
  }
  for (const std::string& s : flags.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    sphmax::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (flags.dim) cfg.n = *flags.dim;
  if (!flags.deltas.empty()) {
    cfg.deltaList.clear();
    for (const std::string& d : flags.deltas) cfg.deltaList.push_back(sphmax::parse_delta(d));
  }
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.samples) sphmax::apply_setting(cfg, "samples", *flags.samples);
  if (flags.out) cfg.outputPath = *flags.out;
  if (cfg.experiment != kind) throw std::invalid_argument("--set experiment conflicts with the subcommand");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretised spherical maximal operator experiments"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::vector<std::pair<sphmax::ExperimentKind, CLI::App*>> subs;
  for (sphmax::ExperimentKind kind : sphmax::all_kinds()) {
    const std::string name(sphmax::kind_name(kind));
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->add_option("--config", flags.configPath, "Key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--dim", flags.dim, "Ambient dimension n");
    sub->add_option("--delta", flags.deltas, "Delta value (2^-k, 1/m or decimal); repeatable")->delimiter(',');
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--samples", flags.samples, "Monte-Carlo samples");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--set", flags.settings, "Extra parameter key=value; repeatable");
    sub->add_flag("--quiet", flags.quiet, "Do not print the summary");
    subs.emplace_back(kind, sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  sphmax::ExperimentKind kind{};
  for (const auto& [k, sub] : subs)
    if (sub->parsed()) kind = k;

  sphmax::ExperimentConfig cfg;
  try {
    cfg = resolve(kind, flags);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "sphmax: " << e.what() << '\n';
    return 2;
  }

  try {
    const sphmax::ExperimentReport report = sphmax::run_experiment(cfg);
    sphmax::write_report(report, cfg, cfg.outputPath);
    if (!flags.quiet) std::cout << sphmax::summary_text(report, cfg);
    return report.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "sphmax: " << e.what() << '\n';
    return 2;
  }
}
