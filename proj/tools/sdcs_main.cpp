// sdcs: batch experiments for sigma-delta quantized compressed sensing.
//
//   sdcs run            [--config FILE] [--set key=value ...] [common flags]
//   sdcs sigmamin       smallest singular values of D^{-r}E over an oversampling grid
//   sdcs spectral       spectral checks on D^r
//   sdcs ratedistortion step size / bit budget / distortion tables
//   sdcs report CSV     summaries and log-log slopes of an existing trial CSV
//
// Exit status: 0 on success, 2 if any trial row failed, 1 on configuration errors.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sdcs/config.hpp"
#include "sdcs/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::string gnuplot;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool full = false;
  bool timing = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", f.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--out", f.out, "output CSV path");
  cmd->add_option("--threads", f.threads, "worker threads (default: $SDCS_THREADS or all cores)");
  cmd->add_flag("--full", f.full, "large problem sizes instead of desk-scale defaults");
  cmd->add_flag("--timing", f.timing, "record wall_ms per trial (output no longer reproducible)");
  cmd->add_option("--gnuplot", f.gnuplot, "also write a gnuplot script to this path");
  cmd->add_flag("-q,--quiet", f.quiet, "print nothing but errors");
}

sdcs::ConfigMap gather(const CommonFlags& f) {
  sdcs::ConfigMap settings;
  if (!f.config_path.empty()) settings = sdcs::read_config_file(f.config_path);
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw sdcs::ConfigError("--set expects key=value, got '" + kv + "'");
    settings[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (f.seed) settings["seed"] = std::to_string(*f.seed);
  if (f.threads) settings["threads"] = std::to_string(*f.threads);
  if (!f.out.empty()) settings["out"] = f.out;
  if (f.timing) settings["timing"] = "1";
  return settings;
}

std::string sibling(const std::string& csv, const std::string& suffix) {
  std::filesystem::path p(csv);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

int report(const std::vector<sdcs::TrialRecord>& records, const std::string& csv,
           const std::string& gnuplot, bool quiet) {
  const auto summaries = sdcs::summarize_records(records);
  const auto slopes = sdcs::compute_slopes(summaries);
  const auto summary = sdcs::summary_table(summaries);
  const auto slope = sdcs::slope_table(slopes);
  sdcs::write_table_csv(sibling(csv, ".summary.csv"), summary);
  sdcs::write_table_csv(sibling(csv, ".slopes.csv"), slope);
  if (!gnuplot.empty()) sdcs::write_gnuplot_script(gnuplot, sibling(csv, ".summary.csv"), summaries);
  if (!quiet) {
    std::cout << sdcs::format_table(summary) << '\n' << sdcs::format_table(slope);
  }
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.failed() ? 1 : 0;
  return failed > 0 ? 2 : 0;
}

// `run` takes the kind from the config; the other subcommands pin it.
int execute(sdcs::ExperimentKind kind, const CommonFlags& flags, bool pin_kind) {
  auto settings = gather(flags);
  if (pin_kind) settings["kind"] = sdcs::to_string(kind);
  sdcs::ExperimentConfig config = sdcs::make_config(settings, kind, flags.full);
  if (config.output.empty()) config.output = config.id + ".csv";

  if (config.kind == sdcs::ExperimentKind::kEndToEnd || config.kind == sdcs::ExperimentKind::kSigmaMinStudy) {
    const auto outcome = sdcs::run_to_csv(config);
    if (!flags.quiet) {
      std::cerr << "executed " << outcome.executed << ", skipped " << outcome.skipped << ", failed "
                << outcome.failed << " -> " << config.output << '\n';
    }
    return report(outcome.records, config.output, flags.gnuplot, flags.quiet);
  }
  const sdcs::Table table = sdcs::run_table_experiment(config);
  sdcs::write_table_csv(config.output, table);
  if (!flags.quiet) std::cout << sdcs::format_table(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sigma-delta quantized compressed sensing experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags, sigmamin_flags, spectral_flags, rd_flags;
  auto* run = app.add_subcommand("run", "run the experiment described by the config (default: end-to-end sweep)");
  add_common(run, run_flags);
  auto* sigmamin = app.add_subcommand("sigmamin", "sigma_min(D^{-r}E) study");
  add_common(sigmamin, sigmamin_flags);
  auto* spectral = app.add_subcommand("spectral", "spectral checks on powers of D");
  add_common(spectral, spectral_flags);
  auto* rd = app.add_subcommand("ratedistortion", "rate-distortion planning table");
  add_common(rd, rd_flags);

  std::string report_csv, report_gnuplot;
  bool report_quiet = false;
  auto* rep = app.add_subcommand("report", "summaries and slopes of an existing trial CSV");
  rep->add_option("csv", report_csv, "trial CSV")->required()->check(CLI::ExistingFile);
  rep->add_option("--gnuplot", report_gnuplot, "also write a gnuplot script");
  rep->add_flag("-q,--quiet", report_quiet, "print nothing but errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return execute(sdcs::ExperimentKind::kEndToEnd, run_flags, false);
    if (sigmamin->parsed()) return execute(sdcs::ExperimentKind::kSigmaMinStudy, sigmamin_flags, true);
    if (spectral->parsed()) return execute(sdcs::ExperimentKind::kSpectralSuite, spectral_flags, true);
    if (rd->parsed()) return execute(sdcs::ExperimentKind::kRateDistortion, rd_flags, true);
    if (rep->parsed()) {
      return report(sdcs::read_trial_csv(report_csv), report_csv, report_gnuplot, report_quiet);
    }
  } catch (const sdcs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
