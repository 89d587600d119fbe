#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdcs/config.hpp"
#include "sdcs/csv.hpp"
#include "sdcs/ensembles.hpp"
#include "sdcs/noise_shaper.hpp"
#include "sdcs/stats.hpp"

namespace sdcs {

enum class ExperimentKind { kSigmaMinStudy, kEndToEnd, kInfNormStudy, kSpectralSuite, kRateDistortion };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

// Scheme tokens: "pcm", "diff:<r>", "highpass:<r>", "leaky:<r>:<mu>".
NoiseShaper parse_scheme(const std::string& token);
std::string scheme_token(const NoiseShaper& shaper);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kEndToEnd;
  std::string id = "e2e";

  std::vector<std::size_t> ks{10};
  std::vector<std::size_t> ms;         // EndToEnd rows of Φ
  std::vector<double> lambdas;         // SigmaMin / InfNorm / RateDistortion oversampling grid
  std::size_t n = 1024;                // ambient dimension N
  std::vector<NoiseShaper> schemes;    // EndToEnd quantizers
  std::vector<int> orders;             // SigmaMin / Spectral / RateDistortion
  std::vector<std::size_t> spectral_ms;

  double delta = 0.01;
  double alpha = 0.5;
  std::size_t kprime = 0;  // 0 selects k
  MagnitudeModel signal = MagnitudeModel::kConstantUnitNorm;
  Ensemble ensemble = Ensemble::kGaussianUnit;
  int bits = 0;  // finite quantizer bits; 0 = unbounded alphabet δℤ

  // Gaussian signals: nonzeros below size_factor·δ are redrawn. With
  // auto_size the factor is calibrated from pilot decodes (γ·max η/δ).
  double size_factor = 0.0;
  bool auto_size = false;

  double floor = 1.0;  // rate-distortion dynamic-range floor A
  int scales = 0;      // rate-distortion dyadic scales b

  std::size_t trials = 50;
  std::uint64_t seed = 20100101;
  std::string output;
  std::size_t threads = 0;
  bool record_timing = false;
  bool verify = true;  // check per-trial error invariants, fail the row on violation
};

// Desk-scale defaults for a kind; `full` selects the large problem sizes
// (Φ of 1000×2000, 100 trials per cell, 1000 σ_min realizations with k = 50).
ExperimentConfig default_config(ExperimentKind kind, bool full);

// Applies `settings` on top of the defaults of settings["kind"] (or
// `fallback_kind`). Throws ConfigError on unknown keys or invalid values.
ExperimentConfig make_config(const ConfigMap& settings, ExperimentKind fallback_kind, bool full);

void validate(const ExperimentConfig& config);

struct RunOutcome {
  std::vector<TrialRecord> records;  // completed + newly executed
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

using RecordSink = std::function<void(const TrialRecord&)>;

// Runs every (cell, trial) task of a SigmaMinStudy or EndToEnd config that is
// not already in `completed`. Each task draws from its own derived seed, so
// the records do not depend on thread count or completion order. `sink` is
// called once per new record, serialized.
RunOutcome run_experiment(const ExperimentConfig& config,
                          const std::vector<TrialRecord>& completed = {},
                          const RecordSink& sink = {});

// run_experiment against config.output: completed rows are read back and
// skipped, new rows are appended as they finish, and the file is finally
// rewritten sorted by key.
RunOutcome run_to_csv(const ExperimentConfig& config);

struct CellSummary {
  TrialRecord cell;  // cell fields; outcome fields unused
  std::size_t trials = 0;
  std::size_t failed = 0;
  Summary coarse;
  Summary fine;
  Summary sigma_min;
  double support_rate = 0.0;
  double worst_inverse_sigma = 0.0;  // max 1/σ_min
};

std::vector<CellSummary> summarize_records(const std::vector<TrialRecord>& records);

struct SlopeRow {
  std::string experiment_id;
  std::size_t k = 0;
  int r = 0;
  std::string shaper;
  std::string metric;  // fine_mean, fine_max, coarse_mean, worst_inv_sigma
  LineFit fit;
  std::size_t points = 0;
};

// Log-log slope against λ of each metric, per (experiment, k, scheme) series.
std::vector<SlopeRow> compute_slopes(const std::vector<CellSummary>& summaries);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

Table summary_table(const std::vector<CellSummary>& summaries);
Table slope_table(const std::vector<SlopeRow>& slopes);

// SpectralSuite, InfNormStudy and RateDistortion produce tables, not trials.
Table run_table_experiment(const ExperimentConfig& config);

void write_table_csv(const std::string& path, const Table& table);
std::string format_table(const Table& table);

// gnuplot script plotting mean/max error (or worst 1/σ_min) against λ on log-log axes.
void write_gnuplot_script(const std::string& path, const std::string& summary_csv,
                          const std::vector<CellSummary>& summaries);

// γ·max η/δ over `pilot_trials` constant-magnitude decodes, η = ‖x − x′‖₂.
double calibrate_size_factor(const Matrix& phi, std::size_t k, const NoiseShaper& shaper,
                             double delta, std::size_t pilot_trials, std::uint64_t seed);

}  // namespace sdcs
