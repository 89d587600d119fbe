#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdcs {

// One Monte Carlo trial, the unit of CSV persistence. Fields that do not
// apply to an experiment kind are left empty in the file.
struct TrialRecord {
  std::string experiment_id;
  std::size_t k = 0;
  std::size_t m = 0;
  double lambda = 0.0;
  std::optional<std::size_t> n;
  int r = 0;
  std::string shaper;
  std::optional<double> mu;
  std::optional<double> delta;
  std::optional<std::size_t> kprime;
  std::optional<std::string> signal_model;
  std::size_t trial = 0;
  std::uint64_t seed = 0;

  std::optional<double> coarse_err;
  std::optional<double> fine_err;
  std::optional<bool> support_exact;
  std::optional<double> sigma_min;
  std::optional<double> u_inf;
  std::optional<double> u_l2;
  std::optional<bool> overloaded;
  std::optional<double> wall_ms;

  // Set on failed trials; kept out of the main CSV (see failure sidecar).
  std::optional<std::string> failure;

  bool failed() const { return failure.has_value(); }
  // Identifies the (cell, trial) pair; used for sorting and resume.
  std::string key() const;
  // Identifies the cell (key without the trial index).
  std::string cell_key() const;
};

// Column order of the trial CSV.
const std::vector<std::string>& trial_csv_columns();
std::string trial_csv_header();

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
std::optional<double> parse_optional_double(std::string_view s);

std::string to_csv_row(const TrialRecord& record);
TrialRecord from_csv_row(std::string_view line);

// Reads a trial CSV; a missing file yields an empty vector. Throws
// std::runtime_error on a header mismatch or malformed row.
std::vector<TrialRecord> read_trial_csv(const std::string& path);

// Writes header plus rows sorted by key().
void write_trial_csv(const std::string& path, std::vector<TrialRecord> records);

// Failure sidecar: "key,reason" lines for failed trials.
std::string failure_sidecar_path(const std::string& csv_path);
std::vector<std::pair<std::string, std::string>> read_failure_sidecar(const std::string& path);

// Splits one CSV line on commas (fields never contain commas or quotes).
std::vector<std::string_view> split_csv(std::string_view line);

}  // namespace sdcs
