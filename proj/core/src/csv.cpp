#include "sdcs/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace sdcs {
namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string opt(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }
std::string opt(const std::optional<bool>& v) { return v ? (*v ? "1" : "0") : std::string(); }
std::string opt(const std::optional<std::string>& v) { return v ? *v : std::string(); }

template <typename T>
T parse_integer(std::string_view s, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error(std::string("csv: bad ") + what + " '" + std::string(s) + "'");
  }
  return value;
}

double parse_double(std::string_view s, const char* what) {
  auto v = parse_optional_double(s);
  if (!v) throw std::runtime_error(std::string("csv: missing ") + what);
  return *v;
}

std::optional<std::size_t> parse_optional_size(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return parse_integer<std::size_t>(s, "integer");
}

std::optional<bool> parse_optional_bool(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::runtime_error("csv: bad boolean '" + std::string(s) + "'");
}

auto sort_tuple(const TrialRecord& r) {
  return std::make_tuple(std::cref(r.experiment_id), r.k, r.m, r.n.value_or(0), r.r,
                         std::cref(r.shaper), r.mu.value_or(0.0), r.delta.value_or(0.0),
                         r.kprime.value_or(0), r.signal_model.value_or(std::string()), r.trial);
}

}  // namespace

std::string TrialRecord::cell_key() const {
  return experiment_id + "|" + std::to_string(k) + "|" + std::to_string(m) + "|" + opt(n) + "|" +
         std::to_string(r) + "|" + shaper + "|" + opt(mu) + "|" + opt(delta) + "|" + opt(kprime) +
         "|" + opt(signal_model);
}

std::string TrialRecord::key() const { return cell_key() + "|" + std::to_string(trial); }

const std::vector<std::string>& trial_csv_columns() {
  static const std::vector<std::string> columns = {
      "experiment_id", "k",        "m",       "lambda",       "N",         "r",
      "shaper",        "mu",       "delta",   "kprime",       "signal_model", "trial",
      "seed",          "coarse_err", "fine_err", "support_exact", "sigma_min", "u_inf",
      "u_l2",          "overloaded", "wall_ms"};
  return columns;
}

std::string trial_csv_header() {
  std::string out;
  for (const auto& c : trial_csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::optional<double> parse_optional_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("csv: bad number '" + std::string(s) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string to_csv_row(const TrialRecord& r) {
  std::string out;
  out.reserve(192);
  auto add = [&](const std::string& field) {
    out += field;
    out += ',';
  };
  add(r.experiment_id);
  add(std::to_string(r.k));
  add(std::to_string(r.m));
  add(format_double(r.lambda));
  add(opt(r.n));
  add(std::to_string(r.r));
  add(r.shaper);
  add(opt(r.mu));
  add(opt(r.delta));
  add(opt(r.kprime));
  add(opt(r.signal_model));
  add(std::to_string(r.trial));
  add(std::to_string(r.seed));
  add(opt(r.coarse_err));
  add(opt(r.fine_err));
  add(opt(r.support_exact));
  add(opt(r.sigma_min));
  add(opt(r.u_inf));
  add(opt(r.u_l2));
  add(opt(r.overloaded));
  out += opt(r.wall_ms);
  return out;
}

TrialRecord from_csv_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = split_csv(line);
  if (f.size() != trial_csv_columns().size()) {
    throw std::runtime_error("csv: expected " + std::to_string(trial_csv_columns().size()) +
                             " fields, got " + std::to_string(f.size()));
  }
  TrialRecord r;
  r.experiment_id = std::string(f[0]);
  r.k = parse_integer<std::size_t>(f[1], "k");
  r.m = parse_integer<std::size_t>(f[2], "m");
  r.lambda = parse_double(f[3], "lambda");
  r.n = parse_optional_size(f[4]);
  r.r = parse_integer<int>(f[5], "r");
  r.shaper = std::string(f[6]);
  r.mu = parse_optional_double(f[7]);
  r.delta = parse_optional_double(f[8]);
  r.kprime = parse_optional_size(f[9]);
  if (!f[10].empty()) r.signal_model = std::string(f[10]);
  r.trial = parse_integer<std::size_t>(f[11], "trial");
  r.seed = parse_integer<std::uint64_t>(f[12], "seed");
  r.coarse_err = parse_optional_double(f[13]);
  r.fine_err = parse_optional_double(f[14]);
  r.support_exact = parse_optional_bool(f[15]);
  r.sigma_min = parse_optional_double(f[16]);
  r.u_inf = parse_optional_double(f[17]);
  r.u_l2 = parse_optional_double(f[18]);
  r.overloaded = parse_optional_bool(f[19]);
  r.wall_ms = parse_optional_double(f[20]);
  return r;
}

std::vector<TrialRecord> read_trial_csv(const std::string& path) {
  std::vector<TrialRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  if (!std::getline(in, line)) return out;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != trial_csv_header()) {
    throw std::runtime_error("csv: unexpected header in " + path);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(from_csv_row(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_trial_csv(const std::string& path, std::vector<TrialRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return sort_tuple(a) < sort_tuple(b);
  });
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << trial_csv_header() << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);

  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& r : records) {
    if (r.failure) failures.emplace_back(r.key(), *r.failure);
  }
  const std::string sidecar = failure_sidecar_path(path);
  if (failures.empty()) {
    std::error_code ec;
    std::filesystem::remove(sidecar, ec);
  } else {
    std::ofstream out(sidecar, std::ios::trunc);
    for (const auto& [key, reason] : failures) {
      std::string clean = reason;
      std::replace(clean.begin(), clean.end(), '\n', ' ');
      out << key << ',' << clean << '\n';
    }
  }
}

std::string failure_sidecar_path(const std::string& csv_path) { return csv_path + ".failures"; }

std::vector<std::pair<std::string, std::string>> read_failure_sidecar(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find(',');
    if (pos == std::string::npos) continue;
    out.emplace_back(line.substr(0, pos), line.substr(pos + 1));
  }
  return out;
}

}  // namespace sdcs
