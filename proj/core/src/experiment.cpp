#include "sdcs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "sdcs/decoders.hpp"
#include "sdcs/parallel.hpp"
#include "sdcs/quantizers.hpp"
#include "sdcs/random.hpp"
#include "sdcs/spectral.hpp"

namespace sdcs {
namespace {

// Seed-derivation tags.
constexpr std::uint64_t kPhiTag = 0x7068;
constexpr std::uint64_t kSignalTag = 0x7367;
constexpr std::uint64_t kPilotTag = 0x706c;

std::size_t rows_for(double lambda, std::size_t k) {
  const double m = lambda * static_cast<double>(k);
  const double rounded = std::round(m);
  if (std::abs(m - rounded) > 1e-9 || rounded < 1.0) {
    throw ConfigError("lambda*k must be a positive integer (lambda " + format_double(lambda) +
                      ", k " + std::to_string(k) + ")");
  }
  return static_cast<std::size_t>(rounded);
}

std::vector<int> parse_int_list(const std::string& text, const char* key) {
  std::vector<int> out;
  for (double v : parse_number_list(text)) {
    if (std::floor(v) != v || v < 0 || v > 16) {
      throw ConfigError(std::string("'") + key + "' entries must be integers in [0, 16]");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> split_token(const std::string& token, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(token);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
std::string opt_text(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }

TrialRecord cell_only(const TrialRecord& r) {
  TrialRecord c;
  c.experiment_id = r.experiment_id;
  c.k = r.k;
  c.m = r.m;
  c.lambda = r.lambda;
  c.n = r.n;
  c.r = r.r;
  c.shaper = r.shaper;
  c.mu = r.mu;
  c.delta = r.delta;
  c.kprime = r.kprime;
  c.signal_model = r.signal_model;
  return c;
}

struct Task {
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t scheme = 0;  // index into config.schemes, or the order for SigmaMin
  int order = 0;
  std::size_t trial = 0;
  TrialRecord record;  // cell fields + seed
};

std::vector<Task> build_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  if (c.kind == ExperimentKind::kSigmaMinStudy) {
    for (std::size_t k : c.ks) {
      for (double lambda : c.lambdas) {
        const std::size_t m = rows_for(lambda, k);
        for (int order : c.orders) {
          for (std::size_t t = 0; t < c.trials; ++t) {
            Task task;
            task.k = k;
            task.m = m;
            task.order = order;
            task.trial = t;
            TrialRecord& r = task.record;
            r.experiment_id = c.id;
            r.k = k;
            r.m = m;
            r.lambda = lambda;
            r.r = order;
            r.shaper = NoiseShaper::difference(std::max(order, 1)).name();
            r.signal_model = std::nullopt;
            r.trial = t;
            r.seed = derive_seed(c.seed, {static_cast<std::uint64_t>(m), k, t});
            tasks.push_back(std::move(task));
          }
        }
      }
    }
    return tasks;
  }
  for (std::size_t k : c.ks) {
    const std::size_t kp = c.kprime == 0 ? k : c.kprime;
    for (std::size_t m : c.ms) {
      for (std::size_t s = 0; s < c.schemes.size(); ++s) {
        const NoiseShaper& shaper = c.schemes[s];
        for (std::size_t t = 0; t < c.trials; ++t) {
          Task task;
          task.k = k;
          task.m = m;
          task.scheme = s;
          task.order = shaper.order();
          task.trial = t;
          TrialRecord& r = task.record;
          r.experiment_id = c.id;
          r.k = k;
          r.m = m;
          r.lambda = static_cast<double>(m) / static_cast<double>(k);
          r.n = c.n;
          r.r = shaper.order();
          r.shaper = shaper.name();
          if (shaper.kind() == ShaperKind::kLeaky) r.mu = shaper.mu();
          r.delta = c.delta;
          r.kprime = kp;
          r.signal_model = to_string(c.signal);
          r.trial = t;
          // Shared by every m and scheme so the curves compare like with like.
          r.seed = derive_seed(c.seed, {kSignalTag, k, t});
          tasks.push_back(std::move(task));
        }
      }
    }
  }
  return tasks;
}

Alphabet make_alphabet(const ExperimentConfig& c) {
  return c.bits > 0 ? Alphabet::finite(c.delta, c.bits) : Alphabet::unbounded(c.delta);
}

Vector measure(const Matrix& phi, const SparseSignal& x) {
  Vector y(phi.rows(), 0.0);
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    const auto row = phi.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < x.sparsity(); ++j) s += row[x.support()[j]] * x.values()[j];
    y[i] = s;
  }
  return y;
}

struct EndToEndContext {
  const ExperimentConfig* config = nullptr;
  std::map<std::size_t, Matrix> phis;         // by m
  std::map<std::size_t, double> min_magnitude;  // by k
};

void run_end_to_end_trial(const EndToEndContext& ctx, const Task& task, TrialRecord& r) {
  const ExperimentConfig& c = *ctx.config;
  const Matrix& phi = ctx.phis.at(task.m);
  const NoiseShaper& shaper = c.schemes[task.scheme];
  const SparseSignal x = sample_signal(
      {c.n, task.k, c.signal, r.seed, ctx.min_magnitude.count(task.k) ? ctx.min_magnitude.at(task.k) : 0.0});
  const Vector y = measure(phi, x);
  const QuantizationResult qr = shape_quantize(y, shaper, make_alphabet(c));

  RecoveryOptions options;
  options.k_prime = *r.kprime;
  const RecoveryResult rec = two_stage_recover(phi, qr.q, task.k, c.delta, shaper, options, &x);

  r.coarse_err = rec.coarse_error;
  r.fine_err = rec.fine_error;
  r.support_exact = rec.support_exact;
  r.sigma_min = rec.sigma_min;
  r.u_inf = qr.max_state;
  r.u_l2 = norm2(qr.u);
  r.overloaded = qr.overloaded;

  if (!c.verify) return;
  if (!(*r.coarse_err >= 0.0) || !(*r.fine_err >= 0.0)) {
    throw std::runtime_error("invariant: non-finite error");
  }
  if (!qr.overloaded) {
    const double mismatch = norm2(subtract(y, qr.q));
    if (mismatch > rec.radius * (1.0 + 1e-12)) {
      throw std::runtime_error("invariant: ||y-q|| " + format_double(mismatch) +
                               " exceeds radius " + format_double(rec.radius));
    }
  }
  if (rec.support_exact) {
    const double bound = *r.u_l2 / rec.sigma_min;
    if (*r.fine_err > bound * (1.0 + 1e-8) + 1e-14) {
      throw std::runtime_error("invariant: fine error " + format_double(*r.fine_err) +
                               " exceeds ||u||/sigma_min " + format_double(bound));
    }
  }
}

void clear_outcomes(TrialRecord& r) {
  r.coarse_err.reset();
  r.fine_err.reset();
  r.support_exact.reset();
  r.sigma_min.reset();
  r.u_inf.reset();
  r.u_l2.reset();
  r.overloaded.reset();
  r.wall_ms.reset();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSigmaMinStudy: return "sigmamin";
    case ExperimentKind::kEndToEnd: return "endtoend";
    case ExperimentKind::kInfNormStudy: return "infnorm";
    case ExperimentKind::kSpectralSuite: return "spectral";
    case ExperimentKind::kRateDistortion: return "ratedistortion";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "sigmamin" || name == "SigmaMinStudy") return ExperimentKind::kSigmaMinStudy;
  if (name == "endtoend" || name == "EndToEnd" || name == "run") return ExperimentKind::kEndToEnd;
  if (name == "infnorm" || name == "InfNormStudy") return ExperimentKind::kInfNormStudy;
  if (name == "spectral" || name == "SpectralSuite") return ExperimentKind::kSpectralSuite;
  if (name == "ratedistortion" || name == "RateDistortion") return ExperimentKind::kRateDistortion;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

NoiseShaper parse_scheme(const std::string& token) {
  const auto parts = split_token(token, ':');
  require(!parts.empty(), "empty scheme token");
  auto order_of = [&](std::size_t i) {
    require(parts.size() > i, "scheme '" + token + "' needs an order");
    const double v = parse_number(parts[i], "scheme order");
    require(std::floor(v) == v && v >= 1 && v <= 16, "scheme '" + token + "': order must be 1..16");
    return static_cast<int>(v);
  };
  const std::string& name = parts[0];
  try {
    if (name == "pcm") {
      require(parts.size() == 1, "scheme 'pcm' takes no arguments");
      return NoiseShaper::identity();
    }
    if (name == "diff" || name == "sd") {
      require(parts.size() == 2, "scheme '" + token + "': expected diff:<r>");
      return NoiseShaper::difference(order_of(1));
    }
    if (name == "highpass") {
      require(parts.size() == 2, "scheme '" + token + "': expected highpass:<r>");
      return NoiseShaper::high_pass(order_of(1));
    }
    if (name == "leaky") {
      require(parts.size() == 3, "scheme '" + token + "': expected leaky:<r>:<mu>");
      return NoiseShaper::leaky(order_of(1), parse_number(parts[2], "mu"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scheme '" + token + "': " + e.what());
  }
  throw ConfigError("unknown scheme '" + token + "'");
}

std::string scheme_token(const NoiseShaper& shaper) {
  switch (shaper.kind()) {
    case ShaperKind::kIdentity: return "pcm";
    case ShaperKind::kDifferencePower: return "diff:" + std::to_string(shaper.order());
    case ShaperKind::kHighPassPower: return "highpass:" + std::to_string(shaper.order());
    case ShaperKind::kLeaky:
      return "leaky:" + std::to_string(shaper.order()) + ":" + format_double(shaper.mu());
  }
  return "?";
}

ExperimentConfig default_config(ExperimentKind kind, bool full) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::kEndToEnd:
      c.id = "sweep";
      c.ks = full ? std::vector<std::size_t>{5, 10, 20, 40} : std::vector<std::size_t>{10};
      c.ms = parse_size_list(full ? "100:1000:100" : "100:600:100");
      c.n = full ? 2000 : 1024;
      c.schemes = {NoiseShaper::identity(), NoiseShaper::difference(1), NoiseShaper::difference(2)};
      c.delta = 0.01;
      c.trials = full ? 100 : 50;
      break;
    case ExperimentKind::kSigmaMinStudy:
      c.id = "sigmamin";
      c.ks = {full ? std::size_t{50} : std::size_t{20}};
      c.lambdas = full ? parse_number_list("1:25:1") : std::vector<double>{2, 4, 8, 16, 24};
      c.orders = {1, 2};
      c.ensemble = Ensemble::kGaussianScaled;
      c.trials = full ? 1000 : 200;
      break;
    case ExperimentKind::kInfNormStudy:
      c.id = "infnorm";
      c.ks = {20};
      c.lambdas = {2, 4, 8, 16, 24};
      c.trials = full ? 1000 : 200;
      break;
    case ExperimentKind::kSpectralSuite:
      c.id = "spectral";
      c.orders = {1, 2, 3, 4};
      c.spectral_ms = full ? parse_size_list("16,32,64,128,256,512") : parse_size_list("16,32,64,128");
      break;
    case ExperimentKind::kRateDistortion:
      c.id = "ratedistortion";
      c.ks = {20};
      c.lambdas = {2, 4, 8, 16, 24};
      c.orders = {1, 2, 3};
      c.floor = 1.0;
      c.scales = 4;
      break;
  }
  return c;
}

ExperimentConfig make_config(const ConfigMap& settings, ExperimentKind fallback_kind, bool full) {
  ExperimentKind kind = fallback_kind;
  if (auto it = settings.find("kind"); it != settings.end()) kind = parse_experiment_kind(it->second);
  ExperimentConfig c = default_config(kind, full);

  std::optional<std::vector<double>> mus;
  for (const auto& [key, value] : settings) {
    try {
      if (key == "kind") continue;
      if (key == "id") {
        require(!value.empty() && value.find_first_of(",|\n") == std::string::npos,
                "'id' must be nonempty without commas or '|'");
        c.id = value;
      } else if (key == "k") {
        c.ks = parse_size_list(value);
      } else if (key == "m") {
        c.ms = parse_size_list(value);
      } else if (key == "lambda") {
        c.lambdas = parse_number_list(value);
      } else if (key == "N") {
        c.n = parse_size(value, key);
      } else if (key == "schemes") {
        c.schemes.clear();
        for (const auto& token : parse_word_list(value)) {
          // leaky:<r> without mu takes 0.5 unless a 'mu' grid is given
          const bool bare_leaky = token.rfind("leaky:", 0) == 0 && split_token(token, ':').size() == 2;
          c.schemes.push_back(parse_scheme(bare_leaky ? token + ":0.5" : token));
        }
      } else if (key == "mu") {
        mus = parse_number_list(value);
      } else if (key == "r") {
        c.orders = parse_int_list(value, "r");
      } else if (key == "spectral_m") {
        c.spectral_ms = parse_size_list(value);
      } else if (key == "delta") {
        c.delta = parse_number(value, key);
      } else if (key == "alpha") {
        c.alpha = parse_number(value, key);
      } else if (key == "kprime") {
        c.kprime = parse_size(value, key);
      } else if (key == "signal") {
        c.signal = parse_magnitude_model(value);
      } else if (key == "ensemble") {
        c.ensemble = parse_ensemble(value);
      } else if (key == "bits") {
        c.bits = static_cast<int>(parse_size(value, key));
      } else if (key == "size_factor") {
        if (value == "auto") {
          c.auto_size = true;
        } else {
          c.auto_size = false;
          c.size_factor = parse_number(value, key);
        }
      } else if (key == "floor") {
        c.floor = parse_number(value, key);
      } else if (key == "scales") {
        c.scales = static_cast<int>(parse_size(value, key));
      } else if (key == "trials") {
        c.trials = parse_size(value, key);
      } else if (key == "seed") {
        const double v = parse_number(value, key);
        require(v >= 0 && std::floor(v) == v && v < 9007199254740992.0,
                "'seed' must be a nonnegative integer below 2^53");
        c.seed = static_cast<std::uint64_t>(v);
      } else if (key == "out") {
        c.output = value;
      } else if (key == "threads") {
        c.threads = parse_size(value, key);
      } else if (key == "timing") {
        c.record_timing = parse_bool(value, key);
      } else if (key == "verify") {
        c.verify = parse_bool(value, key);
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("'" + key + "': " + e.what());
    }
  }

  if (mus) {
    // Re-expand every leaky scheme over the requested mu grid.
    std::vector<NoiseShaper> expanded;
    std::set<int> leaky_orders;
    for (const auto& s : c.schemes) {
      if (s.kind() == ShaperKind::kLeaky) {
        if (leaky_orders.insert(s.order()).second) {
          for (double mu : *mus) {
            try {
              expanded.push_back(NoiseShaper::leaky(s.order(), mu));
            } catch (const std::invalid_argument& e) {
              throw ConfigError(std::string("'mu': ") + e.what());
            }
          }
        }
      } else {
        expanded.push_back(s);
      }
    }
    require(!leaky_orders.empty(), "'mu' given but no leaky scheme configured");
    c.schemes = std::move(expanded);
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  require(c.trials >= 1 || c.kind == ExperimentKind::kSpectralSuite ||
              c.kind == ExperimentKind::kRateDistortion,
          "trials must be >= 1");
  require(!c.id.empty(), "experiment id must be nonempty");
  switch (c.kind) {
    case ExperimentKind::kEndToEnd: {
      require(!c.ks.empty() && !c.ms.empty() && !c.schemes.empty(), "k, m and schemes must be nonempty");
      require(c.delta > 0.0 && std::isfinite(c.delta), "delta must be positive");
      require(c.n >= 2, "N must be >= 2");
      require(c.ensemble != Ensemble::kGaussianScaled,
              "end-to-end runs need unit-variance Phi (ensemble gaussian or bernoulli)");
      require(c.bits == 0 || (c.bits >= 1 && c.bits <= 52), "bits must be 0 or 1..52");
      require(c.size_factor >= 0.0, "size_factor must be >= 0");
      for (std::size_t k : c.ks) {
        require(k >= 1 && k < c.n, "k must satisfy 1 <= k < N");
        const std::size_t kp = c.kprime == 0 ? k : c.kprime;
        require(kp >= k && kp <= c.n - 1, "kprime must satisfy k <= k' <= N-1");
        for (std::size_t m : c.ms) require(m >= kp, "every m must be >= k'");
      }
      break;
    }
    case ExperimentKind::kSigmaMinStudy:
      require(!c.ks.empty() && !c.lambdas.empty() && !c.orders.empty(), "k, lambda and r must be nonempty");
      for (int r : c.orders) require(r >= 1, "r must be >= 1");
      for (std::size_t k : c.ks) {
        require(k >= 1, "k must be >= 1");
        for (double l : c.lambdas) require(rows_for(l, k) >= k, "lambda must be >= 1");
      }
      break;
    case ExperimentKind::kInfNormStudy:
      require(!c.ks.empty() && !c.lambdas.empty(), "k and lambda must be nonempty");
      require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
      for (std::size_t k : c.ks) {
        for (double l : c.lambdas) rows_for(l, k);
      }
      break;
    case ExperimentKind::kSpectralSuite:
      require(!c.orders.empty() && !c.spectral_ms.empty(), "r and spectral_m must be nonempty");
      for (int r : c.orders) require(r >= 1, "r must be >= 1");
      for (std::size_t m : c.spectral_ms) require(m >= 1 && m <= 4096, "spectral_m must be in 1..4096");
      break;
    case ExperimentKind::kRateDistortion:
      require(!c.ks.empty() && !c.lambdas.empty() && !c.orders.empty(), "k, lambda and r must be nonempty");
      require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
      require(c.floor > 0.0, "floor must be positive");
      for (int r : c.orders) require(r >= 1, "r must be >= 1");
      for (std::size_t k : c.ks) {
        for (double l : c.lambdas) require(rows_for(l, k) >= k, "lambda must be >= 1");
      }
      break;
  }
}

double calibrate_size_factor(const Matrix& phi, std::size_t k, const NoiseShaper& shaper,
                             double delta, std::size_t pilot_trials, std::uint64_t seed) {
  if (pilot_trials == 0) throw std::invalid_argument("calibrate_size_factor: pilot_trials must be >= 1");
  double worst = 0.0;
  for (std::size_t t = 0; t < pilot_trials; ++t) {
    const SparseSignal x = sample_signal({phi.cols(), k, MagnitudeModel::kConstantUnitNorm,
                                          derive_seed(seed, {kPilotTag, k, t}), 0.0});
    const QuantizationResult qr = shape_quantize(measure(phi, x), shaper, Alphabet::unbounded(delta));
    RecoveryOptions options;
    options.skip_fine = true;
    const RecoveryResult rec = two_stage_recover(phi, qr.q, k, delta, shaper, options, &x);
    worst = std::max(worst, *rec.coarse_error);
  }
  return support_margin(k, k) * worst / delta;
}

RunOutcome run_experiment(const ExperimentConfig& config, const std::vector<TrialRecord>& completed,
                          const RecordSink& sink) {
  if (config.kind != ExperimentKind::kEndToEnd && config.kind != ExperimentKind::kSigmaMinStudy) {
    throw ConfigError("run_experiment handles sigmamin and endtoend kinds; use run_table_experiment");
  }
  validate(config);

  RunOutcome outcome;
  std::unordered_set<std::string> done;
  for (const auto& r : completed) done.insert(r.key());

  std::vector<Task> pending;
  for (auto& task : build_tasks(config)) {
    if (done.count(task.record.key())) {
      ++outcome.skipped;
    } else {
      pending.push_back(std::move(task));
    }
  }

  EndToEndContext ctx;
  ctx.config = &config;
  if (config.kind == ExperimentKind::kEndToEnd && !pending.empty()) {
    std::set<std::size_t> needed;
    for (const auto& t : pending) needed.insert(t.m);
    const std::size_t max_m = *std::max_element(config.ms.begin(), config.ms.end());
    // One Φ for the whole sweep; Φ^(m) is its top m rows.
    const Matrix phi = sample_matrix({config.ensemble, max_m, config.n, derive_seed(config.seed, {kPhiTag})});
    for (std::size_t m : config.ms) ctx.phis.emplace(m, phi.top_rows(m));
    if (config.signal == MagnitudeModel::kGaussian) {
      for (std::size_t k : config.ks) {
        double factor = config.size_factor;
        if (config.auto_size) {
          factor = 0.0;
          for (std::size_t m : config.ms) {
            for (const auto& s : config.schemes) {
              factor = std::max(factor, calibrate_size_factor(ctx.phis.at(m), k, s, config.delta, 3,
                                                              config.seed));
            }
          }
        }
        ctx.min_magnitude[k] = factor * config.delta;
      }
    }
  }

  std::vector<TrialRecord> fresh(pending.size());
  std::mutex sink_mutex;
  parallel_for(pending.size(), config.threads, [&](std::size_t i) {
    const Task& task = pending[i];
    TrialRecord r = task.record;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (config.kind == ExperimentKind::kSigmaMinStudy) {
        r.sigma_min = sigma_min_trial(task.order, task.m, task.k, config.ensemble, r.seed);
      } else {
        run_end_to_end_trial(ctx, task, r);
      }
    } catch (const std::exception& e) {
      clear_outcomes(r);
      r.failure = e.what();
    }
    if (config.record_timing && !r.failed()) {
      r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    fresh[i] = r;
    if (sink) {
      std::lock_guard lock(sink_mutex);
      sink(r);
    }
  });

  outcome.records = completed;
  for (auto& r : fresh) {
    if (r.failed()) ++outcome.failed;
    outcome.records.push_back(std::move(r));
  }
  outcome.executed = pending.size();
  for (const auto& r : completed) {
    if (r.failed()) ++outcome.failed;
  }
  return outcome;
}

RunOutcome run_to_csv(const ExperimentConfig& config) {
  if (config.output.empty()) throw ConfigError("output path is empty");
  std::vector<TrialRecord> completed = read_trial_csv(config.output);
  const auto failures = read_failure_sidecar(failure_sidecar_path(config.output));
  if (!failures.empty()) {
    std::unordered_map<std::string, std::string> reasons(failures.begin(), failures.end());
    for (auto& r : completed) {
      if (auto it = reasons.find(r.key()); it != reasons.end()) r.failure = it->second;
    }
  }
  // Rows of other experiments sharing the file are carried through untouched.

  const bool fresh_file = !std::filesystem::exists(config.output) ||
                          std::filesystem::file_size(config.output) == 0;
  std::ofstream append(config.output, std::ios::app);
  if (!append) throw std::runtime_error("cannot open " + config.output + " for writing");
  if (fresh_file) append << trial_csv_header() << '\n';
  append.flush();
  std::ofstream failure_log(failure_sidecar_path(config.output), std::ios::app);

  RunOutcome outcome = run_experiment(config, completed, [&](const TrialRecord& r) {
    append << to_csv_row(r) << '\n';
    append.flush();
    if (r.failure) {
      std::string reason = *r.failure;
      std::replace(reason.begin(), reason.end(), '\n', ' ');
      failure_log << r.key() << ',' << reason << '\n';
      failure_log.flush();
    }
  });
  append.close();
  failure_log.close();
  write_trial_csv(config.output, outcome.records);
  return outcome;
}

std::vector<CellSummary> summarize_records(const std::vector<TrialRecord>& records) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    auto [it, inserted] = groups.try_emplace(r.cell_key());
    if (inserted) order.push_back(r.cell_key());
    it->second.push_back(&r);
  }
  std::vector<CellSummary> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const auto& members = groups.at(key);
    CellSummary s;
    s.cell = cell_only(*members.front());
    std::vector<double> coarse, fine, sig;
    std::size_t supports = 0, support_known = 0;
    for (const TrialRecord* r : members) {
      ++s.trials;
      if (r->failed()) {
        ++s.failed;
        continue;
      }
      if (r->coarse_err) coarse.push_back(*r->coarse_err);
      if (r->fine_err) fine.push_back(*r->fine_err);
      if (r->sigma_min) sig.push_back(*r->sigma_min);
      if (r->support_exact) {
        ++support_known;
        if (*r->support_exact) ++supports;
      }
    }
    if (!coarse.empty()) s.coarse = summarize(coarse);
    if (!fine.empty()) s.fine = summarize(fine);
    if (!sig.empty()) {
      s.sigma_min = summarize(sig);
      s.worst_inverse_sigma = s.sigma_min.min > 0.0 ? 1.0 / s.sigma_min.min : 0.0;
    }
    s.support_rate = support_known ? static_cast<double>(supports) / static_cast<double>(support_known) : 0.0;
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const CellSummary& a, const CellSummary& b) {
    const auto ta = std::make_tuple(std::cref(a.cell.experiment_id), a.cell.k, a.cell.r,
                                    std::cref(a.cell.shaper), a.cell.mu.value_or(0.0), a.cell.m);
    const auto tb = std::make_tuple(std::cref(b.cell.experiment_id), b.cell.k, b.cell.r,
                                    std::cref(b.cell.shaper), b.cell.mu.value_or(0.0), b.cell.m);
    return ta < tb;
  });
  return out;
}

std::vector<SlopeRow> compute_slopes(const std::vector<CellSummary>& summaries) {
  // Series: everything in the cell key except m / lambda.
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const CellSummary*>> series;
  for (const auto& s : summaries) {
    const TrialRecord& c = s.cell;
    const std::string key = c.experiment_id + "|" + std::to_string(c.k) + "|" + opt_text(c.n) + "|" +
                            std::to_string(c.r) + "|" + c.shaper + "|" + opt_text(c.mu) + "|" +
                            opt_text(c.delta) + "|" + opt_text(c.kprime) + "|" +
                            c.signal_model.value_or("");
    auto [it, inserted] = series.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&s);
  }
  std::vector<SlopeRow> out;
  for (const auto& key : order) {
    const auto& cells = series.at(key);
    const TrialRecord& c = cells.front()->cell;
    auto fit = [&](const std::string& metric, auto value) {
      std::vector<double> x, y;
      for (const CellSummary* s : cells) {
        const double v = value(*s);
        if (!(v > 0.0)) return;
        x.push_back(s->cell.lambda);
        y.push_back(v);
      }
      if (x.size() < 3) return;
      SlopeRow row;
      row.experiment_id = c.experiment_id;
      row.k = c.k;
      row.r = c.r;
      row.shaper = c.shaper + (c.mu ? ":" + format_double(*c.mu) : "");
      row.metric = metric;
      row.fit = fit_loglog_slope(x, y);
      row.points = x.size();
      out.push_back(row);
    };
    const bool has_errors = cells.front()->coarse.count > 0;
    if (has_errors) {
      fit("coarse_mean", [](const CellSummary& s) { return s.coarse.count ? s.coarse.mean : 0.0; });
      fit("coarse_max", [](const CellSummary& s) { return s.coarse.count ? s.coarse.max : 0.0; });
      fit("fine_mean", [](const CellSummary& s) { return s.fine.count ? s.fine.mean : 0.0; });
      fit("fine_max", [](const CellSummary& s) { return s.fine.count ? s.fine.max : 0.0; });
    } else if (cells.front()->sigma_min.count > 0) {
      fit("worst_inv_sigma", [](const CellSummary& s) { return s.worst_inverse_sigma; });
    }
  }
  return out;
}

Table summary_table(const std::vector<CellSummary>& summaries) {
  Table t;
  t.columns = {"experiment_id", "k",          "m",           "lambda",        "N",
               "r",             "shaper",     "mu",          "delta",         "kprime",
               "signal_model",  "trials",     "failed",      "coarse_mean",   "coarse_min",
               "coarse_max",    "fine_mean",  "fine_min",    "fine_max",      "support_rate",
               "sigma_min_mean", "sigma_min_min", "worst_inv_sigma"};
  auto stat = [](const Summary& s, double v) { return s.count ? format_double(v) : std::string(); };
  for (const auto& s : summaries) {
    const TrialRecord& c = s.cell;
    const bool has_support = s.fine.count > 0;
    t.rows.push_back({c.experiment_id, std::to_string(c.k), std::to_string(c.m), format_double(c.lambda),
                      opt_text(c.n), std::to_string(c.r), c.shaper, opt_text(c.mu), opt_text(c.delta),
                      opt_text(c.kprime), c.signal_model.value_or(""), std::to_string(s.trials),
                      std::to_string(s.failed), stat(s.coarse, s.coarse.mean), stat(s.coarse, s.coarse.min),
                      stat(s.coarse, s.coarse.max), stat(s.fine, s.fine.mean), stat(s.fine, s.fine.min),
                      stat(s.fine, s.fine.max), has_support ? format_double(s.support_rate) : "",
                      stat(s.sigma_min, s.sigma_min.mean), stat(s.sigma_min, s.sigma_min.min),
                      s.sigma_min.count ? format_double(s.worst_inverse_sigma) : ""});
  }
  return t;
}

Table slope_table(const std::vector<SlopeRow>& slopes) {
  Table t;
  t.columns = {"experiment_id", "k", "r", "shaper", "metric", "slope", "intercept", "residual", "points"};
  for (const auto& s : slopes) {
    t.rows.push_back({s.experiment_id, std::to_string(s.k), std::to_string(s.r), s.shaper, s.metric,
                      format_double(s.fit.slope), format_double(s.fit.intercept),
                      format_double(s.fit.residual), std::to_string(s.points)});
  }
  return t;
}

Table run_table_experiment(const ExperimentConfig& c) {
  validate(c);
  Table t;
  switch (c.kind) {
    case ExperimentKind::kInfNormStudy: {
      t.columns = {"k", "lambda", "m", "trials", "max_ratio", "mean_ratio", "envelope"};
      for (std::size_t k : c.ks) {
        for (const auto& row : inf_norm_study(k, c.lambdas, c.trials, c.seed, c.alpha,
                                              c.ensemble == Ensemble::kGaussianScaled ? Ensemble::kGaussianUnit
                                                                                      : c.ensemble,
                                              c.threads)) {
          t.rows.push_back({std::to_string(k), format_double(row.lambda), std::to_string(row.m),
                            std::to_string(row.trials), format_double(row.max_ratio),
                            format_double(row.mean_ratio), format_double(row.envelope)});
        }
      }
      break;
    }
    case ExperimentKind::kRateDistortion: {
      t.columns = {"k", "lambda", "m", "r", "alpha", "floor", "scales", "step", "rho", "bits_exact",
                   "bits", "bits_approx", "distortion_sd", "distortion_pcm"};
      for (std::size_t k : c.ks) {
        for (int r : c.orders) {
          for (double lambda : c.lambdas) {
            const std::size_t m = rows_for(lambda, k);
            const RateDistortionPlan p = rate_distortion_plan(c.floor, c.scales, r, m, k, c.alpha);
            t.rows.push_back({std::to_string(k), format_double(lambda), std::to_string(m), std::to_string(r),
                              format_double(c.alpha), format_double(c.floor), std::to_string(c.scales),
                              format_double(p.step), format_double(p.rho), format_double(p.bits_exact),
                              std::to_string(p.bits), format_double(p.bits_approx),
                              format_double(p.distortion_sigma_delta), format_double(p.distortion_pcm)});
          }
        }
      }
      break;
    }
    case ExperimentKind::kSpectralSuite: {
      t.columns = {"r",          "m",          "d_spectrum_err", "dinv_sandwich_violations",
                   "commutator_rank", "corner_violations", "weyl_violations", "szego_sup_distance",
                   "sigma_min_dinv_r", "c1", "c2"};
      struct Job {
        int r;
        std::size_t m;
      };
      std::vector<Job> jobs;
      for (int r : c.orders) {
        for (std::size_t m : c.spectral_ms) jobs.push_back({r, m});
      }
      t.rows.resize(jobs.size());
      parallel_for(jobs.size(), c.threads, [&](std::size_t i) {
        const auto [r, m] = jobs[i];
        std::string d_err, sandwich, rank, corners, weyl, szego, smin, c1, c2;
        if (r == 1) {
          const auto exact = spectral::exact_singular_values_d(m);
          const auto numeric = singular_values(spectral::difference_power(1, m));
          double err = 0.0;
          for (std::size_t j = 0; j < m; ++j) err = std::max(err, std::abs(exact[j] - numeric[j]));
          d_err = format_double(err);
          sandwich = std::to_string(spectral::dinv_sandwich_violations(m));
        }
        if (m >= 2 * static_cast<std::size_t>(r)) {
          const auto report = spectral::commutator_rank_check(r, m);
          rank = std::to_string(report.rank);
          corners = std::to_string(report.corner_violations);
        }
        if (m >= 4 * static_cast<std::size_t>(r)) {
          weyl = std::to_string(spectral::weyl_sandwich_check(r, m).violations);
          const auto bounds = spectral::fit_power_law_bounds(r, m);
          c1 = format_double(bounds.c1);
          c2 = format_double(bounds.c2);
        }
        if (m >= 10) {
          const auto report = spectral::szego_distribution_check(r, m);
          szego = format_double(report.sup_distance);
          smin = format_double(report.sigma_min_inverse);
        }
        t.rows[i] = {std::to_string(r), std::to_string(m), d_err, sandwich, rank, corners, weyl, szego,
                     smin, c1, c2};
      });
      break;
    }
    default:
      throw ConfigError("run_table_experiment: " + to_string(c.kind) + " produces trial records");
  }
  return t;
}

void write_table_csv(const std::string& path, const Table& table) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    auto line = [&](const std::vector<std::string>& fields) {
      for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
      out << '\n';
    };
    line(table.columns);
    for (const auto& row : table.rows) line(row);
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string format_table(const Table& table) {
  std::vector<std::size_t> width(table.columns.size(), 0);
  auto measure_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
  };
  measure_row(table.columns);
  for (const auto& row : table.rows) measure_row(row);
  std::ostringstream out;
  auto print = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      out << (i ? "  " : "") << row[i] << std::string(width[i] - row[i].size(), ' ');
    }
    out << '\n';
  };
  print(table.columns);
  for (const auto& row : table.rows) print(row);
  return out.str();
}

void write_gnuplot_script(const std::string& path, const std::string& summary_csv,
                          const std::vector<CellSummary>& summaries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# data: " << summary_csv << "\n"
      << "set logscale xy\nset xlabel 'lambda = m/k'\nset key outside\n";

  std::vector<std::string> names;
  std::map<std::string, std::vector<const CellSummary*>> blocks;
  for (const auto& s : summaries) {
    const TrialRecord& c = s.cell;
    std::string name = c.experiment_id + "_k" + std::to_string(c.k) + "_" + c.shaper + std::to_string(c.r);
    if (c.mu) name += "_mu" + format_double(*c.mu);
    for (char& ch : name) {
      if (ch == '.' || ch == '-') ch = '_';
    }
    auto [it, inserted] = blocks.try_emplace(name);
    if (inserted) names.push_back(name);
    it->second.push_back(&s);
  }
  bool errors = false;
  for (const auto& name : names) {
    out << "$" << name << " << EOD\n";
    for (const CellSummary* s : blocks.at(name)) {
      if (s->fine.count) {
        errors = true;
        out << format_double(s->cell.lambda) << ' ' << format_double(s->fine.mean) << ' '
            << format_double(s->fine.max) << ' ' << format_double(s->coarse.mean) << '\n';
      } else if (s->sigma_min.count) {
        out << format_double(s->cell.lambda) << ' ' << format_double(s->worst_inverse_sigma) << '\n';
      }
    }
    out << "EOD\n";
  }
  auto plot = [&](const std::string& title, int column, const char* suffix) {
    out << "set title '" << title << "'\nplot ";
    for (std::size_t i = 0; i < names.size(); ++i) {
      out << (i ? ", " : "") << "$" << names[i] << " using 1:" << column << " with linespoints title '"
          << names[i] << suffix << "'";
    }
    out << "\npause -1\n";
  };
  if (names.empty()) return;
  if (errors) {
    plot("mean reconstruction error", 2, " fine");
    plot("max reconstruction error", 3, " fine");
    plot("mean coarse error", 4, " coarse");
  } else {
    plot("worst-case 1/sigma_min", 2, "");
  }
}

}  // namespace sdcs
