#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdcs/experiment.hpp"

using namespace sdcs;

namespace {

ExperimentConfig tiny_sweep() {
  ConfigMap s{{"kind", "endtoend"}, {"id", "tiny"},      {"k", "3"},         {"m", "40:80:20"},
              {"N", "128"},         {"schemes", "pcm,diff:1,diff:2"},       {"trials", "3"},
              {"seed", "7"},        {"threads", "1"}};
  return make_config(s, ExperimentKind::kEndToEnd, false);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST(ExperimentConfig, Defaults) {
  const auto sweep = default_config(ExperimentKind::kEndToEnd, false);
  EXPECT_EQ(sweep.ms.front(), 100u);
  EXPECT_EQ(sweep.ms.back(), 600u);
  EXPECT_EQ(sweep.schemes.size(), 3u);
  EXPECT_EQ(sweep.delta, 0.01);
  EXPECT_NO_THROW(validate(sweep));
  const auto full = default_config(ExperimentKind::kEndToEnd, true);
  EXPECT_EQ(full.n, 2000u);
  EXPECT_EQ(full.ms.back(), 1000u);
  EXPECT_EQ(full.trials, 100u);
  const auto study = default_config(ExperimentKind::kSigmaMinStudy, true);
  EXPECT_EQ(study.ks, (std::vector<std::size_t>{50}));
  EXPECT_EQ(study.trials, 1000u);
  for (auto kind : {ExperimentKind::kSigmaMinStudy, ExperimentKind::kInfNormStudy,
                    ExperimentKind::kSpectralSuite, ExperimentKind::kRateDistortion}) {
    EXPECT_NO_THROW(validate(default_config(kind, false))) << to_string(kind);
    EXPECT_EQ(parse_experiment_kind(to_string(kind)), kind);
  }
}

TEST(ExperimentConfig, RejectsBadSettings) {
  const auto bad = [](ConfigMap s) { return make_config(s, ExperimentKind::kEndToEnd, false); };
  EXPECT_THROW(bad({{"bogus", "1"}}), ConfigError);
  EXPECT_THROW(bad({{"k", "0"}}), ConfigError);
  EXPECT_THROW(bad({{"k", "10"}, {"m", "5"}}), ConfigError);
  EXPECT_THROW(bad({{"delta", "-1"}}), ConfigError);
  EXPECT_THROW(bad({{"schemes", "ternary"}}), ConfigError);
  EXPECT_THROW(bad({{"id", "a,b"}}), ConfigError);
  EXPECT_THROW(bad({{"ensemble", "gaussian_scaled"}}), ConfigError);
  EXPECT_THROW(bad({{"kind", "sigmamin"}, {"r", "0"}}), ConfigError);
  EXPECT_THROW(bad({{"kind", "nope"}}), ConfigError);
}

TEST(ExperimentConfig, SchemeTokens) {
  EXPECT_EQ(parse_scheme("pcm"), NoiseShaper::identity());
  EXPECT_EQ(parse_scheme("diff:2"), NoiseShaper::difference(2));
  EXPECT_EQ(parse_scheme("sd:3"), NoiseShaper::difference(3));
  EXPECT_EQ(parse_scheme("highpass:1"), NoiseShaper::high_pass(1));
  EXPECT_EQ(parse_scheme("leaky:2:0.25"), NoiseShaper::leaky(2, 0.25));
  for (const auto& s : {NoiseShaper::identity(), NoiseShaper::difference(3), NoiseShaper::leaky(1, 0.5)}) {
    EXPECT_EQ(parse_scheme(scheme_token(s)), s);
  }
  const auto c = make_config({{"schemes", "leaky:1"}, {"mu", "0.2,0.8"}}, ExperimentKind::kEndToEnd, false);
  ASSERT_EQ(c.schemes.size(), 2u);
  EXPECT_EQ(c.schemes[1].mu(), 0.8);
}

TEST(Experiment, RecordsAreIndependentOfThreadCount) {
  auto a_cfg = tiny_sweep();
  auto b_cfg = tiny_sweep();
  b_cfg.threads = 3;
  const auto a = run_experiment(a_cfg);
  const auto b = run_experiment(b_cfg);
  ASSERT_EQ(a.records.size(), 3u * 3u * 3u);
  EXPECT_EQ(a.failed, 0u);
  ASSERT_EQ(a.records.size(), b.records.size());
  std::map<std::string, std::string> rows;
  for (const auto& r : a.records) rows[r.key()] = to_csv_row(r);
  for (const auto& r : b.records) EXPECT_EQ(rows.at(r.key()), to_csv_row(r));
}

TEST(Experiment, SignalsSharedAcrossSchemesAndRows) {
  const auto out = run_experiment(tiny_sweep());
  std::map<std::size_t, std::uint64_t> seed_by_trial;
  for (const auto& r : out.records) {
    auto [it, inserted] = seed_by_trial.emplace(r.trial, r.seed);
    if (!inserted) EXPECT_EQ(it->second, r.seed);
  }
  EXPECT_EQ(seed_by_trial.size(), 3u);
}

TEST(Experiment, ResumeAndByteIdenticalOutput) {
  TempDir dir("sdcs_experiment_resume");
  auto cfg = tiny_sweep();
  cfg.output = dir.file("a.csv");
  const auto first = run_to_csv(cfg);
  EXPECT_EQ(first.executed, 27u);
  const std::string bytes = slurp(cfg.output);

  const auto again = run_to_csv(cfg);
  EXPECT_EQ(again.executed, 0u);
  EXPECT_EQ(again.skipped, 27u);
  EXPECT_EQ(slurp(cfg.output), bytes);

  // drop the tail of the file, as after an interruption
  {
    std::istringstream in(bytes);
    std::ofstream cut(cfg.output, std::ios::trunc);
    std::string line;
    for (int i = 0; i < 12 && std::getline(in, line); ++i) cut << line << '\n';
  }
  const auto resumed = run_to_csv(cfg);
  EXPECT_EQ(resumed.skipped, 11u);
  EXPECT_EQ(resumed.executed, 16u);
  EXPECT_EQ(slurp(cfg.output), bytes);

  auto other = tiny_sweep();
  other.threads = 2;
  other.output = dir.file("b.csv");
  run_to_csv(other);
  EXPECT_EQ(slurp(other.output), bytes);
}

TEST(Experiment, SummariesRecomputableFromCsv) {
  TempDir dir("sdcs_experiment_summary");
  auto cfg = tiny_sweep();
  cfg.output = dir.file("s.csv");
  const auto run = run_to_csv(cfg);
  const auto direct = summarize_records(run.records);
  const auto reread = summarize_records(read_trial_csv(cfg.output));
  EXPECT_EQ(format_table(summary_table(direct)), format_table(summary_table(reread)));
  ASSERT_EQ(direct.size(), 9u);
  for (const auto& s : direct) {
    EXPECT_EQ(s.trials, 3u);
    EXPECT_LE(s.fine.min, s.fine.mean);
    EXPECT_LE(s.fine.mean, s.fine.max);
  }
  const auto slopes = compute_slopes(direct);
  EXPECT_FALSE(slopes.empty());
  const auto table = slope_table(slopes);
  EXPECT_EQ(table.rows.size(), slopes.size());

  const std::string script = dir.file("s.gp");
  write_gnuplot_script(script, cfg.output + ".summary.csv", direct);
  const std::string text = slurp(script);
  EXPECT_NE(text.find("set logscale"), std::string::npos);
  EXPECT_NE(text.find("s.csv.summary.csv"), std::string::npos);
}

TEST(Experiment, SigmaMinRecords) {
  auto cfg = make_config({{"kind", "sigmamin"}, {"k", "5"}, {"lambda", "2,4,8"}, {"trials", "4"}, {"r", "1,2"}},
                         ExperimentKind::kSigmaMinStudy, false);
  const auto out = run_experiment(cfg);
  ASSERT_EQ(out.records.size(), 3u * 2u * 4u);
  for (const auto& r : out.records) {
    ASSERT_TRUE(r.sigma_min.has_value());
    EXPECT_GT(*r.sigma_min, 0.0);
    EXPECT_FALSE(r.fine_err.has_value());
  }
  const auto slopes = compute_slopes(summarize_records(out.records));
  bool found = false;
  for (const auto& s : slopes) found |= s.metric == "worst_inv_sigma";
  EXPECT_TRUE(found);
}

TEST(Experiment, TableKinds) {
  auto spectral = make_config({{"spectral_m", "16,32"}, {"r", "1,2"}}, ExperimentKind::kSpectralSuite, false);
  const Table t = run_table_experiment(spectral);
  EXPECT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.columns.front(), "r");
  for (const auto& row : t.rows) EXPECT_EQ(row.size(), t.columns.size());

  auto inf = make_config({{"k", "4"}, {"lambda", "2,8"}, {"trials", "5"}}, ExperimentKind::kInfNormStudy, false);
  EXPECT_EQ(run_table_experiment(inf).rows.size(), 2u);

  auto rd = default_config(ExperimentKind::kRateDistortion, false);
  EXPECT_FALSE(run_table_experiment(rd).rows.empty());

  EXPECT_THROW(run_table_experiment(tiny_sweep()), ConfigError);
}

TEST(Experiment, TimingOnlyWhenRequested) {
  auto cfg = tiny_sweep();
  cfg.ms = {40};
  cfg.trials = 1;
  for (const auto& r : run_experiment(cfg).records) EXPECT_FALSE(r.wall_ms.has_value());
  cfg.record_timing = true;
  for (const auto& r : run_experiment(cfg).records) EXPECT_TRUE(r.wall_ms.has_value());
}
