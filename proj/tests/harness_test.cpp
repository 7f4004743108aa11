#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "ffdist/cli.hpp"
#include "ffdist/harness.hpp"

namespace {

using ffdist::ErrorKind;
using ffdist::Suite;
using ffdist::SuiteConfig;

namespace fs = std::filesystem;

std::optional<std::string> no_env(const std::string&) { return std::nullopt; }

ffdist::CliResult parse(std::vector<std::string> args, const ffdist::EnvLookup& env = no_env) {
  args.insert(args.begin(), "ffdist");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return ffdist::parse_cli(static_cast<int>(argv.size()), argv.data(), env);
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, const ffdist::EnvLookup& env = no_env) {
  args.insert(args.begin(), "ffdist");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ffdist::run_cli(static_cast<int>(argv.size()), argv.data(), out, err, env);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ffdist_harness_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

TEST(ParseCli, Defaults) {
  const auto cli = parse({"all"});
  const SuiteConfig& c = cli.config;
  EXPECT_EQ(c.suite, Suite::kAll);
  EXPECT_EQ(c.q_list, (std::vector<std::uint64_t>{7, 13, 19, 31}));
  EXPECT_EQ(c.d_list, (std::vector<unsigned>{2, 3}));
  EXPECT_EQ(c.n_list, (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(c.C, 3.0);
  EXPECT_EQ(c.trials, 50U);
  EXPECT_EQ(c.seed, 0U);
  EXPECT_EQ(c.envelope, 10.0);
  EXPECT_EQ(c.jobs, 1U);
  EXPECT_TRUE(c.output_dir.empty());
}

TEST(ParseCli, VerifyIdentities) {
  const auto cli = parse({"verify", "identities", "--q", "7,13", "--seed", "1"});
  EXPECT_EQ(cli.config.suite, Suite::kIdentities);
  EXPECT_EQ(cli.config.q_list, (std::vector<std::uint64_t>{7, 13}));
  EXPECT_EQ(cli.config.seed, 1U);
}

TEST(ParseCli, CoverageAcceptanceRun) {
  const auto cli = parse({"coverage", "--q", "13", "--d", "2", "--n", "3", "--C", "3", "--trials", "50"});
  EXPECT_EQ(cli.config.suite, Suite::kCoverage);
  EXPECT_EQ(cli.config.q_list, (std::vector<std::uint64_t>{13}));
  EXPECT_EQ(cli.config.d_list, (std::vector<unsigned>{2}));
  EXPECT_EQ(cli.config.n_list, (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(cli.config.C, 3.0);
  EXPECT_EQ(cli.config.trials, 50U);
}

TEST(ParseCli, UsageErrors) {
  auto usage_message = [](std::vector<std::string> args) -> std::string {
    try {
      parse(std::move(args));
    } catch (const ffdist::UsageError& e) {
      EXPECT_FALSE(e.help().empty());
      return e.what();
    }
    ADD_FAILURE() << "no usage error";
    return {};
  };
  EXPECT_NE(usage_message({"sphere-decay", "--q", "8"}).find("8 is not prime"), std::string::npos);
  EXPECT_NE(usage_message({"bogus"}).find("suite"), std::string::npos);
  EXPECT_FALSE(usage_message({}).empty());
  EXPECT_NE(usage_message({"all", "--d", "1"}).find("d_list"), std::string::npos);
  EXPECT_NE(usage_message({"all", "--n", "1"}).find("n_list"), std::string::npos);
  EXPECT_NE(usage_message({"all", "--envelope", "0"}).find("envelope"), std::string::npos);
  EXPECT_FALSE(usage_message({"all", "--trials", "-1"}).empty());
  EXPECT_FALSE(usage_message({"all", "--jobs", "0"}).empty());
  EXPECT_FALSE(usage_message({"all", "--format", "xml"}).empty());
}

TEST(ParseCli, Help) {
  const auto cli = parse({"--help"});
  EXPECT_TRUE(cli.help_requested);
  EXPECT_NE(cli.help_text.find("--trials"), std::string::npos);
}

TEST(ParseCli, EnvironmentOverrides) {
  const std::map<std::string, std::string> vars{{"FFDIST_OUTPUT_DIR", "/tmp/from-env"}, {"FFDIST_JOBS", "3"}};
  auto env = [&](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    return it == vars.end() ? std::nullopt : std::optional<std::string>(it->second);
  };
  const auto from_env = parse({"all"}, env);
  EXPECT_EQ(from_env.config.output_dir, "/tmp/from-env");
  EXPECT_EQ(from_env.config.jobs, 3U);
  const auto from_flags = parse({"all", "--out", "/tmp/flag", "--jobs", "2"}, env);
  EXPECT_EQ(from_flags.config.output_dir, "/tmp/flag");
  EXPECT_EQ(from_flags.config.jobs, 2U);

  auto bad_env = [](const std::string& name) -> std::optional<std::string> {
    return name == "FFDIST_JOBS" ? std::optional<std::string>("many") : std::nullopt;
  };
  EXPECT_THROW(parse({"all"}, bad_env), ffdist::UsageError);
}

TEST(ParseCli, Formats) {
  const auto cli = parse({"all", "--format", "csv"});
  EXPECT_TRUE(cli.config.formats.csv);
  EXPECT_FALSE(cli.config.formats.jsonl);
  EXPECT_FALSE(cli.config.formats.summary);
}

TEST(ValidateConfig, FieldLevelMessages) {
  SuiteConfig c;
  c.q_list = {9};
  try {
    ffdist::run_suite(c);
    FAIL() << "expected InvalidConfig";
  } catch (const ffdist::Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidConfig);
    EXPECT_NE(std::string(e.what()).find("q_list"), std::string::npos);
  }
  c = SuiteConfig{};
  c.d_list = {};
  EXPECT_THROW(ffdist::validate_config(c), ffdist::Error);
  c = SuiteConfig{};
  c.C = -1;
  EXPECT_THROW(ffdist::validate_config(c), ffdist::Error);
}

TEST(RunSuite, IdentitiesPass) {
  SuiteConfig c;
  c.suite = Suite::kIdentities;
  c.q_list = {7, 13};
  c.seed = 1;
  const auto report = ffdist::run_suite(c);
  EXPECT_TRUE(report.pass);
  EXPECT_FALSE(report.identities.empty());
  EXPECT_FALSE(report.bounds.empty());
  for (const auto& check : report.identities) EXPECT_LT(check.residual, 1e-8);
  EXPECT_EQ(report.trivial_term_convention, "omit k=0 term");
  EXPECT_GT(report.maxima.at("cohomology_full_sum_ratio"), 0.0);
}

TEST(RunSuite, IdentitiesNoteSkippedFields) {
  SuiteConfig c;
  c.suite = Suite::kIdentities;
  c.q_list = {5};
  const auto report = ffdist::run_suite(c);
  EXPECT_TRUE(report.pass);
  ASSERT_EQ(report.notes.size(), 1U);
  EXPECT_NE(report.notes[0].find("q=5"), std::string::npos);
}

TEST(RunSuite, CoverageWithZeroTrials) {
  SuiteConfig c;
  c.suite = Suite::kCoverage;
  c.q_list = {13};
  c.trials = 0;
  const auto report = ffdist::run_suite(c);
  EXPECT_TRUE(report.pass);
  for (const auto& row : report.coverage) EXPECT_TRUE(row.experiment.trials.empty());
}

TEST(RunSuite, CoverageSkipsOversizedCells) {
  SuiteConfig c;
  c.suite = Suite::kCoverage;
  c.q_list = {7};
  c.d_list = {2};
  c.n_list = {2};
  c.trials = 3;
  const auto report = ffdist::run_suite(c);
  ASSERT_EQ(report.coverage.size(), 1U);
  EXPECT_EQ(report.coverage[0].kind, "two-set");
  ASSERT_FALSE(report.notes.empty());
  EXPECT_NE(report.notes[0].find("skipped"), std::string::npos);
}

TEST(RunSuite, FailedChecksFlipVerdict) {
  SuiteConfig c;
  c.suite = Suite::kSphereDecay;
  c.q_list = {7, 13};
  c.d_list = {2};
  c.n_list = {3};
  c.envelope = 0.5;
  const auto report = ffdist::run_suite(c);
  EXPECT_FALSE(report.pass);
  EXPECT_FALSE(report.failures.empty());
}

TEST(RunSuite, CsvIsByteIdenticalAcrossJobsAndRuns) {
  SuiteConfig c;
  c.q_list = {7, 13};
  c.trials = 6;
  c.seed = 9;
  const auto first = scratch_dir("jobs1");
  const auto second = scratch_dir("jobs4");
  const auto third = scratch_dir("jobs1b");
  c.output_dir = first.string();
  c.jobs = 1;
  ffdist::run_suite(c);
  c.output_dir = second.string();
  c.jobs = 4;
  ffdist::run_suite(c);
  c.output_dir = third.string();
  c.jobs = 1;
  ffdist::run_suite(c);
  for (const char* name : {"identities.csv", "bounds.csv", "sphere_decay.csv", "incidence.csv", "coverage.csv"}) {
    const auto a = slurp(first / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, slurp(second / name)) << name;
    EXPECT_EQ(a, slurp(third / name)) << name;
  }
  EXPECT_TRUE(fs::exists(first / "report.jsonl"));
  EXPECT_TRUE(fs::exists(first / "summary.txt"));
}

TEST(RunSuite, ReportFormats) {
  SuiteConfig c;
  c.suite = Suite::kSphereDecay;
  c.q_list = {7};
  c.d_list = {2};
  c.n_list = {3};
  const auto dir = scratch_dir("formats");
  c.output_dir = dir.string();
  const auto report = ffdist::run_suite(c);

  const auto csv = slurp(dir / "sphere_decay.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "q,d,n,j,sphere_size,zero_mode_re,zero_mode_dev,max_nonzero_mode,decay_constant,hypothesis_ok");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);

  std::ifstream jsonl(dir / "report.jsonl");
  std::string line;
  std::vector<nlohmann::json> records;
  while (std::getline(jsonl, line)) records.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(records.size(), 8U);
  EXPECT_EQ(records.front()["type"], "config");
  EXPECT_EQ(records.front()["rng"], std::string(ffdist::Rng::kAlgorithm));
  EXPECT_EQ(records.back()["type"], "summary");
  EXPECT_EQ(records.back()["pass"], report.pass);
  EXPECT_NE(slurp(dir / "summary.txt").find("verdict: PASS"), std::string::npos);
}

TEST(RunSuite, PointsFileIngestion) {
  const auto dir = scratch_dir("points");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "points.txt");
    ffdist::write_point_set(out, ffdist::sample_point_set(ffdist::make_field(13), 2, 60, 3));
  }
  SuiteConfig c;
  c.suite = Suite::kIncidence;
  c.q_list = {7};
  c.d_list = {2};
  c.n_list = {2, 3};
  c.trials = 2;
  c.points_file = (dir / "points.txt").string();
  const auto report = ffdist::run_suite(c);
  EXPECT_TRUE(report.pass);
  ASSERT_EQ(report.points.size(), 2U);
  std::size_t from_points = 0;
  for (const auto& row : report.incidence) from_points += row.source == "points";
  EXPECT_EQ(from_points, 2U * 12);

  c.points_file = (dir / "missing.txt").string();
  try {
    ffdist::run_suite(c);
    FAIL() << "expected a parse error";
  } catch (const ffdist::Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
  }
}

TEST(RunCli, ExitCodes) {
  std::string text;
  EXPECT_EQ(run({"verify", "identities", "--q", "7"}, &text), ffdist::kExitPass);
  EXPECT_NE(text.find("verdict: PASS"), std::string::npos);
  EXPECT_EQ(run({"sphere-decay", "--q", "7", "--d", "2", "--n", "3", "--envelope", "0.5"}, &text),
            ffdist::kExitCheckFailed);
  EXPECT_NE(text.find("verdict: FAIL"), std::string::npos);
  EXPECT_EQ(run({"sphere-decay", "--q", "8"}, &text), ffdist::kExitUsage);
  EXPECT_NE(text.find("not prime"), std::string::npos);
  EXPECT_EQ(run({"incidence", "--q", "7", "--points", "/nonexistent/file"}, &text), ffdist::kExitUsage);
  EXPECT_EQ(run({"--help"}, &text), ffdist::kExitPass);
}

TEST(Binary, ExitStatusOfInstalledTool) {
  auto status = [](const std::string& args) {
    const std::string command = std::string(FFDIST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(command.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("verify identities --q 7"), 0);
  EXPECT_EQ(status("sphere-decay --q 7 --d 2 --n 3 --envelope 0.5"), 1);
  EXPECT_EQ(status("sphere-decay --q 8"), 2);
}

}  // namespace
