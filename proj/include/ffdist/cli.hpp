#pragma once

// Command line: `ffdist [verify] <suite> [flags]`.

#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ffdist/error.hpp"
#include "ffdist/harness.hpp"

namespace ffdist {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, std::string help) : std::runtime_error(message), help_(std::move(help)) {}
  const std::string& help() const noexcept { return help_; }

 private:
  std::string help_;
};

struct CliResult {
  SuiteConfig config;
  bool help_requested = false;
  std::string help_text;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_environment(const std::string& name) {
  const char* value = std::getenv(name.c_str());
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

/// Maps argv to a validated SuiteConfig. FFDIST_OUTPUT_DIR and FFDIST_JOBS fill --out and --jobs when
/// those flags are absent. Throws UsageError carrying the help text.
inline CliResult parse_cli(int argc, const char* const* argv, const EnvLookup& env = process_environment) {
  std::vector<const char*> args(argv, argv + argc);
  if (args.size() > 1 && std::string(args[1]) == "verify") args.erase(args.begin() + 1);

  SuiteConfig config;
  std::string suite_name;
  std::vector<std::string> formats;

  CLI::App app{"Character-sum identities, sphere decay, incidence and distance coverage over F_q^d", "ffdist"};
  app.add_option("suite", suite_name, "identities | sphere-decay | incidence | coverage | all")
      ->required()
      ->check(CLI::IsMember({"identities", "sphere-decay", "incidence", "coverage", "all"}));
  app.add_option("--q", config.q_list, "comma-separated primes")->delimiter(',')->capture_default_str();
  app.add_option("--d", config.d_list, "comma-separated dimensions (2..4)")->delimiter(',')->capture_default_str();
  app.add_option("--n", config.n_list, "comma-separated norm exponents (>= 2)")->delimiter(',')->capture_default_str();
  app.add_option("--C", config.C, "coverage size multiplier")->capture_default_str();
  app.add_option("--trials", config.trials, "random trials per coverage or incidence cell")->capture_default_str();
  app.add_option("--seed", config.seed, "base RNG seed")->capture_default_str();
  app.add_option("--envelope", config.envelope, "envelope constant C_env for bound checks")->capture_default_str();
  auto* jobs = app.add_option("-j,--jobs", config.jobs, "worker threads (env FFDIST_JOBS)")->capture_default_str();
  auto* out = app.add_option("-o,--out", config.output_dir, "report directory (env FFDIST_OUTPUT_DIR)");
  app.add_option("--points", config.points_file, "point-set file to audit alongside the suite");
  app.add_option("--format", formats, "report formats among jsonl,csv,summary")
      ->delimiter(',')
      ->check(CLI::IsMember({"jsonl", "csv", "summary"}));

  const std::string help = app.help();
  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::CallForHelp&) {
    return {config, true, help};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), help);
  }

  config.suite = *parse_suite(suite_name);
  if (!formats.empty()) {
    config.formats = {false, false, false};
    for (const auto& f : formats) {
      if (f == "jsonl") config.formats.jsonl = true;
      if (f == "csv") config.formats.csv = true;
      if (f == "summary") config.formats.summary = true;
    }
  }
  if (out->count() == 0) {
    if (auto dir = env("FFDIST_OUTPUT_DIR")) config.output_dir = *dir;
  }
  if (jobs->count() == 0) {
    if (auto value = env("FFDIST_JOBS")) {
      try {
        std::size_t used = 0;
        const unsigned long parsed = std::stoul(*value, &used);
        if (used != value->size()) throw std::invalid_argument("trailing characters");
        config.jobs = static_cast<unsigned>(parsed);
      } catch (const std::exception&) {
        throw UsageError("FFDIST_JOBS: not a non-negative integer: " + *value, help);
      }
    }
  }

  try {
    validate_config(config);
  } catch (const Error& e) {
    throw UsageError(e.what(), help);
  }
  return {config, false, help};
}

/// Parses, runs and prints the summary. Returns 0 on pass, 1 on failed checks, 2 on usage or input errors.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                   const EnvLookup& env = process_environment) {
  CliResult cli;
  try {
    cli = parse_cli(argc, argv, env);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << e.help();
    return kExitUsage;
  }
  if (cli.help_requested) {
    out << cli.help_text;
    return kExitPass;
  }

  try {
    const ExperimentReport report = run_suite(cli.config);
    write_summary(out, report);
    return report.pass ? kExitPass : kExitCheckFailed;
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace ffdist
