#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpacma/engine.hpp"
#include "tpacma/objectives.hpp"

namespace tpacma {

// Controller cells of an experiment grid. tpa_noise is TPA with beta = 0.1.
enum class ControllerCell { tpa, tpa_noise, tpa_legacy, csa };

ControllerCell parse_controller_cell(const std::string& name);
std::string to_string(ControllerCell c);

/// Raised by the configuration parser; carries every problem found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ExperimentConfig {
  std::vector<ObjectiveKind> objectives{ObjectiveKind::sphere};
  std::vector<int> dimensions{10};
  std::vector<ControllerCell> controllers{ControllerCell::tpa};
  std::vector<std::uint64_t> seeds{1};

  double noise_level = 1.0;
  double condition = 1e6;
  double initial_x = 3.0;  // every coordinate of the initial mean
  double initial_sigma = 2.0;

  std::optional<int> lambda;
  std::optional<double> beta;
  std::optional<double> c_alpha;
  MuPrimeRule mu_prime_rule = MuPrimeRule::half;

  TerminationCriteria termination{};
  int restarts = 0;

  std::filesystem::path out_dir = "results";
  int workers = 1;
  bool timestamp = true;

  std::vector<std::string> warnings;

  /// Run configuration of one grid cell.
  RunConfig cell_config(ObjectiveKind objective, int n, ControllerCell controller,
                        std::uint64_t seed) const;
  ObjectiveSpec objective_spec(ObjectiveKind objective, int n) const;
};

/// Flat key=value text, one pair per line; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Builds a configuration from key=value pairs (keys are the long flag
/// names without dashes). Throws ConfigError listing all problems at once.
ExperimentConfig config_from_values(const std::map<std::string, std::string>& values);

/// Command line front end: `--config FILE` is read first and every flag
/// given on the command line overrides the file. Throws ConfigError.
/// Returns std::nullopt after printing help when `--help` was requested.
std::optional<ExperimentConfig> parse_config(int argc, const char* const* argv, std::ostream& out);

/// "1,2,5" or "1-11" (inclusive ranges may be mixed with lists).
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

struct TraceHeader {
  std::string objective;
  int n = 0;
  std::string controller;
  std::uint64_t seed = 0;
  bool timestamp = true;
};

inline constexpr const char* kTraceColumns =
    "generation,evals,best_f,sigma,alpha_s,axis_ratio,trace_C";

void write_trace_csv(std::ostream& os, const RunResult& result, const StrategyParams& params,
                     const TraceHeader& header);

struct CellOutcome {
  ObjectiveKind objective = ObjectiveKind::sphere;
  int n = 0;
  ControllerCell controller = ControllerCell::tpa;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunResult result;
};

struct SummaryRow {
  std::string objective;
  int n = 0;
  std::string controller;
  int runs = 0;
  int successes = 0;
  int errors = 0;
  double median_evals = 0.0;  // evaluations to target, failures counted at budget
  double q1_evals = 0.0;
  double q3_evals = 0.0;
  double median_best_f = 0.0;
  double median_final_sigma = 0.0;
};

/// Linear-interpolation quantile of an unsorted sample, p in [0, 1].
double quantile(std::vector<double> sample, double p);

std::vector<SummaryRow> summarize(const std::vector<CellOutcome>& outcomes, long budget);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

struct ExperimentReport {
  std::vector<CellOutcome> outcomes;
  std::vector<SummaryRow> summary;
};

/// Runs the whole grid (concurrently up to config.workers), writes one trace
/// CSV per run and summary.csv into config.out_dir. Throws
/// std::runtime_error when the output directory is not writable.
ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace tpacma
