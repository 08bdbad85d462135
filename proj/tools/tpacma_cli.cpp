// Batch experiment runner: objectives x dimensions x controllers x seeds.
//
//   tpacma --objective sphere,rosenbrock --n 10,20 --controller tpa,csa \
//          --seeds 1-11 --budget 100000 --out results --workers 4
//
// Writes one trace CSV per run plus summary.csv into --out.

#include <iomanip>
#include <iostream>

#include "tpacma/experiment.hpp"

int main(int argc, char** argv) {
  using namespace tpacma;
  std::optional<ExperimentConfig> config;
  try {
    config = parse_config(argc, argv, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "tpacma: " << e.what() << "\n";
    return 2;
  }
  if (!config) return 0;
  for (const auto& w : config->warnings) std::cerr << "tpacma: warning: " << w << "\n";

  ExperimentReport report;
  try {
    report = run_experiment(*config, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "tpacma: " << e.what() << "\n";
    return 1;
  }

  std::cout << std::left << std::setw(16) << "objective" << std::setw(6) << "n" << std::setw(12)
            << "controller" << std::setw(10) << "success" << std::setw(14) << "median_evals"
            << std::setw(14) << "iqr" << "median_best_f\n";
  for (const auto& r : report.summary) {
    std::cout << std::left << std::setw(16) << r.objective << std::setw(6) << r.n << std::setw(12)
              << r.controller << std::setw(10)
              << (std::to_string(r.successes) + "/" + std::to_string(r.runs)) << std::setw(14)
              << r.median_evals << std::setw(14) << (r.q3_evals - r.q1_evals) << r.median_best_f
              << "\n";
  }
  return 0;
}
