#include "tpacma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace tpacma {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

long to_long(const std::string& s) {
  // Accept "1e5" style budgets as long as they are integral.
  double v = to_double(s);
  if (v != std::floor(v) || std::abs(v) > 9e18) throw std::invalid_argument("not an integer");
  return static_cast<long>(v);
}

bool to_bool(const std::string& s) {
  if (s.empty() || s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw std::invalid_argument("not a boolean");
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "objective", "n",      "controller", "lambda",  "beta",      "c-alpha",
      "seeds",     "seed",   "budget",     "target-f", "restarts", "out",
      "workers",   "no-timestamp", "sigma0", "x0",    "noise-level", "condition",
      "mu-prime-rule", "tol-x", "tol-fun", "max-generations"};
  return keys;
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ControllerCell parse_controller_cell(const std::string& name) {
  if (name == "tpa") return ControllerCell::tpa;
  if (name == "tpa_noise") return ControllerCell::tpa_noise;
  if (name == "tpa_legacy") return ControllerCell::tpa_legacy;
  if (name == "csa") return ControllerCell::csa;
  throw std::invalid_argument("unknown controller '" + name +
                              "' (expected tpa, tpa_noise, tpa_legacy or csa)");
}

std::string to_string(ControllerCell c) {
  switch (c) {
    case ControllerCell::tpa: return "tpa";
    case ControllerCell::tpa_noise: return "tpa_noise";
    case ControllerCell::tpa_legacy: return "tpa_legacy";
    case ControllerCell::csa: return "csa";
  }
  return "?";
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("configuration errors:\n  - " + join(problems, "\n  - ")),
      problems_(std::move(problems)) {}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      seeds.push_back(static_cast<std::uint64_t>(to_long(part)));
      continue;
    }
    const long lo = to_long(part.substr(0, dash));
    const long hi = to_long(part.substr(dash + 1));
    if (lo < 0 || hi < lo) throw std::invalid_argument("bad seed range '" + part + "'");
    for (long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  }
  for (long s : seeds)
    if (s < 0) throw std::invalid_argument("seeds must be non-negative");
  return seeds;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path.string() + "'"});
  std::map<std::string, std::string> values;
  std::vector<std::string> problems;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      problems.push_back(path.string() + ":" + std::to_string(lineno) + ": empty key");
      continue;
    }
    values[normalize_key(key)] = trim(line.substr(eq + 1));
  }
  if (!problems.empty()) throw ConfigError(problems);
  return values;
}

ExperimentConfig config_from_values(const std::map<std::string, std::string>& raw) {
  std::map<std::string, std::string> values;
  for (const auto& [k, v] : raw) values[normalize_key(k)] = v;

  ExperimentConfig cfg;
  cfg.termination.target_f = 1e-9;
  std::vector<std::string> problems;
  const std::set<std::string> known(known_keys().begin(), known_keys().end());
  for (const auto& [k, v] : values)
    if (!known.count(k)) problems.push_back("unknown key '" + k + "'");

  // Applies `fn` to the value of `key` when present, recording failures.
  auto with = [&](const std::string& key, auto fn) {
    auto it = values.find(key);
    if (it == values.end()) return;
    try {
      fn(it->second);
    } catch (const std::exception& e) {
      problems.push_back("'" + key + "': invalid value '" + it->second + "' (" + e.what() + ")");
    }
  };

  with("objective", [&](const std::string& v) {
    cfg.objectives.clear();
    for (const auto& name : split(v, ',')) cfg.objectives.push_back(parse_objective_kind(name));
  });
  with("n", [&](const std::string& v) {
    cfg.dimensions.clear();
    for (const auto& d : split(v, ',')) {
      const long n = to_long(d);
      if (n < 1 || n > 100000) throw std::invalid_argument("dimension out of range");
      cfg.dimensions.push_back(static_cast<int>(n));
    }
  });
  with("controller", [&](const std::string& v) {
    cfg.controllers.clear();
    for (const auto& c : split(v, ',')) cfg.controllers.push_back(parse_controller_cell(c));
  });
  with("seed", [&](const std::string& v) { cfg.seeds = parse_seed_list(v); });
  with("seeds", [&](const std::string& v) { cfg.seeds = parse_seed_list(v); });
  with("lambda", [&](const std::string& v) {
    const long l = to_long(v);
    if (l < 2) throw std::invalid_argument("lambda must be >= 2");
    cfg.lambda = static_cast<int>(l);
  });
  with("beta", [&](const std::string& v) {
    cfg.beta = to_double(v);
    if (*cfg.beta < 0) throw std::invalid_argument("beta must be >= 0");
  });
  with("c-alpha", [&](const std::string& v) {
    cfg.c_alpha = to_double(v);
    if (!(*cfg.c_alpha > 0 && *cfg.c_alpha <= 1)) throw std::invalid_argument("c_alpha must lie in (0, 1]");
  });
  with("budget", [&](const std::string& v) {
    cfg.termination.max_evals = to_long(v);
    if (cfg.termination.max_evals < 0) throw std::invalid_argument("budget must be >= 0");
  });
  with("target-f", [&](const std::string& v) { cfg.termination.target_f = to_double(v); });
  with("tol-x", [&](const std::string& v) { cfg.termination.tol_x = to_double(v); });
  with("tol-fun", [&](const std::string& v) { cfg.termination.tol_fun = to_double(v); });
  with("max-generations", [&](const std::string& v) { cfg.termination.max_generations = to_long(v); });
  with("restarts", [&](const std::string& v) {
    const long r = to_long(v);
    if (r < 0) throw std::invalid_argument("restarts must be >= 0");
    cfg.restarts = static_cast<int>(r);
  });
  with("out", [&](const std::string& v) {
    if (v.empty()) throw std::invalid_argument("empty path");
    cfg.out_dir = v;
  });
  with("workers", [&](const std::string& v) {
    const long w = to_long(v);
    if (w < 1) throw std::invalid_argument("workers must be >= 1");
    cfg.workers = static_cast<int>(w);
  });
  with("no-timestamp", [&](const std::string& v) { cfg.timestamp = !to_bool(v); });
  with("sigma0", [&](const std::string& v) {
    cfg.initial_sigma = to_double(v);
    if (!(cfg.initial_sigma > 0)) throw std::invalid_argument("sigma0 must be positive");
  });
  with("x0", [&](const std::string& v) { cfg.initial_x = to_double(v); });
  with("noise-level", [&](const std::string& v) {
    cfg.noise_level = to_double(v);
    if (cfg.noise_level < 0) throw std::invalid_argument("noise level must be >= 0");
  });
  with("condition", [&](const std::string& v) {
    cfg.condition = to_double(v);
    if (!(cfg.condition > 0)) throw std::invalid_argument("condition must be positive");
  });
  with("mu-prime-rule", [&](const std::string& v) { cfg.mu_prime_rule = parse_mu_prime_rule(v); });

  if (cfg.objectives.empty()) problems.push_back("objective list is empty");
  if (cfg.dimensions.empty()) problems.push_back("dimension list is empty");
  if (cfg.controllers.empty()) problems.push_back("controller list is empty");
  if (cfg.seeds.empty()) problems.push_back("seed list is empty");
  if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
    problems.push_back("seeds must be distinct");
  try {
    cfg.termination.validate();
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }
  if (!problems.empty()) throw ConfigError(problems);

  // Parameter combinations are checked by deriving every cell's params once.
  for (int n : cfg.dimensions) {
    for (ControllerCell c : cfg.controllers) {
      try {
        resolve_params(cfg.cell_config(cfg.objectives.front(), n, c, cfg.seeds.front()));
      } catch (const std::exception& e) {
        problems.push_back("n=" + std::to_string(n) + ", " + to_string(c) + ": " + e.what());
      }
    }
  }
  if (!problems.empty()) throw ConfigError(problems);

  auto has = [&](ControllerCell c) {
    return std::find(cfg.controllers.begin(), cfg.controllers.end(), c) != cfg.controllers.end();
  };
  if (cfg.beta && has(ControllerCell::csa)) cfg.warnings.push_back("beta is not used by csa cells");
  if (cfg.beta && has(ControllerCell::tpa_legacy))
    cfg.warnings.push_back("beta is not used by tpa_legacy cells (legacy mode fixes beta = 0)");
  if (cfg.c_alpha && has(ControllerCell::csa)) cfg.warnings.push_back("c_alpha is not used by csa cells");
  return cfg;
}

std::optional<ExperimentConfig> parse_config(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"CMA-ES step-size control benchmark: TPA versus CSA", "tpacma"};
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value file; flags override its values");

  std::map<std::string, std::string> given;
  std::map<std::string, CLI::Option*> options;
  const std::map<std::string, std::string> help{
      {"objective", "comma list of sphere, ellipsoid, rosenbrock, rastrigin, noisy_sphere, random_fitness"},
      {"n", "comma list of dimensions"},
      {"controller", "comma list of tpa, tpa_noise, tpa_legacy, csa"},
      {"lambda", "population size override"},
      {"beta", "TPA update bias, applied to every TPA cell"},
      {"c-alpha", "TPA smoothing constant"},
      {"seeds", "seed list, e.g. 1-11 or 1,4,9"},
      {"seed", "alias of --seeds"},
      {"budget", "evaluation budget per run"},
      {"target-f", "stop once f < target (default 1e-9)"},
      {"restarts", "restarts with doubled lambda"},
      {"out", "output directory"},
      {"workers", "concurrent runs"},
      {"sigma0", "initial step-size (default 2)"},
      {"x0", "initial value of every coordinate (default 3)"},
      {"noise-level", "noisy_sphere noise strength (default 1)"},
      {"condition", "ellipsoid condition number (default 1e6)"},
      {"mu-prime-rule", "half or half_minus"},
      {"tol-x", "stop when sigma * max sqrt(C_ii) is below this"},
      {"tol-fun", "stop when recent best values span less than this"},
      {"max-generations", "generation limit"},
  };
  for (const auto& key : known_keys()) {
    if (key == "no-timestamp") continue;
    options[key] = app.add_option("--" + key, given[key], help.at(key));
  }
  auto* no_ts = app.add_flag("--no-timestamp", "omit the timestamp line in trace files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError({e.what()});
  }

  std::map<std::string, std::string> values;
  if (!config_path.empty()) values = read_config_file(config_path);
  for (const auto& [key, opt] : options)
    if (opt->count() > 0) values[key] = given[key];
  if (no_ts->count() > 0) values["no-timestamp"] = "true";
  return config_from_values(values);
}

ObjectiveSpec ExperimentConfig::objective_spec(ObjectiveKind objective, int n) const {
  ObjectiveSpec spec;
  spec.kind = objective;
  spec.n = n;
  spec.noise_level = noise_level;
  spec.condition = condition;
  return spec;
}

RunConfig ExperimentConfig::cell_config(ObjectiveKind, int n, ControllerCell controller,
                                        std::uint64_t seed) const {
  RunConfig rc;
  rc.n = n;
  rc.initial_mean = Vector::Constant(n, initial_x);
  rc.initial_sigma = initial_sigma;
  rc.seed = seed;
  rc.termination = termination;
  rc.overrides.lambda = lambda;
  rc.overrides.c_alpha = c_alpha;
  rc.overrides.mu_prime_rule = mu_prime_rule;
  switch (controller) {
    case ControllerCell::tpa:
      rc.controller = Controller::tpa;
      rc.overrides.beta_bias = beta;
      break;
    case ControllerCell::tpa_noise:
      rc.controller = Controller::tpa;
      rc.overrides.beta_bias = beta.value_or(0.1);
      break;
    case ControllerCell::tpa_legacy:
      rc.controller = Controller::tpa_legacy;
      break;
    case ControllerCell::csa:
      rc.controller = Controller::csa;
      rc.overrides.c_alpha.reset();
      break;
  }
  return rc;
}

void write_trace_csv(std::ostream& os, const RunResult& result, const StrategyParams& p,
                     const TraceHeader& h) {
  os << "# tpacma trace\n";
  if (h.timestamp) os << "# generated " << utc_timestamp() << "\n";
  os << "# objective=" << h.objective << " n=" << h.n << " controller=" << h.controller
     << " seed=" << h.seed << "\n";
  os << "# lambda=" << p.lambda << " mu=" << p.mu << " mu_prime=" << number(p.mu_prime)
     << " mu_w=" << number(p.mu_w) << " c_c=" << number(p.c_c) << " c_1=" << number(p.c_1)
     << " c_mu=" << number(p.c_mu) << " alpha_test=" << number(p.alpha_test)
     << " alpha_change=" << number(p.alpha_change) << " beta=" << number(p.beta_bias)
     << " c_alpha=" << number(p.c_alpha) << "\n";
  os << "# termination=" << to_string(result.reason) << " evals=" << result.evals
     << " best_f=" << number(result.best_f) << "\n";
  os << kTraceColumns << "\n";
  for (const auto& r : result.trace) {
    os << r.generation << ',' << r.evals << ',' << number(r.best_f) << ',' << number(r.sigma)
       << ',' << number(r.alpha_s) << ',' << number(r.axis_ratio) << ',' << number(r.trace_C)
       << '\n';
  }
}

double quantile(std::vector<double> sample, double p) {
  if (sample.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(sample.begin(), sample.end());
  const double pos = p * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (pos - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<CellOutcome>& outcomes, long budget) {
  std::vector<SummaryRow> rows;
  struct Samples {
    std::vector<double> evals, best_f, sigma;
  };
  std::vector<Samples> samples;
  for (const auto& o : outcomes) {
    const std::string objective = to_string(o.objective);
    const std::string controller = to_string(o.controller);
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) {
      return r.objective == objective && r.n == o.n && r.controller == controller;
    });
    if (it == rows.end()) {
      SummaryRow row;
      row.objective = objective;
      row.n = o.n;
      row.controller = controller;
      rows.push_back(row);
      samples.emplace_back();
      it = rows.end() - 1;
    }
    auto& s = samples[static_cast<std::size_t>(it - rows.begin())];
    ++it->runs;
    if (!o.ok) {
      ++it->errors;
      s.evals.push_back(static_cast<double>(budget));
      continue;
    }
    const bool success = o.result.reason == TerminationReason::target_f && o.result.evals_to_target;
    if (success) ++it->successes;
    s.evals.push_back(success ? static_cast<double>(*o.result.evals_to_target)
                              : static_cast<double>(budget));
    s.best_f.push_back(o.result.best_f);
    s.sigma.push_back(o.result.final_sigma);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].median_evals = quantile(samples[i].evals, 0.5);
    rows[i].q1_evals = quantile(samples[i].evals, 0.25);
    rows[i].q3_evals = quantile(samples[i].evals, 0.75);
    rows[i].median_best_f = quantile(samples[i].best_f, 0.5);
    rows[i].median_final_sigma = quantile(samples[i].sigma, 0.5);
  }
  return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "objective,n,controller,runs,successes,errors,median_evals,q1_evals,q3_evals,"
        "median_best_f,median_final_sigma\n";
  for (const auto& r : rows) {
    os << r.objective << ',' << r.n << ',' << r.controller << ',' << r.runs << ','
       << r.successes << ',' << r.errors << ',' << number(r.median_evals) << ','
       << number(r.q1_evals) << ',' << number(r.q3_evals) << ',' << number(r.median_best_f)
       << ',' << number(r.median_final_sigma) << '\n';
  }
}

ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream& log) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  const fs::path summary_path = config.out_dir / "summary.csv";
  {
    std::ofstream probe(summary_path);
    if (!probe) throw std::runtime_error("cannot write to output directory '" + config.out_dir.string() + "'");
  }

  std::vector<CellOutcome> outcomes;
  for (auto objective : config.objectives)
    for (int n : config.dimensions)
      for (auto controller : config.controllers)
        for (auto seed : config.seeds) {
          CellOutcome cell;
          cell.objective = objective;
          cell.n = n;
          cell.controller = controller;
          cell.seed = seed;
          outcomes.push_back(std::move(cell));
        }

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < outcomes.size(); i = next++) {
      CellOutcome& cell = outcomes[i];
      const std::string name = to_string(cell.objective) + "_n" + std::to_string(cell.n) + "_" +
                               to_string(cell.controller) + "_s" + std::to_string(cell.seed);
      try {
        const RunConfig rc = config.cell_config(cell.objective, cell.n, cell.controller, cell.seed);
        RestartPolicy policy;
        policy.max_restarts = config.restarts;
        cell.result = run_with_restarts(rc, make_objective(config.objective_spec(cell.objective, cell.n)),
                                        policy);
        std::ofstream csv(config.out_dir / (name + ".csv"), std::ios::trunc);
        if (!csv) throw std::runtime_error("cannot write " + name + ".csv");
        write_trace_csv(csv, cell.result, resolve_params(rc), {to_string(cell.objective), cell.n,
                        to_string(cell.controller), cell.seed, config.timestamp});
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      std::lock_guard lock(log_mutex);
      log << name << ": "
          << (cell.ok ? to_string(cell.result.reason) + " evals=" + std::to_string(cell.result.evals) +
                            " best_f=" + number(cell.result.best_f)
                      : "error: " + cell.error)
          << "\n";
    }
  };
  {
    std::vector<std::jthread> pool;
    const int count = std::max(1, std::min<int>(config.workers, static_cast<int>(outcomes.size())));
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  }

  ExperimentReport report;
  report.summary = summarize(outcomes, config.termination.max_evals);
  std::ofstream summary(summary_path, std::ios::trunc);
  write_summary_csv(summary, report.summary);
  if (!summary) throw std::runtime_error("failed writing " + summary_path.string());
  report.outcomes = std::move(outcomes);
  return report;
}

}  // namespace tpacma
