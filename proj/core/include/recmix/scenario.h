#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "recmix/mix_config.h"
#include "recmix/rng.h"

namespace recmix {

enum class ScenarioKind { kCollapseDemo, kGoldenSweep, kKSweep, kAdultStudy };
enum class ModelKind { kGaussMean, kGaussCov, kLinear, kLogistic, kPoisson, kCdf };

std::string to_string(ScenarioKind s);
std::string to_string(ModelKind m);
// Both throw ConfigError on unknown names.
ScenarioKind parse_scenario_kind(const std::string& name);
ModelKind parse_model_kind(const std::string& name);

// "a:step:b" (inclusive, step > 0) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::kGoldenSweep;
  ModelKind model = ModelKind::kGaussMean;
  int n = 100;
  int m = 100;
  int T = 200;
  int replications = 100;
  std::vector<double> w_grid;
  std::vector<double> k_grid;
  std::uint64_t seed = 2025;
  int tail_len = 50;
  std::string output_path;
  int dim = 4;      // covariate / Gaussian dimension p
  int threads = 0;  // 0: one per hardware thread
  std::string data_path;  // Adult CSV for adult_study

  // Throws ConfigError.
  void validate() const;
};

// Flat key-value YAML document whose keys are ScenarioConfig field names.
// Values found in the file override `base`. Throws ConfigError.
ScenarioConfig load_scenario_config(const std::string& path, ScenarioConfig base = {});

struct GridPoint {
  double grid_value = 0.0;
  double mean_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int failed = 0;
  int replications = 0;
  int m = 0;  // synthetic sample size used at this point
};

struct SweepResult {
  std::string label;
  std::vector<GridPoint> points;

  int total_failed() const;
  int total_replications() const;
};

// Mean of the last tail_len + 1 entries. Throws DomainError when tail_len
// exceeds the number of steps.
double tail_limit_estimate(std::span<const double> traj_errors, int tail_len);

// Mean, 95% normal-approximation interval and failure count over the finite
// values in `values`; non-finite entries count as failures.
GridPoint summarize(double grid_value, std::span<const double> values);

// Runs fn(0), ..., fn(count - 1) on `threads` workers (0: hardware
// concurrency). The first exception thrown by any task is rethrown after
// all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

struct ChainRun {
  std::vector<double> errors;  // t = 0..T
  std::vector<bool> clamped;   // Gaussian models only; false elsewhere
  bool failed = false;
  std::string failure;
};

// One model's recursion with the truth fixed by the scenario conventions:
// Gaussian N(0, I_p); GLM covariates N(0, I/p), theta* = 1, unit linear
// noise; CDF Uniform[0, 1]. Safe to share across threads.
class ModelRunner {
 public:
  virtual ~ModelRunner() = default;
  virtual ChainRun run(const MixConfig& mix, int steps, RngStream& rng) const = 0;
};

std::unique_ptr<ModelRunner> make_model_runner(ModelKind model, int dim);

// Scenario dispatch. golden_sweep returns one series over w_grid;
// k_sweep returns "weighted" then "naive" over k_grid with m = round(n / k);
// collapse_demo returns one series per w over t = 0..T. adult_study is run
// through run_adult_study instead.
std::vector<SweepResult> run_scenario(const ScenarioConfig& cfg);

}  // namespace recmix
