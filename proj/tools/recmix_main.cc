#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "recmix/adult.h"
#include "recmix/analytics.h"
#include "recmix/emit.h"
#include "recmix/errors.h"
#include "recmix/scenario.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(recmix::ErrorCode code) {
  using recmix::ErrorCode;
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kDomainError:
      return kExitConfig;
    case ErrorCode::kMissingColumn:
    case ErrorCode::kUnparseableRow:
    case ErrorCode::kIoError:
      return kExitData;
    default:
      return kExitNumerical;
  }
}

// Writes every series and returns the numerical-failure exit status.
int finish(const recmix::ScenarioConfig& cfg, const std::vector<recmix::SweepResult>& results) {
  int failed = 0;
  int total = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    failed += r.total_failed();
    total += r.total_replications();
    if (cfg.output_path.empty()) {
      if (results.size() > 1) std::cout << "# " << r.label << "\n";
      std::cout << recmix::format_csv(r);
    } else {
      const std::string path =
          i == 0 ? cfg.output_path : recmix::series_path(cfg.output_path, r.label);
      recmix::emit_csv(r, path);
    }
  }
  if (!cfg.output_path.empty()) {
    recmix::emit_json(cfg, results,
                      std::filesystem::path(cfg.output_path).replace_extension(".json").string());
  }
  if (total > 0 && 2 * failed > total) {
    std::cerr << "recmix: " << failed << " of " << total << " replications failed\n";
    return kExitNumerical;
  }
  return 0;
}

void print_analysis(double k, int n, int m) {
  using namespace recmix;
  const double ws = optimal_weight(k);
  const double w0 = naive_weight(k);
  std::printf("k,%.17g\nn,%d\nm,%d\n", k, n, m);
  std::printf("optimal_weight,%.17g\nnaive_weight,%.17g\n", ws, w0);
  std::printf("c_factor_optimal,%.17g\nc_factor_naive,%.17g\n", c_factor(ws, k), c_factor(w0, k));
  std::printf("cov_threshold,%.17g\n", gaussian_cov_threshold(m));
  std::printf("cdf_optimal_weight,%.17g\n", cdf_optimal_weight(n, m));
  std::printf("cdf_no_improvement_threshold,%.17g\n", cdf_no_improvement_threshold(n, m));
  std::printf("w,c_factor,gauss_cov_limit,cdf_limit,cov_regime,cdf_regime\n");
  for (int i = 1; i <= 20; ++i) {
    const double w = 0.05 * i;
    std::printf("%.17g,%.17g,%.17g,%.17g,%s,%s\n", w, c_factor(w, k),
                gaussian_cov_limit_finite(w, n, m, 1.0, 1.0), cdf_limit_error(w, n, m),
                to_string(classify_regime(RegimeSetting::kGaussianCov, w, n, m)).c_str(),
                to_string(classify_regime(RegimeSetting::kCdf, w, n, m)).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive training with real and synthetic data: simulations and closed forms"};
  app.require_subcommand(1);
  app.fallthrough();

  recmix::ScenarioConfig cfg;
  std::string config_path;
  std::string model = "gauss_mean";
  std::string w_grid;
  std::string k_grid;
  std::uint64_t seed = cfg.seed;
  double w = 0.618;

  app.add_option("--config", config_path, "Flat key-value config file");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  app.add_option("--out", cfg.output_path, "Output CSV path; JSON goes to the same stem with .json");

  auto add_shape = [&](CLI::App* sub) {
    sub->add_option("--model", model, "gauss_mean|gauss_cov|linear|logistic|poisson|cdf");
    sub->add_option("-n", cfg.n, "Real samples per step");
    sub->add_option("-m", cfg.m, "Synthetic samples per step");
    sub->add_option("-T,--steps", cfg.T, "Recursion steps");
    sub->add_option("--dim", cfg.dim, "Dimension p");
  };

  auto* simulate = app.add_subcommand("simulate", "Run one chain and write its trajectory");
  add_shape(simulate);
  simulate->add_option("-w", w, "Real-data weight");

  auto* sweep = app.add_subcommand("sweep", "Sweep w (golden_sweep) or k (k_sweep)");
  add_shape(sweep);
  sweep->add_option("-R,--replications", cfg.replications, "Replications per grid point");
  sweep->add_option("--w-grid", w_grid, "a:step:b or comma list");
  sweep->add_option("--k-grid", k_grid, "a:step:b or comma list; selects k_sweep");
  sweep->add_option("--tail-len", cfg.tail_len, "Tail window length");

  auto* collapse = app.add_subcommand("collapse-demo", "Mean error per step across replications");
  add_shape(collapse);
  collapse->add_option("-R,--replications", cfg.replications, "Replications");
  collapse->add_option("--w-grid", w_grid, "Weights, one series each");

  auto* analyze = app.add_subcommand("analyze", "Closed-form limits, weights and regimes");
  double k_analyze = 1.0;
  analyze->add_option("-k", k_analyze, "Ratio n/m");
  analyze->add_option("-n", cfg.n, "Real samples per step");
  analyze->add_option("-m", cfg.m, "Synthetic samples per step");

  auto* adult = app.add_subcommand("adult", "Adult census study: logistic and categorical sweeps");
  adult->add_option("--data", cfg.data_path, "Adult CSV with header row")->required();
  adult->add_option("-n", cfg.n, "Real samples per step");
  adult->add_option("-m", cfg.m, "Synthetic samples per step");
  adult->add_option("-T,--steps", cfg.T, "Recursion steps");
  adult->add_option("-R,--replications", cfg.replications, "Replications");
  adult->add_option("--w-grid", w_grid, "a:step:b or comma list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    // Config file first, then explicit command-line values on top.
    if (!config_path.empty()) {
      recmix::ScenarioConfig from_file = recmix::load_scenario_config(config_path, cfg);
      auto given = [&](const std::string& opt) {
        auto counted = [&](const CLI::App* a) {
          const CLI::Option* o = a->get_option_no_throw(opt);
          return o != nullptr && o->count() > 0;
        };
        if (counted(&app)) return true;
        for (const auto* sub : app.get_subcommands()) {
          if (counted(sub)) return true;
        }
        return false;
      };
      if (given("--threads")) from_file.threads = cfg.threads;
      if (given("--out")) from_file.output_path = cfg.output_path;
      if (given("-n")) from_file.n = cfg.n;
      if (given("-m")) from_file.m = cfg.m;
      if (given("-T")) from_file.T = cfg.T;
      if (given("--dim")) from_file.dim = cfg.dim;
      if (given("-R")) from_file.replications = cfg.replications;
      if (given("--tail-len")) from_file.tail_len = cfg.tail_len;
      if (given("--data")) from_file.data_path = cfg.data_path;
      if (!given("--model")) model = recmix::to_string(from_file.model);
      cfg = from_file;
      if (given("--seed")) cfg.seed = seed;
    } else {
      cfg.seed = seed;
    }
    cfg.model = recmix::parse_model_kind(model);
    if (!w_grid.empty()) cfg.w_grid = recmix::parse_grid(w_grid);
    if (!k_grid.empty()) cfg.k_grid = recmix::parse_grid(k_grid);

    if (*analyze) {
      print_analysis(k_analyze, cfg.n, cfg.m);
      return 0;
    }

    if (*simulate) {
      recmix::MixConfig mix{w, cfg.n, cfg.m};
      mix.validate();
      if (cfg.T < 1) recmix::fail(recmix::ErrorCode::kConfigError, "steps must be >= 1");
      const auto runner = recmix::make_model_runner(cfg.model, cfg.dim);
      recmix::RngStream rng(cfg.seed, recmix::RngStream::replication_stream(0));
      const recmix::ChainRun run = runner->run(mix, cfg.T, rng);
      const std::string out = cfg.output_path.empty() ? "/dev/stdout" : cfg.output_path;
      recmix::emit_trajectory_csv(run.errors, run.clamped, out);
      if (run.failed) {
        std::cerr << "recmix: chain failed: " << run.failure << "\n";
        return kExitNumerical;
      }
      return 0;
    }

    if (*sweep) {
      cfg.scenario = cfg.k_grid.empty() ? recmix::ScenarioKind::kGoldenSweep
                                        : recmix::ScenarioKind::kKSweep;
      if (cfg.scenario == recmix::ScenarioKind::kGoldenSweep && cfg.w_grid.empty()) {
        cfg.w_grid = recmix::parse_grid("0.2:0.02:0.8");
      }
      return finish(cfg, recmix::run_scenario(cfg));
    }

    if (*collapse) {
      cfg.scenario = recmix::ScenarioKind::kCollapseDemo;
      if (cfg.w_grid.empty()) cfg.w_grid = {0.0};
      return finish(cfg, recmix::run_scenario(cfg));
    }

    if (*adult) {
      cfg.scenario = recmix::ScenarioKind::kAdultStudy;
      if (cfg.w_grid.empty()) cfg.w_grid = recmix::parse_grid("0.2:0.02:0.8");
      const recmix::AdultDataset data = recmix::load_adult(cfg.data_path);
      const recmix::AdultStudyResult study = recmix::run_adult_study(data, cfg);
      std::vector<recmix::SweepResult> all{study.logistic};
      all.insert(all.end(), study.categorical.begin(), study.categorical.end());
      return finish(cfg, all);
    }
  } catch (const recmix::Error& e) {
    std::cerr << "recmix: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "recmix: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
