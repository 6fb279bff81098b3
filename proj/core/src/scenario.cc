#include "recmix/scenario.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "recmix/analytics.h"
#include "recmix/cdf_recursion.h"
#include "recmix/errors.h"
#include "recmix/gaussian_recursion.h"
#include "recmix/glm_recursion.h"

namespace recmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::kConfigError, "not a number: '" + t + "'");
  }
  if (used != t.size()) fail(ErrorCode::kConfigError, "not a number: '" + t + "'");
  return v;
}

class GaussianRunner : public ModelRunner {
 public:
  GaussianRunner(int dim, bool covariance)
      : truth_{Vec::Zero(dim), Mat::Identity(dim, dim)}, covariance_(covariance) {}

  ChainRun run(const MixConfig& mix, int steps, RngStream& rng) const override {
    const GaussianTrajectory traj = run_gaussian_chain(truth_, mix, steps, rng);
    ChainRun out;
    out.errors = covariance_ ? traj.cov_errors() : traj.mean_errors();
    out.clamped.reserve(traj.steps.size());
    for (const auto& s : traj.steps) out.clamped.push_back(s.clamped);
    if (!std::isfinite(out.errors.back())) {
      out.failed = true;
      out.failure = "non-finite estimate";
    }
    return out;
  }

 private:
  GaussianModel truth_;
  bool covariance_;
};

class GlmRunner : public ModelRunner {
 public:
  GlmRunner(GlmFamily family, int dim) {
    problem_.family = family;
    problem_.theta_star = Vec::Ones(dim);
    problem_.covariate_law = {Vec::Zero(dim), Mat::Identity(dim, dim) / dim};
  }

  ChainRun run(const MixConfig& mix, int steps, RngStream& rng) const override {
    const GlmTrajectory traj = run_glm_chain(problem_, mix, steps, rng);
    ChainRun out;
    out.errors = traj.theta_errors();
    out.clamped.assign(out.errors.size(), false);
    out.failed = traj.failed;
    out.failure = traj.failure;
    return out;
  }

 private:
  GlmProblem problem_;
};

class CdfRunner : public ModelRunner {
 public:
  ChainRun run(const MixConfig& mix, int steps, RngStream& rng) const override {
    ChainRun out;
    out.errors = run_cdf_chain(mix, steps, rng).cvm_err;
    out.clamped.assign(out.errors.size(), false);
    return out;
  }
};

// Tail estimate of one replication; +inf marks a failure.
double replicate_tail(const ModelRunner& runner, const MixConfig& mix, int steps, int tail_len,
                      std::uint64_t seed, int replication) {
  RngStream rng(seed, RngStream::replication_stream(static_cast<std::uint64_t>(replication)));
  try {
    const ChainRun run = runner.run(mix, steps, rng);
    if (run.failed) return kInf;
    return tail_limit_estimate(run.errors, tail_len);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDomainError) throw;
    return kInf;
  }
}

std::vector<SweepResult> run_golden_sweep(const ScenarioConfig& cfg, const ModelRunner& runner) {
  const int points = static_cast<int>(cfg.w_grid.size());
  const int reps = cfg.replications;
  std::vector<double> tails(static_cast<std::size_t>(points) * reps);
  // Replication r uses the same stream at every grid point.
  parallel_for(points * reps, cfg.threads, [&](int task) {
    const int g = task / reps;
    const int r = task % reps;
    const MixConfig mix{cfg.w_grid[g], cfg.n, cfg.m};
    tails[task] = replicate_tail(runner, mix, cfg.T, cfg.tail_len, cfg.seed, r);
  });
  SweepResult series{"sweep", {}};
  for (int g = 0; g < points; ++g) {
    GridPoint p = summarize(cfg.w_grid[g], std::span(tails).subspan(g * reps, reps));
    p.m = cfg.m;
    series.points.push_back(p);
  }
  return {series};
}

std::vector<SweepResult> run_k_sweep(const ScenarioConfig& cfg, const ModelRunner& runner) {
  const int points = static_cast<int>(cfg.k_grid.size());
  const int reps = cfg.replications;
  std::vector<int> ms(points);
  for (int g = 0; g < points; ++g) {
    ms[g] = std::max(2, static_cast<int>(std::lround(cfg.n / cfg.k_grid[g])));
  }
  // Task layout: (grid point, arm, replication); both arms share streams.
  std::vector<double> tails(static_cast<std::size_t>(points) * 2 * reps);
  parallel_for(points * 2 * reps, cfg.threads, [&](int task) {
    const int g = task / (2 * reps);
    const int arm = (task / reps) % 2;
    const int r = task % reps;
    const double k = cfg.k_grid[g];
    const double w = arm == 0 ? optimal_weight(k) : naive_weight(k);
    const MixConfig mix{w, cfg.n, ms[g]};
    tails[task] = replicate_tail(runner, mix, cfg.T, cfg.tail_len, cfg.seed, r);
  });
  SweepResult weighted{"weighted", {}};
  SweepResult naive{"naive", {}};
  for (int g = 0; g < points; ++g) {
    const auto base = std::span(tails).subspan(static_cast<std::size_t>(g) * 2 * reps, 2 * reps);
    GridPoint pw = summarize(cfg.k_grid[g], base.subspan(0, reps));
    GridPoint pn = summarize(cfg.k_grid[g], base.subspan(reps, reps));
    pw.m = pn.m = ms[g];
    weighted.points.push_back(pw);
    naive.points.push_back(pn);
  }
  return {weighted, naive};
}

std::vector<SweepResult> run_collapse_demo(const ScenarioConfig& cfg, const ModelRunner& runner) {
  const int reps = cfg.replications;
  const int len = cfg.T + 1;
  std::vector<SweepResult> out;
  for (double w : cfg.w_grid) {
    std::vector<double> errs(static_cast<std::size_t>(reps) * len, kInf);
    const MixConfig mix{w, cfg.n, cfg.m};
    parallel_for(reps, cfg.threads, [&](int r) {
      RngStream rng(cfg.seed, RngStream::replication_stream(static_cast<std::uint64_t>(r)));
      try {
        const ChainRun run = runner.run(mix, cfg.T, rng);
        std::copy(run.errors.begin(), run.errors.end(), errs.begin() + r * len);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kDomainError) throw;
      }
    });
    std::ostringstream label;
    label << "w" << w;
    SweepResult series{label.str(), {}};
    std::vector<double> at_t(reps);
    for (int t = 0; t < len; ++t) {
      for (int r = 0; r < reps; ++r) at_t[r] = errs[static_cast<std::size_t>(r) * len + t];
      GridPoint p = summarize(t, at_t);
      p.m = cfg.m;
      series.points.push_back(p);
    }
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace

std::string to_string(ScenarioKind s) {
  switch (s) {
    case ScenarioKind::kCollapseDemo:
      return "collapse_demo";
    case ScenarioKind::kGoldenSweep:
      return "golden_sweep";
    case ScenarioKind::kKSweep:
      return "k_sweep";
    case ScenarioKind::kAdultStudy:
      return "adult_study";
  }
  return "unknown";
}

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::kGaussMean:
      return "gauss_mean";
    case ModelKind::kGaussCov:
      return "gauss_cov";
    case ModelKind::kLinear:
      return "linear";
    case ModelKind::kLogistic:
      return "logistic";
    case ModelKind::kPoisson:
      return "poisson";
    case ModelKind::kCdf:
      return "cdf";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (auto s : {ScenarioKind::kCollapseDemo, ScenarioKind::kGoldenSweep, ScenarioKind::kKSweep,
                 ScenarioKind::kAdultStudy}) {
    if (to_string(s) == name) return s;
  }
  fail(ErrorCode::kConfigError, "unknown scenario '" + name + "'");
}

ModelKind parse_model_kind(const std::string& name) {
  for (auto m : {ModelKind::kGaussMean, ModelKind::kGaussCov, ModelKind::kLinear,
                 ModelKind::kLogistic, ModelKind::kPoisson, ModelKind::kCdf}) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorCode::kConfigError, "unknown model '" + name + "'");
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) fail(ErrorCode::kConfigError, "empty grid");
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_number(item));
    if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
      fail(ErrorCode::kConfigError, "grid '" + t + "' is not of the form a:step:b");
    }
    const double a = parts[0];
    const double step = parts[1];
    const double b = parts[2];
    // Index-based to avoid accumulating rounding; endpoint kept if within step/1e6.
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-6));
    for (long i = 0; i <= count; ++i) out.push_back(a + step * static_cast<double>(i));
    return out;
  }
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  return out;
}

void ScenarioConfig::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorCode::kConfigError, msg); };
  if (n < 2) bad("n must be >= 2");
  if (m < 2) bad("m must be >= 2");
  if (T < 1) bad("T must be >= 1");
  if (replications < 1) bad("replications must be >= 1");
  if (tail_len < 0) bad("tail_len must be >= 0");
  if (scenario != ScenarioKind::kCollapseDemo && tail_len >= T) bad("tail_len must be < T");
  if (dim < 1) bad("dim must be >= 1");
  if (threads < 0) bad("threads must be >= 0");
  if (scenario == ScenarioKind::kKSweep) {
    if (k_grid.empty()) bad("k_grid must be nonempty");
    for (double k : k_grid) {
      if (!(k > 0.0) || !std::isfinite(k)) bad("k_grid values must be positive");
    }
  } else {
    if (w_grid.empty()) bad("w_grid must be nonempty");
    for (double w : w_grid) {
      if (!(w >= 0.0 && w <= 1.0)) bad("w_grid values must lie in [0, 1]");
    }
  }
  if (scenario == ScenarioKind::kAdultStudy && data_path.empty()) {
    bad("adult_study needs data_path");
  }
}

int SweepResult::total_failed() const {
  int total = 0;
  for (const auto& p : points) total += p.failed;
  return total;
}

int SweepResult::total_replications() const {
  int total = 0;
  for (const auto& p : points) total += p.replications;
  return total;
}

double tail_limit_estimate(std::span<const double> traj_errors, int tail_len) {
  if (traj_errors.empty()) fail(ErrorCode::kEmptySample, "tail_limit_estimate: empty trajectory");
  const int steps = static_cast<int>(traj_errors.size()) - 1;
  if (tail_len < 0 || tail_len > steps) {
    fail(ErrorCode::kDomainError, "tail_limit_estimate: tail_len " + std::to_string(tail_len) +
                                      " outside [0, " + std::to_string(steps) + "]");
  }
  double sum = 0.0;
  for (int t = steps - tail_len; t <= steps; ++t) sum += traj_errors[t];
  return sum / (tail_len + 1);
}

GridPoint summarize(double grid_value, std::span<const double> values) {
  GridPoint p;
  p.grid_value = grid_value;
  p.replications = static_cast<int>(values.size());
  double sum = 0.0;
  int ok = 0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++ok;
    }
  }
  p.failed = p.replications - ok;
  if (ok == 0) {
    p.mean_error = p.ci_low = p.ci_high = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  const double mean = sum / ok;
  double ss = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) ss += (v - mean) * (v - mean);
  }
  const double se = ok > 1 ? std::sqrt(ss / (ok - 1) / ok) : 0.0;
  p.mean_error = mean;
  p.ci_low = mean - kZ95 * se;
  p.ci_high = mean + kZ95 * se;
  return p;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (!stop.load()) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

std::unique_ptr<ModelRunner> make_model_runner(ModelKind model, int dim) {
  switch (model) {
    case ModelKind::kGaussMean:
      return std::make_unique<GaussianRunner>(dim, false);
    case ModelKind::kGaussCov:
      return std::make_unique<GaussianRunner>(dim, true);
    case ModelKind::kLinear:
      return std::make_unique<GlmRunner>(GlmFamily::linear(1.0), dim);
    case ModelKind::kLogistic:
      return std::make_unique<GlmRunner>(GlmFamily::logistic(), dim);
    case ModelKind::kPoisson:
      return std::make_unique<GlmRunner>(GlmFamily::poisson(), dim);
    case ModelKind::kCdf:
      return std::make_unique<CdfRunner>();
  }
  fail(ErrorCode::kConfigError, "unknown model");
}

std::vector<SweepResult> run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto runner = make_model_runner(cfg.model, cfg.dim);
  switch (cfg.scenario) {
    case ScenarioKind::kGoldenSweep:
      return run_golden_sweep(cfg, *runner);
    case ScenarioKind::kKSweep:
      return run_k_sweep(cfg, *runner);
    case ScenarioKind::kCollapseDemo:
      return run_collapse_demo(cfg, *runner);
    case ScenarioKind::kAdultStudy:
      fail(ErrorCode::kConfigError, "adult_study runs through run_adult_study");
  }
  fail(ErrorCode::kConfigError, "unknown scenario");
}

}  // namespace recmix
