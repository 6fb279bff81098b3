#include "recmix/cdf_recursion.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "recmix/errors.h"

namespace recmix {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

double cube(double x) { return x * x * x; }

template <typename DrawReal, typename Error>
CdfTrajectory run_chain(const MixConfig& cfg, int steps, RngStream& rng, DrawReal&& draw_real,
                        Error&& error, const CdfObserver& observer) {
  cfg.validate();
  if (steps < 1) fail(ErrorCode::kDomainError, "run_cdf_chain: steps must be >= 1");
  CdfTrajectory traj;
  traj.cvm_err.reserve(static_cast<std::size_t>(steps) + 1);

  WeightedEcdf f = WeightedEcdf::plain(draw_real(cfg.n));
  traj.cvm_err.push_back(error(f));
  if (observer) observer(0, f);
  for (int t = 1; t <= steps; ++t) {
    const std::vector<double> synth = f.sample(cfg.m, rng);
    const std::vector<double> real = draw_real(cfg.n);
    f = combine_ecdf(real, synth, cfg.w);
    traj.cvm_err.push_back(error(f));
    if (observer) observer(t, f);
  }
  return traj;
}

}  // namespace

WeightedEcdf WeightedEcdf::from_atoms(std::vector<Atom> atoms) {
  CompensatedSum total;
  for (const Atom& a : atoms) {
    if (!(a.position >= 0.0 && a.position <= 1.0)) {
      fail(ErrorCode::kDomainError,
           "WeightedEcdf: position " + std::to_string(a.position) + " outside [0, 1]");
    }
    if (!(a.weight >= 0.0)) {
      fail(ErrorCode::kDomainError, "WeightedEcdf: negative weight");
    }
    total.add(a.weight);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    fail(ErrorCode::kDomainError,
         "WeightedEcdf: weights sum to " + std::to_string(total.value()) + ", expected 1");
  }

  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  WeightedEcdf out;
  out.atoms_.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (a.weight == 0.0) continue;
    if (!out.atoms_.empty() && out.atoms_.back().position == a.position) {
      out.atoms_.back().weight += a.weight;
    } else {
      out.atoms_.push_back(a);
    }
  }
  out.cumulative_.reserve(out.atoms_.size());
  CompensatedSum running;
  for (const Atom& a : out.atoms_) {
    running.add(a.weight);
    out.cumulative_.push_back(running.value());
  }
  return out;
}

WeightedEcdf WeightedEcdf::plain(std::span<const double> positions) {
  if (positions.empty()) fail(ErrorCode::kEmptySample, "WeightedEcdf::plain: no positions");
  const double weight = 1.0 / static_cast<double>(positions.size());
  std::vector<Atom> atoms;
  atoms.reserve(positions.size());
  for (double u : positions) atoms.push_back({u, weight});
  return from_atoms(std::move(atoms));
}

double WeightedEcdf::cdf(double u) const {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), u,
                                   [](double x, const Atom& a) { return x < a.position; });
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

std::vector<double> WeightedEcdf::sample(int count, RngStream& rng) const {
  if (atoms_.empty()) fail(ErrorCode::kEmptySample, "WeightedEcdf::sample: no atoms");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const double total = cumulative_.back();
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    out.push_back(atoms_[static_cast<std::size_t>(it - cumulative_.begin())].position);
  }
  return out;
}

WeightedEcdf combine_ecdf(std::span<const double> real_us, std::span<const double> synth_us,
                          double w) {
  if (!(w >= 0.0 && w <= 1.0)) fail(ErrorCode::kDomainError, "combine_ecdf: w outside [0, 1]");
  if ((w > 0.0 && real_us.empty()) || (w < 1.0 && synth_us.empty())) {
    fail(ErrorCode::kEmptySample, "combine_ecdf: empty group with positive weight");
  }
  std::vector<Atom> atoms;
  atoms.reserve(real_us.size() + synth_us.size());
  if (!real_us.empty()) {
    const double wr = w / static_cast<double>(real_us.size());
    for (double u : real_us) atoms.push_back({u, wr});
  }
  if (!synth_us.empty()) {
    const double ws = (1.0 - w) / static_cast<double>(synth_us.size());
    for (double u : synth_us) atoms.push_back({u, ws});
  }
  return WeightedEcdf::from_atoms(std::move(atoms));
}

std::vector<double> sample_from_ecdf(const WeightedEcdf& f, int count, RngStream& rng) {
  return f.sample(count, rng);
}

double cvm_error(const WeightedEcdf& f) {
  // On [left, right) G is the constant `level`; integral of (level - u)^2.
  double sum = 0.0;
  double left = 0.0;
  double level = 0.0;
  for (const Atom& a : f.atoms()) {
    sum += (cube(level - left) - cube(level - a.position)) / 3.0;
    left = a.position;
    level += a.weight;
  }
  sum += (cube(level - left) - cube(level - 1.0)) / 3.0;
  return std::max(sum, 0.0);
}

double cvm_error_against(const WeightedEcdf& f, const WeightedEcdf& truth) {
  double sum = 0.0;
  double truth_cdf = 0.0;
  for (const Atom& a : truth.atoms()) {
    truth_cdf += a.weight;
    const double d = f.cdf(a.position) - truth_cdf;
    sum += a.weight * d * d;
  }
  return sum;
}

double plain_ecdf_expected_error(const WeightedEcdf& truth, int n) {
  if (n < 1) fail(ErrorCode::kDomainError, "plain_ecdf_expected_error: n must be >= 1");
  double sum = 0.0;
  double truth_cdf = 0.0;
  for (const Atom& a : truth.atoms()) {
    truth_cdf += a.weight;
    sum += a.weight * truth_cdf * (1.0 - truth_cdf);
  }
  return sum / static_cast<double>(n);
}

CdfTrajectory run_cdf_chain(const MixConfig& cfg, int steps, RngStream& rng,
                            const CdfObserver& observer) {
  auto draw_uniform = [&rng](int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& u : out) u = rng.uniform();
    return out;
  };
  return run_chain(cfg, steps, rng, draw_uniform, [](const WeightedEcdf& f) { return cvm_error(f); },
                   observer);
}

CdfTrajectory run_cdf_chain(const WeightedEcdf& truth, const MixConfig& cfg, int steps,
                            RngStream& rng, const CdfObserver& observer) {
  auto draw_truth = [&](int count) { return truth.sample(count, rng); };
  auto error = [&truth](const WeightedEcdf& f) { return cvm_error_against(f, truth); };
  return run_chain(cfg, steps, rng, draw_truth, error, observer);
}

}  // namespace recmix
