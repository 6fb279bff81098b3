#pragma once

#include <functional>
#include <span>
#include <vector>

#include "recmix/mix_config.h"
#include "recmix/rng.h"

namespace recmix {

struct Atom {
  double position = 0.0;  // probability scale, in [0, 1]
  double weight = 0.0;
};

// Discrete distribution on [0, 1]: atoms sorted by position, equal positions
// merged, zero weights dropped, total weight 1 within 1e-12.
class WeightedEcdf {
 public:
  WeightedEcdf() = default;

  // Normalizes nothing: throws DomainError if positions leave [0, 1], a
  // weight is negative, or the weights do not sum to 1.
  static WeightedEcdf from_atoms(std::vector<Atom> atoms);
  // Plain ECDF: weight 1/n on each position.
  static WeightedEcdf plain(std::span<const double> positions);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // G(u): total weight on positions <= u.
  double cdf(double u) const;

  // Draws `count` positions by inverse CDF on the cumulative weights.
  std::vector<double> sample(int count, RngStream& rng) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;  // cumulative_[i] = weight through atom i
};

// n atoms of weight w/n and m atoms of weight (1-w)/m.
WeightedEcdf combine_ecdf(std::span<const double> real_us, std::span<const double> synth_us,
                          double w);

std::vector<double> sample_from_ecdf(const WeightedEcdf& f, int count, RngStream& rng);

// Exact Cramer-von Mises discrepancy against Uniform[0, 1]:
//   integral_0^1 (G(u) - u)^2 du,
// summed in closed form over the intervals between sorted atoms.
double cvm_error(const WeightedEcdf& f);

// Discrepancy against a discrete truth: sum_j p_j (G(x_j) - F(x_j))^2 over
// the truth atoms x_j with masses p_j.
double cvm_error_against(const WeightedEcdf& f, const WeightedEcdf& truth);

// E[cvm_error_against] for the plain ECDF of n draws from `truth`:
// sum_j p_j F(x_j) (1 - F(x_j)) / n. Equals 1/(6n) in the continuous limit.
double plain_ecdf_expected_error(const WeightedEcdf& truth, int n);

struct CdfTrajectory {
  std::vector<double> cvm_err;  // t = 0..T
};

using CdfObserver = std::function<void(int, const WeightedEcdf&)>;

// Uniform[0, 1] truth. Step 0 is the plain ECDF of n uniform draws; each later
// step draws m synthetic points from F_{t-1} and n fresh uniform points and
// combines them with weight w.
CdfTrajectory run_cdf_chain(const MixConfig& cfg, int steps, RngStream& rng,
                            const CdfObserver& observer = {});

// Same recursion with real draws taken from a discrete `truth` and errors
// from cvm_error_against.
CdfTrajectory run_cdf_chain(const WeightedEcdf& truth, const MixConfig& cfg, int steps,
                            RngStream& rng, const CdfObserver& observer = {});

}  // namespace recmix
