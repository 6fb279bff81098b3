#pragma once

namespace recmix {

// Weighting and sizing shared by every recursion: weight w on the n fresh
// real samples, 1 - w on the m synthetic samples drawn from the previous fit.
struct MixConfig {
  double w = 1.0;
  int n = 2;
  int m = 2;

  double k() const { return static_cast<double>(n) / static_cast<double>(m); }

  // Throws DomainError unless 0 <= w <= 1 and n, m >= 2.
  void validate() const;
};

}  // namespace recmix
