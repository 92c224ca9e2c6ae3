#pragma once

#include <string>
#include <vector>

#include "crng/pmf.hpp"
#include "crng/rng.hpp"

namespace crng {

// Finite-n surrogates for the spectral entropy/information rates. The limit
// quantities are probabilistic tails of (1/n) log 1/mu(block); here a fixed
// block length and a tail mass epsilon turn them into empirical quantiles,
// which converge to the Shannon values for i.i.d. sources.
enum class SpectralQuantity {
  SupEntropyRate,      // upper (1-eps) quantile of (1/n) log2 1/mu(U^n)
  InfEntropyRate,      // lower eps quantile of the same statistic
  CondSupEntropyRate,  // upper quantile of (1/n) log2 1/mu(U^n | V^n)
  InfInformationRate,  // lower quantile of (1/n) log2 mu(U^n|V^n)/mu(U^n)
};

struct SpectralEstimate {
  SpectralQuantity quantity = SpectralQuantity::SupEntropyRate;
  int n = 1;
  int trials = 1;
  double epsilon = 0.05;
  double value = 0;  // bits per symbol
};

// Draws `trials` i.i.d. n-blocks of the full joint, evaluates the per-block
// normalized statistic, and returns the requested quantile. `given` must be
// empty for the unconditional quantities.
SpectralEstimate spectral_entropy_estimate(const JointPMF& p, SpectralQuantity quantity,
                                           const std::vector<std::string>& target,
                                           const std::vector<std::string>& given, int n,
                                           int trials, double epsilon, Rng& rng,
                                           uint64_t budget = kDefaultEnumerationBudget);

}  // namespace crng
