#include "crng/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crng {
namespace {

// Empirical quantile with a deterministic convention: the order statistic at
// floor(q * (count - 1)) of the ascending sort.
double quantile(std::vector<double>& samples, double q) {
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  size_t idx = static_cast<size_t>(pos);
  idx = std::min(idx, samples.size() - 1);
  return samples[idx];
}

}  // namespace

SpectralEstimate spectral_entropy_estimate(const JointPMF& p, SpectralQuantity quantity,
                                           const std::vector<std::string>& target,
                                           const std::vector<std::string>& given, int n,
                                           int trials, double epsilon, Rng& rng,
                                           uint64_t budget) {
  if (n < 1 || trials < 1) throw std::invalid_argument("n and trials must be at least 1");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
  if (static_cast<uint64_t>(n) * static_cast<uint64_t>(trials) > budget)
    throw BudgetExceeded("n * trials exceeds the sampling budget");

  const bool conditional_quantity = quantity == SpectralQuantity::CondSupEntropyRate ||
                                    quantity == SpectralQuantity::InfInformationRate;
  if (!conditional_quantity && !given.empty())
    throw std::invalid_argument("unconditional quantity takes no conditioning variables");
  if (conditional_quantity && given.empty())
    throw std::invalid_argument("conditional quantity needs conditioning variables");

  // Per-letter tables; blocks factorize for the i.i.d. extension so the
  // block statistic is a sum of per-letter logs.
  const JointPMF target_marginal = p.marginal(target);
  std::vector<int> tgt_idx, giv_idx;
  for (const auto& name : target) tgt_idx.push_back(p.require_variable(name));
  for (const auto& name : given) giv_idx.push_back(p.require_variable(name));

  const ConditionalKernel cond_kernel =
      conditional_quantity ? conditional(p, target, given) : ConditionalKernel();

  std::vector<double> samples;
  samples.reserve(static_cast<size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      const Outcome o = p.sample(rng);
      Outcome tgt(tgt_idx.size()), giv(giv_idx.size());
      for (size_t k = 0; k < tgt_idx.size(); ++k) tgt[k] = o[static_cast<size_t>(tgt_idx[k])];
      for (size_t k = 0; k < giv_idx.size(); ++k) giv[k] = o[static_cast<size_t>(giv_idx[k])];
      switch (quantity) {
        case SpectralQuantity::SupEntropyRate:
        case SpectralQuantity::InfEntropyRate:
          acc += -std::log2(target_marginal.prob(tgt));
          break;
        case SpectralQuantity::CondSupEntropyRate:
          acc += -std::log2(cond_kernel.prob(tgt, giv));
          break;
        case SpectralQuantity::InfInformationRate:
          acc += std::log2(cond_kernel.prob(tgt, giv) / target_marginal.prob(tgt));
          break;
      }
    }
    samples.push_back(acc / n);
  }

  SpectralEstimate est;
  est.quantity = quantity;
  est.n = n;
  est.trials = trials;
  est.epsilon = epsilon;
  const bool sup = quantity == SpectralQuantity::SupEntropyRate ||
                   quantity == SpectralQuantity::CondSupEntropyRate;
  est.value = quantile(samples, sup ? 1.0 - epsilon : epsilon);
  return est;
}

}  // namespace crng
