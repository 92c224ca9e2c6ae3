#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "crng/budget.hpp"
#include "crng/ensemble.hpp"
#include "crng/vector.hpp"

namespace crng {

// (alpha, beta) pair witnessing the hash inequality for an ensemble:
// summing, over all z' != z whose collision probability with z exceeds
// alpha/|Im F|, the collision probability itself stays below beta, for every
// z. Two-universal families (uniform linear maps, random binning) carry
// (1, 0).
struct HashProfile {
  double alpha = 1.0;
  double beta = 0.0;
  bool exact = true;  // enumerated ensemble, not a Monte Carlo estimate
};

// p_F({f : f(z) = f(z')}), exact.
//   UniformLinear / RandomBinningTable: closed form q^-rows for z != z'.
//   SparseColumnWeight: convolution of the independent per-column output
//   distributions over the support of z - z' (exact; budget-limited by
//   q^rows).
double collision_probability(const EnsembleSpec& spec, const FieldVector& z,
                             const FieldVector& z_prime,
                             uint64_t budget = kDefaultEnumerationBudget);

// Monte Carlo estimate with a 95% CI half-width, for configurations whose
// exact path would exceed the budget. Cross-checked against the exact value
// in tests.
struct CollisionEstimate {
  double value = 0;
  double ci95_halfwidth = 0;
};
CollisionEstimate collision_probability_mc(const EnsembleSpec& spec, const FieldVector& z,
                                           const FieldVector& z_prime, int trials, Rng& rng);

struct HashInequalityReport {
  bool holds = false;
  double lhs = 0;          // the collision-probability sum for the worst z tested
  double threshold = 0;    // alpha / |Im F|
  uint64_t image_size = 0; // |Im F|
};

// Exact check of the hash inequality for one z.
HashInequalityReport verify_hash_inequality(const EnsembleSpec& spec, double alpha, double beta,
                                            const FieldVector& z,
                                            uint64_t budget = kDefaultEnumerationBudget);

// Smallest beta over a fixed alpha grid {1, 1.5, 2, 4, 8}, chosen by
// lexicographic (beta, alpha) order; beta is maximized over every z in the
// domain, so the returned pair satisfies the inequality for the whole space.
HashProfile profile_ensemble(const EnsembleSpec& spec,
                             uint64_t budget = kDefaultEnumerationBudget);

// Product-composition of per-source profiles: alpha multiplies, and the
// composed beta is prod(beta_s + 1) - 1.
double composed_alpha(const std::vector<HashProfile>& profiles, uint64_t subset_mask);
double composed_beta(const std::vector<HashProfile>& profiles, uint64_t subset_mask);

// A weighted subset of the product space prod_s GF(q)^(cols_s): member
// tuples and their nonnegative weights Q.
struct WeightedSet {
  std::vector<std::vector<FieldVector>> members;  // each entry: one tuple z_S
  std::vector<double> weights;                    // Q(z_S) >= 0
};

struct BoundReport {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};

// Balanced-coloring bound: the expected total deviation of the Q-mass of the
// bins from perfect balance, computed exactly by enumerating every function
// tuple and every bin, against the closed-form right side assembled from the
// per-source (alpha, beta) profiles and the set's conditional weight maxima.
BoundReport verify_balanced_coloring_bound(const std::vector<EnsembleSpec>& specs,
                                           const WeightedSet& t,
                                           uint64_t budget = kDefaultEnumerationBudget);

// Collision-resistance bound: the exact ensemble probability that some other
// member of T lands in the bin of z_S, against the closed-form right side.
BoundReport verify_collision_bound(const std::vector<EnsembleSpec>& specs, const WeightedSet& t,
                                   const std::vector<FieldVector>& z_s,
                                   uint64_t budget = kDefaultEnumerationBudget);

}  // namespace crng
