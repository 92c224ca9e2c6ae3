#include "crng/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace crng {
namespace {

constexpr double kBoundSlack = 1e-12;

void require_shape(const EnsembleSpec& spec, const FieldVector& z) {
  if (z.modulus() != spec.q) throw std::invalid_argument("field modulus mismatch");
  if (z.length() != spec.cols) throw std::invalid_argument("vector length mismatch");
}

// Distribution over GF(q)^rows of F d for the sparse ensemble, where d is
// fixed. Columns are independent, so this is the convolution of the scaled
// per-column output laws over the support of d.
std::vector<double> sparse_image_distribution(const EnsembleSpec& spec, const FieldVector& d,
                                              uint64_t budget) {
  const uint64_t group = spec.image_space_size();
  if (group == UINT64_MAX || group > budget)
    throw BudgetExceeded("sparse collision convolution exceeds budget");

  std::vector<double> dist(group, 0.0);
  dist[0] = 1.0;

  // single-column ensemble reused per support position
  EnsembleSpec column = spec;
  column.cols = 1;
  for (int c = 0; c < spec.cols; ++c) {
    if (d[c] == 0) continue;
    std::vector<double> col_dist(group, 0.0);
    uint64_t members = 0;
    for_each_member(column, [&](const HashFunction& f) {
      FieldVector scalar(spec.q, {d[c]});
      col_dist[f.apply(scalar).to_index()] += 1.0;
      ++members;
    });
    for (auto& x : col_dist) x /= static_cast<double>(members);

    std::vector<double> next(group, 0.0);
    for (uint64_t a = 0; a < group; ++a) {
      if (dist[a] == 0) continue;
      const FieldVector va = FieldVector::from_index(spec.q, spec.rows, a);
      for (uint64_t b = 0; b < group; ++b) {
        if (col_dist[b] == 0) continue;
        const FieldVector vb = FieldVector::from_index(spec.q, spec.rows, b);
        next[va.add(vb).to_index()] += dist[a] * col_dist[b];
      }
    }
    dist.swap(next);
  }
  return dist;
}

// Collision probability as a function of the difference vector; valid for the
// linear ensembles, and for the table ensemble constant off the diagonal.
double collision_probability_of_difference(const EnsembleSpec& spec, const FieldVector& d,
                                           uint64_t budget) {
  if (d.is_zero()) return 1.0;
  switch (spec.kind) {
    case EnsembleKind::UniformLinear:
    case EnsembleKind::RandomBinningTable:
      return 1.0 / static_cast<double>(spec.image_space_size());
    case EnsembleKind::SparseColumnWeight:
      return sparse_image_distribution(spec, d, budget)[0];
  }
  throw std::logic_error("unreachable");
}

}  // namespace

double collision_probability(const EnsembleSpec& spec, const FieldVector& z,
                             const FieldVector& z_prime, uint64_t budget) {
  spec.validate();
  require_shape(spec, z);
  require_shape(spec, z_prime);
  if (z == z_prime) return 1.0;
  if (spec.kind == EnsembleKind::RandomBinningTable)
    return 1.0 / static_cast<double>(spec.image_space_size());
  return collision_probability_of_difference(spec, z.sub(z_prime), budget);
}

CollisionEstimate collision_probability_mc(const EnsembleSpec& spec, const FieldVector& z,
                                           const FieldVector& z_prime, int trials, Rng& rng) {
  spec.validate();
  require_shape(spec, z);
  require_shape(spec, z_prime);
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  uint64_t hits = 0;
  for (int t = 0; t < trials; ++t) {
    const HashFunction f = sample_hash(spec, rng);
    if (f.apply(z) == f.apply(z_prime)) ++hits;
  }
  const double p = static_cast<double>(hits) / trials;
  return {p, 1.959963984540054 * std::sqrt(std::max(p * (1.0 - p), 1e-12) / trials)};
}

HashInequalityReport verify_hash_inequality(const EnsembleSpec& spec, double alpha, double beta,
                                            const FieldVector& z, uint64_t budget) {
  spec.validate();
  require_shape(spec, z);
  const uint64_t domain = spec.domain_size();
  if (domain == UINT64_MAX || domain > budget)
    throw BudgetExceeded("hash inequality domain exceeds budget");

  HashInequalityReport report;
  report.image_size = ensemble_image_size(spec, budget);
  report.threshold = alpha / static_cast<double>(report.image_size);
  double lhs = 0;
  for (uint64_t zi = 0; zi < domain; ++zi) {
    const FieldVector zp = FieldVector::from_index(spec.q, spec.cols, zi);
    if (zp == z) continue;
    const double p = collision_probability(spec, z, zp, budget);
    if (p > report.threshold) lhs += p;
  }
  report.lhs = lhs;
  report.holds = lhs <= beta + kBoundSlack;
  return report;
}

HashProfile profile_ensemble(const EnsembleSpec& spec, uint64_t budget) {
  spec.validate();
  const uint64_t domain = spec.domain_size();
  if (domain == UINT64_MAX || domain > budget)
    throw BudgetExceeded("profile domain exceeds budget");
  const double image = static_cast<double>(ensemble_image_size(spec, budget));

  // Linear families: the collision probability depends on the difference
  // only, so the z-maximized sum equals the sum over nonzero differences.
  // The table family has a constant off-diagonal collision probability.
  std::vector<double> diff_probs;
  diff_probs.reserve(domain - 1);
  for (uint64_t di = 1; di < domain; ++di) {
    const FieldVector d = FieldVector::from_index(spec.q, spec.cols, di);
    diff_probs.push_back(spec.kind == EnsembleKind::RandomBinningTable
                             ? 1.0 / static_cast<double>(spec.image_space_size())
                             : collision_probability_of_difference(spec, d, budget));
  }

  const double alpha_grid[] = {1.0, 1.5, 2.0, 4.0, 8.0};
  HashProfile best;
  bool have = false;
  for (double alpha : alpha_grid) {
    const double threshold = alpha / image;
    double beta = 0;
    for (double p : diff_probs)
      if (p > threshold) beta += p;
    if (!have || beta < best.beta - kBoundSlack ||
        (std::abs(beta - best.beta) <= kBoundSlack && alpha < best.alpha)) {
      best = {alpha, beta, true};
      have = true;
    }
  }
  return best;
}

double composed_alpha(const std::vector<HashProfile>& profiles, uint64_t subset_mask) {
  double a = 1.0;
  for (size_t s = 0; s < profiles.size(); ++s)
    if (subset_mask & (uint64_t{1} << s)) a *= profiles[s].alpha;
  return a;
}

double composed_beta(const std::vector<HashProfile>& profiles, uint64_t subset_mask) {
  double b = 1.0;
  for (size_t s = 0; s < profiles.size(); ++s)
    if (subset_mask & (uint64_t{1} << s)) b *= profiles[s].beta + 1.0;
  return b - 1.0;
}

namespace {

struct BoundContext {
  size_t arity = 0;
  std::vector<HashProfile> profiles;
  std::vector<uint64_t> image_sizes;
  uint64_t tuple_count = 1;
};

BoundContext build_context(const std::vector<EnsembleSpec>& specs, const WeightedSet& t,
                           uint64_t budget) {
  if (specs.empty()) throw std::invalid_argument("at least one ensemble required");
  if (specs.size() > 3)
    throw std::invalid_argument("bound verifiers cover at most three sources");
  if (t.members.size() != t.weights.size())
    throw std::invalid_argument("weighted set member/weight count mismatch");
  BoundContext ctx;
  ctx.arity = specs.size();
  uint64_t tuples = 1;
  for (const auto& spec : specs) {
    spec.validate();
    ctx.profiles.push_back(profile_ensemble(spec, budget));
    ctx.image_sizes.push_back(ensemble_image_size(spec, budget));
    const uint64_t family = spec.family_size(budget);
    if (tuples > budget / family)
      throw BudgetExceeded("function tuple space exceeds enumeration budget");
    tuples *= family;
  }
  ctx.tuple_count = tuples;
  for (const auto& member : t.members) {
    if (member.size() != ctx.arity)
      throw std::invalid_argument("weighted set member arity mismatch");
    for (size_t s = 0; s < ctx.arity; ++s) {
      if (member[s].length() != specs[s].cols || member[s].modulus() != specs[s].q)
        throw std::invalid_argument("weighted set member shape mismatch");
    }
  }
  for (double w : t.weights)
    if (w < 0) throw std::invalid_argument("weights must be nonnegative");
  return ctx;
}

// Visits every tuple (f_1, ..., f_k) of the product ensemble.
void for_each_tuple(const std::vector<EnsembleSpec>& specs,
                    const std::function<void(const std::vector<const HashFunction*>&)>& fn,
                    uint64_t budget) {
  std::vector<std::vector<HashFunction>> families(specs.size());
  for (size_t s = 0; s < specs.size(); ++s)
    for_each_member(specs[s], [&](const HashFunction& f) { families[s].push_back(f); }, budget);
  std::vector<size_t> idx(specs.size(), 0);
  std::vector<const HashFunction*> tuple(specs.size());
  for (;;) {
    for (size_t s = 0; s < specs.size(); ++s) tuple[s] = &families[s][idx[s]];
    fn(tuple);
    size_t s = 0;
    while (s < specs.size()) {
      if (++idx[s] < families[s].size()) break;
      idx[s] = 0;
      ++s;
    }
    if (s == specs.size()) break;
  }
}

// Projection key of a tuple onto the sources in `mask`.
std::vector<uint64_t> projection_key(const std::vector<FieldVector>& member, uint64_t mask) {
  std::vector<uint64_t> key;
  for (size_t s = 0; s < member.size(); ++s)
    if (mask & (uint64_t{1} << s)) key.push_back(member[s].to_index());
  return key;
}

}  // namespace

BoundReport verify_balanced_coloring_bound(const std::vector<EnsembleSpec>& specs,
                                           const WeightedSet& t, uint64_t budget) {
  BoundContext ctx = build_context(specs, t, budget);
  double q_total = 0;
  for (double w : t.weights) q_total += w;
  if (q_total <= 0) throw std::invalid_argument("Q must carry positive mass on T");

  double bins_total = 1;
  for (uint64_t n : ctx.image_sizes) bins_total *= static_cast<double>(n);
  const double uniform = 1.0 / bins_total;

  // LHS: exact expectation over every function tuple of the total deviation
  // of normalized bin masses from uniform. Only occupied bins are touched;
  // empty bins contribute `uniform` each.
  double lhs = 0;
  for_each_tuple(
      specs,
      [&](const std::vector<const HashFunction*>& fs) {
        std::map<std::vector<uint64_t>, double> bin_mass;
        for (size_t m = 0; m < t.members.size(); ++m) {
          if (t.weights[m] == 0) continue;
          std::vector<uint64_t> bin(ctx.arity);
          for (size_t s = 0; s < ctx.arity; ++s)
            bin[s] = fs[s]->apply(t.members[m][s]).to_index();
          bin_mass[bin] += t.weights[m];
        }
        double dev = 0;
        for (const auto& [bin, mass] : bin_mass) dev += std::abs(mass / q_total - uniform);
        dev += (bins_total - static_cast<double>(bin_mass.size())) * uniform;
        lhs += dev;
      },
      budget);
  lhs /= static_cast<double>(ctx.tuple_count);

  // RHS from the per-source profiles and the conditional weight maxima.
  const uint64_t full = (uint64_t{1} << ctx.arity) - 1;
  const double beta_full_plus1 = composed_beta(ctx.profiles, full) + 1.0;
  double inner = composed_alpha(ctx.profiles, full) - 1.0;
  for (uint64_t mask = 1; mask <= full; ++mask) {
    // max over the mask-projection of the conditional Q-sums
    std::map<std::vector<uint64_t>, double> grouped;
    for (size_t m = 0; m < t.members.size(); ++m)
      grouped[projection_key(t.members[m], mask)] += t.weights[m];
    double q_bar = 0;
    for (const auto& [key, sum] : grouped) q_bar = std::max(q_bar, sum);

    double image_prod = 1;
    for (size_t s = 0; s < ctx.arity; ++s)
      if (mask & (uint64_t{1} << s)) image_prod *= static_cast<double>(ctx.image_sizes[s]);

    inner += composed_alpha(ctx.profiles, full & ~mask) * beta_full_plus1 * image_prod * q_bar /
             q_total;
  }
  BoundReport report;
  report.lhs = lhs;
  report.rhs = std::sqrt(std::max(inner, 0.0));
  report.holds = report.lhs <= report.rhs + kBoundSlack;
  return report;
}

BoundReport verify_collision_bound(const std::vector<EnsembleSpec>& specs, const WeightedSet& t,
                                   const std::vector<FieldVector>& z_s, uint64_t budget) {
  BoundContext ctx = build_context(specs, t, budget);
  if (z_s.size() != ctx.arity) throw std::invalid_argument("z_S arity mismatch");
  for (size_t s = 0; s < ctx.arity; ++s)
    if (z_s[s].length() != specs[s].cols || z_s[s].modulus() != specs[s].q)
      throw std::invalid_argument("z_S shape mismatch");

  uint64_t colliding_tuples = 0;
  for_each_tuple(
      specs,
      [&](const std::vector<const HashFunction*>& fs) {
        std::vector<uint64_t> target(ctx.arity);
        for (size_t s = 0; s < ctx.arity; ++s) target[s] = fs[s]->apply(z_s[s]).to_index();
        for (const auto& member : t.members) {
          if (member == z_s) continue;
          bool collide = true;
          for (size_t s = 0; s < ctx.arity && collide; ++s)
            collide = fs[s]->apply(member[s]).to_index() == target[s];
          if (collide) {
            ++colliding_tuples;
            break;
          }
        }
      },
      budget);

  const uint64_t full = (uint64_t{1} << ctx.arity) - 1;
  double rhs = composed_beta(ctx.profiles, full);
  for (uint64_t mask = 1; mask <= full; ++mask) {
    // max over the complement-projection of the member counts
    std::map<std::vector<uint64_t>, uint64_t> grouped;
    for (const auto& member : t.members) ++grouped[projection_key(member, full & ~mask)];
    uint64_t o_bar = 0;
    for (const auto& [key, count] : grouped) o_bar = std::max(o_bar, count);

    double image_prod = 1;
    for (size_t s = 0; s < ctx.arity; ++s)
      if (mask & (uint64_t{1} << s)) image_prod *= static_cast<double>(ctx.image_sizes[s]);

    rhs += composed_alpha(ctx.profiles, mask) * (composed_beta(ctx.profiles, full & ~mask) + 1.0) *
           static_cast<double>(o_bar) / image_prod;
  }

  BoundReport report;
  report.lhs = static_cast<double>(colliding_tuples) / static_cast<double>(ctx.tuple_count);
  report.rhs = rhs;
  report.holds = report.lhs <= report.rhs + kBoundSlack;
  return report;
}

}  // namespace crng
