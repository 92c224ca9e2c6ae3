#include "crng/source_code.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace crng {
namespace {

uint64_t checked_pow(uint64_t base, uint64_t exp, uint64_t cap, const char* what) {
  uint64_t r = 1;
  for (uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base)
      throw BudgetExceeded(std::string(what) + " exceeds enumeration budget");
    r *= base;
  }
  return r;
}

// Per-decoder working state: the posterior kernel of the decoded tuple given
// the side information, plus index arithmetic between letter cells and the
// decoder's own block ranks.
struct DecoderContext {
  const SourceCodeSpec* spec = nullptr;
  int j = 0;
  std::vector<int> dset;
  ConditionalKernel kernel;   // rows: side tuple cells, cols: decoded tuple cells
  uint64_t side_cells = 1;    // kernel rows
  uint64_t z_cells = 1;       // q^{|D|}, kernel columns
  std::vector<uint64_t> zcell_of_letter;  // decoded tuple cell per letter cell
  std::vector<uint32_t> ycell_of_letter;  // side tuple cell per letter cell

  DecoderContext(const SourceCodeSpec& s, int decoder) : spec(&s), j(decoder) {
    const SourceDecoder& dec = s.decoders[static_cast<size_t>(decoder)];
    dset = dec.decode_set;
    std::vector<std::string> targets;
    for (int si : dset) targets.push_back(s.sources[static_cast<size_t>(si)]);
    kernel = conditional(s.letter, targets, dec.side_info);
    side_cells = kernel.input_cells();
    z_cells = kernel.output_cells();

    zcell_of_letter.resize(s.letter.table_size());
    ycell_of_letter.resize(s.letter.table_size());
    std::vector<int> target_idx, side_idx;
    for (const auto& name : targets) target_idx.push_back(s.letter.require_variable(name));
    for (const auto& name : dec.side_info) side_idx.push_back(s.letter.require_variable(name));
    for (uint64_t cell = 0; cell < s.letter.table_size(); ++cell) {
      const Outcome o = s.letter.outcome_of(cell);
      uint64_t zc = 0;
      for (int ti : target_idx) zc = zc * s.q + o[static_cast<size_t>(ti)];
      uint64_t yc = 0;
      for (size_t k = 0; k < side_idx.size(); ++k)
        yc = yc * s.letter.variables()[static_cast<size_t>(side_idx[k])].size +
             o[static_cast<size_t>(side_idx[k])];
      zcell_of_letter[cell] = zc;
      ycell_of_letter[cell] = static_cast<uint32_t>(yc);
    }
  }

  // Combined tuple cell of the decoded sources at letter position t.
  uint64_t zcell_at(const std::vector<FieldVector>& z, int t) const {
    uint64_t zc = 0;
    for (size_t s = 0; s < z.size(); ++s) zc = zc * spec->q + z[s][t];
    return zc;
  }

  // Posterior block weight prod_t p(z_t | y_t); exact product, no logs.
  double block_weight(const std::vector<FieldVector>& z, const SideBlock& y) const {
    double w = 1.0;
    for (int t = 0; t < spec->n && w > 0; ++t)
      w *= kernel.row_by_index(y[static_cast<size_t>(t)])[zcell_at(z, t)];
    return w;
  }

  std::vector<CosetSystem> solve_cosets(const std::vector<FieldVector>& c) const {
    if (c.size() != dset.size())
      throw std::invalid_argument("codeword count does not match decode set");
    std::vector<CosetSystem> cosets;
    for (size_t k = 0; k < dset.size(); ++k)
      cosets.push_back(
          solve_affine(spec->encoders[static_cast<size_t>(dset[k])], c[k]));
    return cosets;
  }
};

// Decode order over a set of codeword cosets is the product walk: per-source
// Gray enumerations, last source fastest.
void walk_product(const std::vector<CosetSystem>& cosets, uint64_t budget,
                  const std::function<bool(const std::vector<FieldVector>&)>& fn) {
  walk_coset_product(cosets, budget, fn);
}

void require_side_block(const SourceCodeSpec& spec, const DecoderContext& ctx,
                        const SideBlock& y) {
  if (static_cast<int>(y.size()) != spec.n)
    throw std::invalid_argument("side-information block length mismatch");
  for (uint32_t cell : y)
    if (cell >= ctx.side_cells) throw std::invalid_argument("side-information cell out of range");
}

}  // namespace

void SourceCodeSpec::validate() const {
  check_prime_modulus(q);
  if (n < 1) throw std::invalid_argument("block length must be positive");
  if (sources.empty()) throw std::invalid_argument("no sources");
  if (encoders.size() != sources.size())
    throw std::invalid_argument("one encoder matrix per source required");
  for (size_t s = 0; s < sources.size(); ++s) {
    const int vi = letter.require_variable(sources[s]);
    if (letter.variables()[static_cast<size_t>(vi)].size != q)
      throw std::invalid_argument("source alphabet must equal the field size: " + sources[s]);
    if (encoders[s].cols() != n) throw std::invalid_argument("encoder column count must equal n");
    if (encoders[s].modulus() != q) throw std::invalid_argument("encoder field mismatch");
  }
  if (decoders.empty()) throw std::invalid_argument("no decoders");
  for (const auto& dec : decoders) {
    if (dec.decode_set.empty()) throw std::invalid_argument("decoder with empty decode set");
    std::set<int> seen;
    for (int si : dec.decode_set) {
      if (si < 0 || si >= static_cast<int>(sources.size()))
        throw std::invalid_argument("decode set index out of range");
      if (!seen.insert(si).second) throw std::invalid_argument("duplicate source in decode set");
    }
    for (const auto& name : dec.side_info) letter.require_variable(name);
  }
}

std::vector<FieldVector> encode(const SourceCodeSpec& spec, const std::vector<FieldVector>& z) {
  if (z.size() != spec.sources.size())
    throw std::invalid_argument("one block per source required");
  std::vector<FieldVector> c;
  c.reserve(z.size());
  for (size_t s = 0; s < z.size(); ++s) c.push_back(mat_vec_mul(spec.encoders[s], z[s]));
  return c;
}

DecodeResult crng_decode(const SourceCodeSpec& spec, int j, const std::vector<FieldVector>& c,
                         const SideBlock& y, Rng& rng, uint64_t budget) {
  DecoderContext ctx(spec, j);
  require_side_block(spec, ctx, y);
  auto cosets = ctx.solve_cosets(c);
  DecodeResult result;
  for (const auto& cs : cosets)
    if (cs.is_empty()) {
      result.failed = true;
      return result;
    }

  double total = 0;
  uint64_t count = 0;
  walk_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
    total += ctx.block_weight(z, y);
    ++count;
    return true;
  });

  if (total <= 0) {
    // Posterior carries no mass on the coset: the defining formula is 0/0.
    // Fall back to the uniform distribution on the coset and flag it.
    result.zero_mass_fallback = true;
    uint64_t pick = rng.below(count);
    walk_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
      if (pick == 0) {
        result.reproduction = z;
        return false;
      }
      --pick;
      return true;
    });
    return result;
  }

  const double u = rng.uniform() * total;
  double acc = 0;
  walk_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
    acc += ctx.block_weight(z, y);
    if (u < acc) {
      result.reproduction = z;
      return false;
    }
    return true;
  });
  if (result.reproduction.empty()) {
    // numeric leftovers: the last member takes the residual mass
    walk_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
      result.reproduction = z;
      return true;
    });
  }
  return result;
}

DecodeResult map_decode(const SourceCodeSpec& spec, int j, const std::vector<FieldVector>& c,
                        const SideBlock& y, uint64_t budget) {
  DecoderContext ctx(spec, j);
  require_side_block(spec, ctx, y);
  auto cosets = ctx.solve_cosets(c);
  DecodeResult result;
  for (const auto& cs : cosets)
    if (cs.is_empty()) {
      result.failed = true;
      return result;
    }
  double best = -1;
  walk_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
    const double w = ctx.block_weight(z, y);
    if (w > best) {  // strict: ties keep the first element in walk order
      best = w;
      result.reproduction = z;
    }
    return true;
  });
  return result;
}

std::map<uint64_t, double> shannon_entropy_table(const SourceCodeSpec& spec, int j) {
  spec.validate();
  const SourceDecoder& dec = spec.decoders[static_cast<size_t>(j)];
  std::map<uint64_t, double> table;
  const size_t d = dec.decode_set.size();
  for (uint64_t mask = 1; mask < (uint64_t{1} << d); ++mask) {
    std::vector<std::string> target, given = dec.side_info;
    for (size_t k = 0; k < d; ++k) {
      const std::string& name = spec.sources[static_cast<size_t>(dec.decode_set[k])];
      if (mask & (uint64_t{1} << k))
        target.push_back(name);
      else
        given.push_back(name);
    }
    table[mask] = spec.letter.entropy(target, given);
  }
  return table;
}

DecodeResult typicality_decode(const SourceCodeSpec& spec, int j,
                               const std::vector<FieldVector>& c, const SideBlock& y,
                               double epsilon, const std::map<uint64_t, double>& entropy_table,
                               uint64_t budget) {
  DecoderContext ctx(spec, j);
  require_side_block(spec, ctx, y);
  const SourceDecoder& dec = spec.decoders[static_cast<size_t>(j)];
  const size_t d = dec.decode_set.size();

  // Conditional kernels per nonempty subset of the decode set: the subset is
  // the target, its complement plus the side information the conditioning.
  // Conditioning cells are laid out as (given sources in decode order) * side
  // cell, so the observed side block plugs in directly.
  struct SubsetCheck {
    ConditionalKernel kernel;
    uint64_t mask = 0;
    double threshold = 0;  // n * (H + epsilon)
  };
  std::vector<SubsetCheck> checks;
  for (uint64_t mask = 1; mask < (uint64_t{1} << d); ++mask) {
    auto it = entropy_table.find(mask);
    if (it == entropy_table.end())
      throw std::invalid_argument("entropy table is missing a decode subset");
    std::vector<std::string> target, given;
    for (size_t k = 0; k < d; ++k) {
      const std::string& name = spec.sources[static_cast<size_t>(dec.decode_set[k])];
      (mask & (uint64_t{1} << k)) ? target.push_back(name) : given.push_back(name);
    }
    std::vector<std::string> conditioning = given;
    conditioning.insert(conditioning.end(), dec.side_info.begin(), dec.side_info.end());
    checks.push_back({conditional(spec.letter, target, conditioning), mask,
                      spec.n * (it->second + epsilon)});
  }

  auto cosets = ctx.solve_cosets(c);
  DecodeResult result;
  for (const auto& cs : cosets)
    if (cs.is_empty()) {
      result.failed = true;
      return result;
    }

  bool found = false;
  walk_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
    for (const auto& chk : checks) {
      double self_info = 0;
      for (int t = 0; t < spec.n; ++t) {
        uint64_t tcell = 0, gcell = 0;
        for (size_t k = 0; k < d; ++k) {
          if (chk.mask & (uint64_t{1} << k))
            tcell = tcell * spec.q + z[k][t];
          else
            gcell = gcell * spec.q + z[k][t];
        }
        gcell = gcell * ctx.side_cells + y[static_cast<size_t>(t)];
        const double p = chk.kernel.row_by_index(gcell)[tcell];
        if (p <= 0) {
          self_info = std::numeric_limits<double>::infinity();
          break;
        }
        self_info -= std::log2(p);
      }
      if (!(self_info <= chk.threshold)) return true;  // not typical, keep walking
    }
    result.reproduction = z;
    found = true;
    return false;
  });
  result.failed = !found;
  return result;
}

namespace {

// Per-decoder exact caches over (codeword tuple, side block) pairs: the
// posterior coset mass and the decoder's deterministic choice, built by
// walking every coset in the decode order itself so tie-breaking matches
// map_decode exactly.
struct ExactCaches {
  uint64_t y_blocks = 1;
  uint64_t z_blocks = 1;  // (q^{|D|})^n
  uint64_t c_space = 1;   // q^{sum of l_s over the decode set}
  std::vector<uint64_t> c_of_z;       // coset label per decoded block rank
  std::vector<double> coset_mass;     // [c * y_blocks + y]
  std::vector<uint64_t> chosen;       // MAP / typicality pick, UINT64_MAX = failure
  std::vector<double> chosen_weight;  // posterior weight of the chosen block
};

uint64_t block_rank_of(const DecoderContext& ctx, const std::vector<FieldVector>& z, int n) {
  uint64_t rank = 0;
  for (int t = 0; t < n; ++t) rank = rank * ctx.z_cells + ctx.zcell_at(z, t);
  return rank;
}

ExactCaches build_exact_caches(const SourceCodeSpec& spec, const DecoderContext& ctx,
                               DecoderKind kind, double epsilon, uint64_t budget) {
  ExactCaches caches;
  const auto& dset = ctx.dset;
  caches.y_blocks = checked_pow(ctx.side_cells, static_cast<uint64_t>(spec.n), budget,
                                "side-information block space");
  caches.z_blocks =
      checked_pow(ctx.z_cells, static_cast<uint64_t>(spec.n), budget, "decoded block space");
  uint64_t c_space = 1;
  for (int si : dset)
    c_space = checked_pow(spec.q,
                          static_cast<uint64_t>(spec.encoders[static_cast<size_t>(si)].rows()),
                          budget / std::max<uint64_t>(c_space, 1), "codeword space") *
              c_space;
  caches.c_space = c_space;
  if (caches.c_space > budget / caches.y_blocks)
    throw BudgetExceeded("codeword/side cache exceeds enumeration budget");
  if (caches.z_blocks > budget / caches.y_blocks)
    throw BudgetExceeded("decoded-block sweep exceeds enumeration budget");

  caches.c_of_z.assign(caches.z_blocks, 0);
  caches.coset_mass.assign(caches.c_space * caches.y_blocks, 0.0);
  const bool want_choice = kind != DecoderKind::Crng;
  if (want_choice) {
    caches.chosen.assign(caches.c_space * caches.y_blocks, UINT64_MAX);
    caches.chosen_weight.assign(caches.c_space * caches.y_blocks, 0.0);
  }

  const std::map<uint64_t, double> entropy_table =
      kind == DecoderKind::Typicality ? shannon_entropy_table(spec, ctx.j) : std::map<uint64_t, double>();

  // coset structure per codeword tuple, walked once in decode order
  std::vector<std::vector<uint64_t>> coset_elements(caches.c_space);
  for (uint64_t c_rank = 0; c_rank < caches.c_space; ++c_rank) {
    // decompose into per-source codewords, last source fastest
    std::vector<FieldVector> c(dset.size(), FieldVector(spec.q, 0));
    uint64_t x = c_rank;
    for (size_t k = dset.size(); k-- > 0;) {
      const int rows = spec.encoders[static_cast<size_t>(dset[k])].rows();
      const uint64_t space = checked_pow(spec.q, static_cast<uint64_t>(rows), UINT64_MAX - 1, "");
      c[k] = FieldVector::from_index(spec.q, rows, x % space);
      x /= space;
    }
    auto cosets = ctx.solve_cosets(c);
    bool empty = false;
    for (const auto& cs : cosets) empty = empty || cs.is_empty();
    if (empty) continue;
    walk_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
      const uint64_t rank = block_rank_of(ctx, z, spec.n);
      caches.c_of_z[rank] = c_rank;
      coset_elements[c_rank].push_back(rank);
      return true;
    });
  }

  // typicality thresholds, assembled once
  struct TypCheck {
    ConditionalKernel kernel;
    uint64_t mask = 0;
    double threshold = 0;
  };
  std::vector<TypCheck> typ_checks;
  if (kind == DecoderKind::Typicality) {
    const SourceDecoder& dec = spec.decoders[static_cast<size_t>(ctx.j)];
    const size_t d = dset.size();
    for (uint64_t mask = 1; mask < (uint64_t{1} << d); ++mask) {
      std::vector<std::string> target, given;
      for (size_t k = 0; k < d; ++k) {
        const std::string& name = spec.sources[static_cast<size_t>(dec.decode_set[k])];
        (mask & (uint64_t{1} << k)) ? target.push_back(name) : given.push_back(name);
      }
      std::vector<std::string> conditioning = given;
      conditioning.insert(conditioning.end(), dec.side_info.begin(), dec.side_info.end());
      typ_checks.push_back(
          {conditional(spec.letter, target, conditioning), mask,
           spec.n * (entropy_table.at(mask) + epsilon)});
    }
  }

  // weight of one decoded block under one side block; factors multiplied in
  // ascending letter order so the result is bit-identical to the main sweep's
  // running product
  std::vector<uint64_t> zc_digits(static_cast<size_t>(spec.n));
  auto weight_of = [&](uint64_t z_rank, const std::vector<uint32_t>& y_digits) {
    for (int t = spec.n - 1; t >= 0; --t) {
      zc_digits[static_cast<size_t>(t)] = z_rank % ctx.z_cells;
      z_rank /= ctx.z_cells;
    }
    double w = 1.0;
    for (int t = 0; t < spec.n && w > 0; ++t)
      w *= ctx.kernel.row_by_index(y_digits[static_cast<size_t>(t)])[zc_digits[static_cast<size_t>(t)]];
    return w;
  };

  // typicality membership by rank decomposition
  auto typical = [&](uint64_t z_rank, const std::vector<uint32_t>& y_digits) {
    std::vector<uint64_t> zc(static_cast<size_t>(spec.n));
    for (int t = spec.n - 1; t >= 0; --t) {
      zc[static_cast<size_t>(t)] = z_rank % ctx.z_cells;
      z_rank /= ctx.z_cells;
    }
    const size_t d = dset.size();
    for (const auto& chk : typ_checks) {
      double self_info = 0;
      for (int t = 0; t < spec.n && std::isfinite(self_info); ++t) {
        // split the combined z-cell into per-source symbols
        std::vector<uint32_t> symbols(d);
        uint64_t cell = zc[static_cast<size_t>(t)];
        for (size_t k = d; k-- > 0;) {
          symbols[k] = static_cast<uint32_t>(cell % spec.q);
          cell /= spec.q;
        }
        uint64_t tcell = 0, gcell = 0;
        for (size_t k = 0; k < d; ++k)
          if (chk.mask & (uint64_t{1} << k)) tcell = tcell * spec.q + symbols[k];
        for (size_t k = 0; k < d; ++k)
          if (!(chk.mask & (uint64_t{1} << k))) gcell = gcell * spec.q + symbols[k];
        // conditioning layout: given sources first, then the side cell
        gcell = gcell * ctx.side_cells + y_digits[static_cast<size_t>(t)];
        const double p = chk.kernel.row_by_index(gcell)[tcell];
        if (p <= 0)
          self_info = std::numeric_limits<double>::infinity();
        else
          self_info -= std::log2(p);
      }
      if (!(self_info <= chk.threshold)) return false;
    }
    return true;
  };

  std::vector<uint32_t> y_digits(static_cast<size_t>(spec.n), 0);
  for (uint64_t y_rank = 0; y_rank < caches.y_blocks; ++y_rank) {
    uint64_t x = y_rank;
    for (int t = spec.n - 1; t >= 0; --t) {
      y_digits[static_cast<size_t>(t)] = static_cast<uint32_t>(x % ctx.side_cells);
      x /= ctx.side_cells;
    }
    for (uint64_t c_rank = 0; c_rank < caches.c_space; ++c_rank) {
      const auto& elements = coset_elements[c_rank];
      if (elements.empty()) continue;
      const uint64_t slot = c_rank * caches.y_blocks + y_rank;
      double mass = 0;
      double best = -1;
      uint64_t pick = UINT64_MAX;
      for (uint64_t z_rank : elements) {
        const double w = weight_of(z_rank, y_digits);
        mass += w;
        if (kind == DecoderKind::Map && w > best) {
          best = w;
          pick = z_rank;
        }
        if (kind == DecoderKind::Typicality && pick == UINT64_MAX &&
            typical(z_rank, y_digits))
          pick = z_rank;
      }
      caches.coset_mass[slot] = mass;
      if (want_choice) {
        caches.chosen[slot] = pick;
        if (pick != UINT64_MAX) caches.chosen_weight[slot] = weight_of(pick, y_digits);
      }
    }
  }
  return caches;
}

}  // namespace

double exact_error(const SourceCodeSpec& spec, DecoderKind kind, double typicality_epsilon,
                   uint64_t budget) {
  spec.validate();
  const uint64_t letter_cells = spec.letter.table_size();
  checked_pow(letter_cells, static_cast<uint64_t>(spec.n), budget, "joint block space");

  std::vector<DecoderContext> contexts;
  std::vector<ExactCaches> caches;
  for (int j = 0; j < static_cast<int>(spec.decoders.size()); ++j) {
    contexts.emplace_back(spec, j);
    caches.push_back(build_exact_caches(spec, contexts.back(), kind, typicality_epsilon, budget));
  }
  const size_t num_dec = contexts.size();

  // per letter cell, per decoder: posterior factor, decoded cell, side cell
  std::vector<std::vector<double>> kw(num_dec, std::vector<double>(letter_cells));
  for (size_t jd = 0; jd < num_dec; ++jd)
    for (uint64_t cell = 0; cell < letter_cells; ++cell)
      kw[jd][cell] = contexts[jd].kernel.row_by_index(contexts[jd].ycell_of_letter[cell])
                         [contexts[jd].zcell_of_letter[cell]];

  double error = 0;
  // depth-first sweep over letter blocks with running products and ranks
  struct Frame {
    double prob = 1.0;
    std::vector<double> w;
    std::vector<uint64_t> z_rank;
    std::vector<uint64_t> y_rank;
  };
  std::vector<Frame> stack(static_cast<size_t>(spec.n) + 1);
  for (auto& f : stack) {
    f.w.assign(num_dec, 1.0);
    f.z_rank.assign(num_dec, 0);
    f.y_rank.assign(num_dec, 0);
  }

  std::function<void(int)> sweep;
  sweep = [&](int t) {
    const Frame& top = stack[static_cast<size_t>(t)];
    if (t == spec.n) {
      double all_correct = 1.0;
      for (size_t jd = 0; jd < num_dec; ++jd) {
        const auto& cache = caches[jd];
        const uint64_t c_rank = cache.c_of_z[top.z_rank[jd]];
        const uint64_t slot = c_rank * cache.y_blocks + top.y_rank[jd];
        double correct = 0;
        switch (kind) {
          case DecoderKind::Crng:
            correct = top.w[jd] / cache.coset_mass[slot];
            break;
          case DecoderKind::Map:
          case DecoderKind::Typicality:
            correct = cache.chosen[slot] == top.z_rank[jd] ? 1.0 : 0.0;
            break;
        }
        all_correct *= correct;
      }
      error += top.prob * (1.0 - all_correct);
      return;
    }
    for (uint64_t cell = 0; cell < letter_cells; ++cell) {
      const double p = spec.letter.probs()[cell];
      if (p == 0) continue;
      Frame& next = stack[static_cast<size_t>(t) + 1];
      next.prob = top.prob * p;
      for (size_t jd = 0; jd < num_dec; ++jd) {
        next.w[jd] = top.w[jd] * kw[jd][cell];
        next.z_rank[jd] = top.z_rank[jd] * contexts[jd].z_cells + contexts[jd].zcell_of_letter[cell];
        next.y_rank[jd] = top.y_rank[jd] * contexts[jd].side_cells + contexts[jd].ycell_of_letter[cell];
      }
      sweep(t + 1);
    }
  };
  sweep(0);
  return std::min(std::max(error, 0.0), 1.0);
}

ErrorEstimate mc_error(const SourceCodeSpec& spec, DecoderKind kind, uint64_t trials, Rng& rng,
                       double typicality_epsilon, uint64_t budget) {
  spec.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  std::vector<DecoderContext> contexts;
  for (int j = 0; j < static_cast<int>(spec.decoders.size()); ++j) contexts.emplace_back(spec, j);
  std::map<uint64_t, std::map<uint64_t, double>> entropy_tables;
  if (kind == DecoderKind::Typicality)
    for (size_t j = 0; j < spec.decoders.size(); ++j)
      entropy_tables[j] = shannon_entropy_table(spec, static_cast<int>(j));

  std::vector<int> source_idx;
  for (const auto& name : spec.sources) source_idx.push_back(spec.letter.require_variable(name));

  uint64_t errors = 0;
  for (uint64_t trial = 0; trial < trials; ++trial) {
    // draw the block letter by letter
    std::vector<FieldVector> z(spec.sources.size(), FieldVector(spec.q, spec.n));
    std::vector<SideBlock> y(spec.decoders.size(),
                             SideBlock(static_cast<size_t>(spec.n), 0));
    for (int t = 0; t < spec.n; ++t) {
      const Outcome o = spec.letter.sample(rng);
      const uint64_t cell = spec.letter.index_of(o);
      for (size_t s = 0; s < spec.sources.size(); ++s)
        z[s][t] = o[static_cast<size_t>(source_idx[s])];
      for (size_t j = 0; j < spec.decoders.size(); ++j)
        y[j][static_cast<size_t>(t)] = contexts[j].ycell_of_letter[cell];
    }
    const std::vector<FieldVector> c = encode(spec, z);

    bool any_wrong = false;
    for (size_t j = 0; j < spec.decoders.size() && !any_wrong; ++j) {
      std::vector<FieldVector> cj;
      for (int si : spec.decoders[j].decode_set) cj.push_back(c[static_cast<size_t>(si)]);
      DecodeResult res;
      switch (kind) {
        case DecoderKind::Crng:
          res = crng_decode(spec, static_cast<int>(j), cj, y[j], rng, budget);
          break;
        case DecoderKind::Map:
          res = map_decode(spec, static_cast<int>(j), cj, y[j], budget);
          break;
        case DecoderKind::Typicality:
          res = typicality_decode(spec, static_cast<int>(j), cj, y[j], typicality_epsilon,
                                  entropy_tables[j], budget);
          break;
      }
      if (res.failed) {
        any_wrong = true;
        break;
      }
      for (size_t k = 0; k < spec.decoders[j].decode_set.size(); ++k)
        if (!(res.reproduction[k] == z[static_cast<size_t>(spec.decoders[j].decode_set[k])]))
          any_wrong = true;
    }
    if (any_wrong) ++errors;
  }

  const WilsonInterval ci = wilson95(errors, trials);
  return {ci.estimate, ci.low, ci.high, errors, trials};
}

double dsbs_pair_map_exact_error(const FieldMatrix& f1, const FieldMatrix& f2, double flip) {
  if (f1.modulus() != 2 || f2.modulus() != 2)
    throw std::invalid_argument("the fast path covers GF(2) only");
  if (f1.cols() != f2.cols()) throw std::invalid_argument("encoder length mismatch");
  const int n = f1.cols();
  if (n < 1 || n > 62) throw std::invalid_argument("block length out of range for bit packing");
  if (!(flip >= 0 && flip < 0.5))
    throw std::invalid_argument("flip probability must lie in [0, 0.5)");

  auto kernel_masks = [n](const FieldMatrix& f) {
    std::vector<uint64_t> masks;
    const CosetSystem cs = solve_affine(f, FieldVector(2, f.rows()));
    for (const auto& v : cs.kernel_basis()) {
      uint64_t m = 0;
      for (int i = 0; i < n; ++i)
        if (v[i]) m |= uint64_t{1} << i;
      masks.push_back(m);
    }
    return masks;
  };

  const std::vector<uint64_t> k1 = kernel_masks(f1);
  const std::vector<uint64_t> k2 = kernel_masks(f2);

  // reduced basis of V = ker f1 + ker f2, lowest set bit as pivot
  std::vector<uint64_t> basis;  // basis[i] has pivot bit pivots[i]
  std::vector<int> pivots;
  auto insert = [&](uint64_t v) {
    for (size_t i = 0; i < basis.size(); ++i)
      if (v & (uint64_t{1} << pivots[i])) v ^= basis[i];
    if (!v) return;
    int p = __builtin_ctzll(v);
    basis.push_back(v);
    pivots.push_back(p);
  };
  for (uint64_t v : k1) insert(v);
  for (uint64_t v : k2) insert(v);

  const int overlap_dim = static_cast<int>(k1.size() + k2.size() - basis.size());

  // per V-coset minimum weight; the coset key is the reduced representative
  std::unordered_map<uint64_t, int> min_weight;
  const uint64_t space = uint64_t{1} << n;
  for (uint64_t u = 0; u < space; ++u) {
    uint64_t r = u;
    for (size_t i = 0; i < basis.size(); ++i)
      if (r & (uint64_t{1} << pivots[i])) r ^= basis[i];
    const int w = __builtin_popcountll(u);
    auto [it, inserted] = min_weight.try_emplace(r, w);
    if (!inserted && w < it->second) it->second = w;
  }

  double correct = 0;
  for (const auto& [key, w] : min_weight)
    correct += std::pow(flip, w) * std::pow(1.0 - flip, n - w);
  correct *= std::pow(2.0, -overlap_dim);
  return 1.0 - correct;
}

}  // namespace crng
