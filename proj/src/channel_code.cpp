#include "crng/channel_code.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

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

// Exact sampler of one encoder group: the joint prior of the group's
// auxiliary letters restricted to the product of stacked (f; g) cosets.
struct GroupSampler {
  const ChannelCodeSpec* spec = nullptr;
  std::vector<int> group;
  JointPMF prior;  // letters of the group, group order

  GroupSampler(const ChannelCodeSpec& s, std::vector<int> members)
      : spec(&s), group(std::move(members)) {
    std::vector<std::string> names;
    for (int mi : group) names.push_back(s.messages[static_cast<size_t>(mi)]);
    prior = s.z_prior_letter.marginal(names);
    // marginal() keeps the joint's variable order; realign strides to group order
    group_strides_.assign(group.size(), 1);
    std::vector<int> var_of_member;
    for (const auto& name : names) var_of_member.push_back(prior.require_variable(name));
    strides_by_var_.assign(prior.variables().size(), 0);
    uint64_t stride = 1;
    for (size_t v = prior.variables().size(); v-- > 0;) {
      strides_by_var_[v] = stride;
      stride *= prior.variables()[v].size;
    }
    for (size_t k = 0; k < group.size(); ++k)
      group_strides_[k] = strides_by_var_[static_cast<size_t>(var_of_member[k])];
  }

  double letter_prob(const std::vector<FieldVector>& z, int t) const {
    uint64_t cell = 0;
    for (size_t k = 0; k < group.size(); ++k) cell += group_strides_[k] * z[k][t];
    return prior.probs()[cell];
  }

  double block_weight(const std::vector<FieldVector>& z) const {
    double w = 1.0;
    for (int t = 0; t < spec->n && w > 0; ++t) w *= letter_prob(z, t);
    return w;
  }

  // Stacked (f_s; g_s) systems pinned at (c_s, m_s), one per group member.
  std::vector<CosetSystem> intersection_cosets(const std::vector<FieldVector>& m) const {
    if (m.size() != group.size())
      throw std::invalid_argument("one message block per group member required");
    std::vector<CosetSystem> cosets;
    for (size_t k = 0; k < group.size(); ++k) {
      const size_t s = static_cast<size_t>(group[k]);
      AffineSystem fs(spec->f[s], spec->c[s]);
      AffineSystem gs(spec->g[s], m[k]);
      cosets.push_back(solve_affine(fs.intersected_with(gs)));
    }
    return cosets;
  }

  // Plain f-cosets of the pinned vectors (no message constraint).
  std::vector<CosetSystem> f_cosets() const {
    std::vector<CosetSystem> cosets;
    for (int mi : group) {
      const size_t s = static_cast<size_t>(mi);
      cosets.push_back(solve_affine(spec->f[s], spec->c[s]));
    }
    return cosets;
  }

  double restricted_mass(const std::vector<CosetSystem>& cosets, uint64_t budget) const {
    double mass = 0;
    walk_coset_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
      mass += block_weight(z);
      return true;
    });
    return mass;
  }

  // Inverse-CDF draw from the restricted prior; empty when mass is zero.
  std::vector<FieldVector> sample(const std::vector<CosetSystem>& cosets, double mass, Rng& rng,
                                  uint64_t budget) const {
    std::vector<FieldVector> picked;
    const double u = rng.uniform() * mass;
    double acc = 0;
    walk_coset_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
      acc += block_weight(z);
      if (u < acc) {
        picked = z;
        return false;
      }
      return true;
    });
    if (picked.empty()) {
      walk_coset_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
        picked = z;
        return true;
      });
    }
    return picked;
  }

 private:
  std::vector<uint64_t> group_strides_;
  std::vector<uint64_t> strides_by_var_;
};

// Index plumbing between the channel alphabet tuples.
struct ChannelContext {
  const ChannelCodeSpec* spec = nullptr;
  ConditionalKernel induced;                 // Y_all given Z_all (messages order)
  uint64_t z_cells = 1;                      // q^{|S|}
  uint64_t y_cells = 1;                      // product of channel output sizes
  std::vector<std::vector<uint32_t>> dec_ycell;  // per decoder: y_j cell per Y_all cell
  std::vector<uint64_t> dec_side_cells;          // per decoder

  explicit ChannelContext(const ChannelCodeSpec& s) : spec(&s) {
    induced = induced_channel(s);
    z_cells = induced.input_cells();
    y_cells = induced.output_cells();
    const auto& yvars = induced.output_variables();
    for (const auto& dec : s.decode_specs) {
      std::vector<int> positions;
      uint64_t side_cells = 1;
      for (const auto& name : dec.side_info) {
        int pos = -1;
        for (size_t v = 0; v < yvars.size(); ++v)
          if (yvars[v].name == name) pos = static_cast<int>(v);
        if (pos < 0) throw std::invalid_argument("decoder side variable is not a channel output");
        positions.push_back(pos);
        side_cells *= yvars[static_cast<size_t>(pos)].size;
      }
      std::vector<uint32_t> proj(y_cells);
      for (uint64_t cell = 0; cell < y_cells; ++cell) {
        const Outcome o = induced.output_of(cell);
        uint64_t yc = 0;
        for (int pos : positions)
          yc = yc * yvars[static_cast<size_t>(pos)].size + o[static_cast<size_t>(pos)];
        proj[cell] = static_cast<uint32_t>(yc);
      }
      dec_ycell.push_back(std::move(proj));
      dec_side_cells.push_back(side_cells);
    }
  }

  uint64_t zcell_at(const std::vector<FieldVector>& z_all, int t) const {
    uint64_t cell = 0;
    for (size_t s = 0; s < z_all.size(); ++s) cell = cell * spec->q + z_all[s][t];
    return cell;
  }
};

// Per-decoder exact tables against the pinned codeword coset: for every side
// block y of decoder j, the posterior mass of the coset, and the probability
// that the CRNG output projects onto each message tuple of D_j.
struct DecoderTables {
  uint64_t y_blocks = 1;
  uint64_t m_space = 1;          // product of q^{k_s} over the decode set
  std::vector<double> correct;   // [y * m_space + m]: P(g(Z-hat) = m | y)
  std::vector<double> coset_mass;        // [y]
  std::vector<double> true_weight_norm;  // [y]: 1 / coset mass (0 if fallback)
  uint64_t coset_size = 0;
};

DecoderTables build_decoder_tables(const ChannelCodeSpec& spec, const SourceCodeSpec& induced,
                                   int j, uint64_t budget) {
  const SourceDecoder& dec = induced.decoders[static_cast<size_t>(j)];
  DecoderTables tables;

  // side cells of this decoder in the induced source code
  std::vector<std::string> targets;
  for (int si : dec.decode_set) targets.push_back(induced.sources[static_cast<size_t>(si)]);
  const ConditionalKernel kernel = conditional(induced.letter, targets, dec.side_info);
  const uint64_t side_cells = kernel.input_cells();
  tables.y_blocks = checked_pow(side_cells, static_cast<uint64_t>(spec.n), budget,
                                "decoder side block space");

  for (int si : dec.decode_set) {
    const uint64_t m_s = checked_pow(
        spec.q, static_cast<uint64_t>(spec.g[static_cast<size_t>(si)].rows()), budget, "message space");
    if (tables.m_space > budget / m_s)
      throw BudgetExceeded("decoder message space exceeds enumeration budget");
    tables.m_space *= m_s;
  }
  if (tables.m_space > budget / tables.y_blocks)
    throw BudgetExceeded("decoder tables exceed enumeration budget");
  tables.correct.assign(tables.y_blocks * tables.m_space, 0.0);
  tables.coset_mass.assign(tables.y_blocks, 0.0);
  tables.true_weight_norm.assign(tables.y_blocks, 0.0);

  std::vector<CosetSystem> cosets;
  for (int si : dec.decode_set)
    cosets.push_back(
        solve_affine(spec.f[static_cast<size_t>(si)], spec.c[static_cast<size_t>(si)]));
  for (const auto& cs : cosets)
    if (cs.is_empty()) return tables;  // decoder can never answer; all-zero tables

  // materialize the pinned coset once: element weights are recomputed per y
  struct Element {
    std::vector<FieldVector> z;
    uint64_t m_rank = 0;
  };
  std::vector<Element> elements;
  walk_coset_product(cosets, budget, [&](const std::vector<FieldVector>& z) {
    Element e;
    e.z = z;
    uint64_t rank = 0;
    for (size_t k = 0; k < dec.decode_set.size(); ++k) {
      const size_t s = static_cast<size_t>(dec.decode_set[k]);
      const uint64_t m_s =
          checked_pow(spec.q, static_cast<uint64_t>(spec.g[s].rows()), UINT64_MAX - 1, "");
      rank = rank * m_s + mat_vec_mul(spec.g[s], z[k]).to_index();
    }
    e.m_rank = rank;
    elements.push_back(std::move(e));
    return true;
  });
  tables.coset_size = elements.size();

  std::vector<uint32_t> y_digits(static_cast<size_t>(spec.n), 0);
  std::vector<double> weights(elements.size());
  for (uint64_t y_rank = 0; y_rank < tables.y_blocks; ++y_rank) {
    uint64_t x = y_rank;
    for (int t = spec.n - 1; t >= 0; --t) {
      y_digits[static_cast<size_t>(t)] = static_cast<uint32_t>(x % side_cells);
      x /= side_cells;
    }
    double mass = 0;
    for (size_t e = 0; e < elements.size(); ++e) {
      double w = 1.0;
      for (int t = 0; t < spec.n && w > 0; ++t) {
        uint64_t zc = 0;
        for (size_t k = 0; k < elements[e].z.size(); ++k)
          zc = zc * spec.q + elements[e].z[k][t];
        w *= kernel.row_by_index(y_digits[static_cast<size_t>(t)])[zc];
      }
      weights[e] = w;
      mass += w;
    }
    tables.coset_mass[y_rank] = mass;
    if (mass > 0) {
      tables.true_weight_norm[y_rank] = 1.0 / mass;
      for (size_t e = 0; e < elements.size(); ++e)
        tables.correct[y_rank * tables.m_space + elements[e].m_rank] += weights[e] / mass;
    } else {
      // zero posterior mass: the decoder falls back to uniform over the coset
      for (size_t e = 0; e < elements.size(); ++e)
        tables.correct[y_rank * tables.m_space + elements[e].m_rank] +=
            1.0 / static_cast<double>(elements.size());
    }
  }
  return tables;
}

}  // namespace

void ChannelCodeSpec::validate() const {
  check_prime_modulus(q);
  if (n < 1) throw std::invalid_argument("block length must be positive");
  const size_t ns = messages.size();
  if (ns == 0) throw std::invalid_argument("no messages");
  if (f.size() != ns || g.size() != ns || c.size() != ns)
    throw std::invalid_argument("f, g, c must have one entry per message");
  for (size_t s = 0; s < ns; ++s) {
    const int vi = z_prior_letter.require_variable(messages[s]);
    if (z_prior_letter.variables()[static_cast<size_t>(vi)].size != q)
      throw std::invalid_argument("auxiliary alphabet must equal the field size");
    if (f[s].cols() != n || g[s].cols() != n)
      throw std::invalid_argument("hash column count must equal n");
    if (f[s].modulus() != q || g[s].modulus() != q)
      throw std::invalid_argument("hash field mismatch");
    if (c[s].length() != f[s].rows() || c[s].modulus() != q)
      throw std::invalid_argument("pinned vector shape mismatch");
  }
  if (encoder_sources.empty()) throw std::invalid_argument("no encoders");
  if (input_kernels.size() != encoder_sources.size())
    throw std::invalid_argument("one input kernel per encoder required");
  std::set<int> covered;
  for (size_t i = 0; i < encoder_sources.size(); ++i) {
    if (encoder_sources[i].empty()) throw std::invalid_argument("encoder with empty source set");
    const auto& kin = input_kernels[i].input_variables();
    if (kin.size() != encoder_sources[i].size())
      throw std::invalid_argument("input kernel arity mismatch");
    for (size_t k = 0; k < kin.size(); ++k) {
      const int mi = encoder_sources[i][k];
      if (mi < 0 || mi >= static_cast<int>(ns))
        throw std::invalid_argument("encoder source index out of range");
      covered.insert(mi);
      if (kin[k].name != messages[static_cast<size_t>(mi)] || kin[k].size != q)
        throw std::invalid_argument("input kernel variables must match the encoder group");
    }
  }
  if (static_cast<int>(covered.size()) != static_cast<int>(ns))
    throw std::invalid_argument("every message must feed some encoder");
  if (!groups_disjoint()) {
    // overlapping groups need a product prior: each message draws its block once
    double sum = 0;
    for (const auto& name : messages) sum += z_prior_letter.entropy({name});
    if (std::abs(z_prior_letter.entropy(messages) - sum) > 1e-9)
      throw std::invalid_argument(
          "overlapping encoder groups require independent auxiliary letters");
  } else {
    std::vector<std::vector<std::string>> groups;
    for (const auto& g_idx : encoder_sources) {
      std::vector<std::string> names;
      for (int mi : g_idx) names.push_back(messages[static_cast<size_t>(mi)]);
      groups.push_back(std::move(names));
    }
    double sum = 0;
    for (const auto& names : groups) sum += z_prior_letter.entropy(names);
    if (std::abs(z_prior_letter.entropy(messages) - sum) > 1e-9)
      throw std::invalid_argument("auxiliary letters must be independent across encoders");
  }
  // channel input variables: concatenation of the encoder output variables
  std::vector<Variable> expected_inputs;
  for (const auto& k : input_kernels)
    expected_inputs.insert(expected_inputs.end(), k.output_variables().begin(),
                           k.output_variables().end());
  if (channel.input_variables() != expected_inputs)
    throw std::invalid_argument("channel inputs must match the encoder outputs in order");
  if (decode_specs.empty()) throw std::invalid_argument("no decoders");
  for (const auto& dec : decode_specs) {
    if (dec.decode_set.empty()) throw std::invalid_argument("decoder with empty decode set");
    std::set<int> seen;
    for (int si : dec.decode_set) {
      if (si < 0 || si >= static_cast<int>(ns))
        throw std::invalid_argument("decode set index out of range");
      if (!seen.insert(si).second) throw std::invalid_argument("duplicate message in decode set");
    }
    for (const auto& name : dec.side_info) {
      bool found = false;
      for (const auto& v : channel.output_variables()) found = found || v.name == name;
      if (!found) throw std::invalid_argument("decoder side variable is not a channel output");
    }
  }
}

bool ChannelCodeSpec::groups_disjoint() const {
  std::set<int> seen;
  for (const auto& g_idx : encoder_sources)
    for (int mi : g_idx)
      if (!seen.insert(mi).second) return false;
  return true;
}

ConditionalKernel induced_channel(const ChannelCodeSpec& spec) {
  JointPMF joint = spec.z_prior_letter.marginal(spec.messages);
  for (const auto& k : spec.input_kernels) joint = compose(joint, k);
  joint = compose(joint, spec.channel);
  std::vector<std::string> yvars;
  for (const auto& v : spec.channel.output_variables()) yvars.push_back(v.name);
  return conditional(joint, yvars, spec.messages);
}

SourceCodeSpec induced_source_code(const ChannelCodeSpec& spec) {
  JointPMF joint = spec.z_prior_letter.marginal(spec.messages);
  for (const auto& k : spec.input_kernels) joint = compose(joint, k);
  joint = compose(joint, spec.channel);
  std::vector<std::string> keep = spec.messages;
  for (const auto& v : spec.channel.output_variables()) keep.push_back(v.name);

  SourceCodeSpec source;
  source.n = spec.n;
  source.q = spec.q;
  source.sources = spec.messages;
  source.encoders = spec.f;
  source.decoders = spec.decode_specs;
  source.letter = joint.marginal(keep);
  return source;
}

std::vector<FieldVector> draw_pinned_vectors(const ChannelCodeSpec& spec, Rng& rng) {
  std::vector<FieldVector> pinned;
  for (size_t s = 0; s < spec.messages.size(); ++s) {
    const JointPMF marg = spec.z_prior_letter.marginal({spec.messages[s]});
    FieldVector z(spec.q, spec.n);
    for (int t = 0; t < spec.n; ++t) z[t] = marg.sample(rng)[0];
    pinned.push_back(mat_vec_mul(spec.f[s], z));
  }
  return pinned;
}

EncodeOutcome encode(const ChannelCodeSpec& spec, int i, const std::vector<FieldVector>& m,
                     Rng& rng, uint64_t budget) {
  const GroupSampler sampler(spec, spec.encoder_sources[static_cast<size_t>(i)]);
  EncodeOutcome out;
  auto cosets = sampler.intersection_cosets(m);
  for (const auto& cs : cosets)
    if (cs.is_empty()) {
      out.failed = true;
      return out;
    }
  const double mass = sampler.restricted_mass(cosets, budget);
  if (mass <= 0) {
    out.failed = true;
    return out;
  }
  out.aux = sampler.sample(cosets, mass, rng, budget);

  const auto& w = spec.input_kernels[static_cast<size_t>(i)];
  out.input_block.resize(static_cast<size_t>(spec.n));
  for (int t = 0; t < spec.n; ++t) {
    Outcome in(out.aux.size());
    for (size_t k = 0; k < out.aux.size(); ++k) in[k] = out.aux[k][t];
    out.input_block[static_cast<size_t>(t)] =
        static_cast<uint32_t>(w.output_index(w.sample(in, rng)));
  }
  return out;
}

SideBlock transmit(const ChannelCodeSpec& spec,
                   const std::vector<std::vector<uint32_t>>& inputs, Rng& rng) {
  if (inputs.size() != spec.input_kernels.size())
    throw std::invalid_argument("one input block per encoder required");
  // combined channel-input cell per letter: encoder outputs in order
  std::vector<uint64_t> strides(inputs.size(), 1);
  uint64_t stride = 1;
  for (size_t i = inputs.size(); i-- > 0;) {
    strides[i] = stride;
    uint64_t cells = 1;
    for (const auto& v : spec.input_kernels[i].output_variables()) cells *= v.size;
    stride *= cells;
  }

  SideBlock y_all(static_cast<size_t>(spec.n));
  for (int t = 0; t < spec.n; ++t) {
    uint64_t cell = 0;
    for (size_t i = 0; i < inputs.size(); ++i)
      cell += strides[i] * inputs[i][static_cast<size_t>(t)];
    const auto& row = spec.channel.row_by_index(cell);
    const double u = rng.uniform();
    double acc = 0;
    uint64_t pick = row.size() - 1;
    for (size_t oc = 0; oc < row.size(); ++oc) {
      acc += row[oc];
      if (u < acc) {
        pick = oc;
        break;
      }
    }
    y_all[static_cast<size_t>(t)] = static_cast<uint32_t>(pick);
  }
  return y_all;
}

SideBlock project_output(const ChannelCodeSpec& spec, int j, const SideBlock& y_all) {
  const ChannelContext ctx(spec);
  SideBlock yj(y_all.size());
  for (size_t t = 0; t < y_all.size(); ++t)
    yj[t] = ctx.dec_ycell[static_cast<size_t>(j)][y_all[t]];
  return yj;
}

std::vector<FieldVector> decode(const ChannelCodeSpec& spec, int j, const SideBlock& y, Rng& rng,
                                uint64_t budget) {
  const SourceCodeSpec source = induced_source_code(spec);
  const auto& dec = spec.decode_specs[static_cast<size_t>(j)];
  std::vector<FieldVector> cj;
  for (int si : dec.decode_set) cj.push_back(spec.c[static_cast<size_t>(si)]);
  const DecodeResult res = crng_decode(source, j, cj, y, rng, budget);
  std::vector<FieldVector> m_hat;
  if (res.failed) return m_hat;  // empty: the decoder cannot produce a guess
  for (size_t k = 0; k < dec.decode_set.size(); ++k)
    m_hat.push_back(
        mat_vec_mul(spec.g[static_cast<size_t>(dec.decode_set[k])], res.reproduction[k]));
  return m_hat;
}

TransmissionTrace run_trial(const ChannelCodeSpec& spec, Rng& rng, uint64_t budget) {
  TransmissionTrace trace;
  const size_t ns = spec.messages.size();

  // uniform independent messages
  for (size_t s = 0; s < ns; ++s) {
    const int k_s = spec.g[s].rows();
    const uint64_t space = checked_pow(spec.q, static_cast<uint64_t>(k_s), UINT64_MAX - 1, "");
    trace.messages.push_back(FieldVector::from_index(spec.q, k_s, rng.below(space)));
  }

  trace.auxiliaries.assign(ns, FieldVector(spec.q, spec.n));
  if (spec.groups_disjoint()) {
    for (size_t i = 0; i < spec.encoder_sources.size(); ++i) {
      std::vector<FieldVector> m;
      for (int mi : spec.encoder_sources[i]) m.push_back(trace.messages[static_cast<size_t>(mi)]);
      EncodeOutcome out = encode(spec, static_cast<int>(i), m, rng, budget);
      if (out.failed) {
        trace.encoder_failed = true;
        return trace;
      }
      for (size_t k = 0; k < spec.encoder_sources[i].size(); ++k)
        trace.auxiliaries[static_cast<size_t>(spec.encoder_sources[i][k])] = out.aux[k];
      trace.inputs.push_back(std::move(out.input_block));
    }
  } else {
    // common messages: each auxiliary block is drawn once and shared
    for (size_t s = 0; s < ns; ++s) {
      const GroupSampler sampler(spec, {static_cast<int>(s)});
      auto cosets = sampler.intersection_cosets({trace.messages[s]});
      if (cosets[0].is_empty()) {
        trace.encoder_failed = true;
        return trace;
      }
      const double mass = sampler.restricted_mass(cosets, budget);
      if (mass <= 0) {
        trace.encoder_failed = true;
        return trace;
      }
      trace.auxiliaries[s] = sampler.sample(cosets, mass, rng, budget)[0];
    }
    for (size_t i = 0; i < spec.encoder_sources.size(); ++i) {
      const auto& w = spec.input_kernels[i];
      std::vector<uint32_t> x(static_cast<size_t>(spec.n));
      for (int t = 0; t < spec.n; ++t) {
        Outcome in(spec.encoder_sources[i].size());
        for (size_t k = 0; k < spec.encoder_sources[i].size(); ++k)
          in[k] = trace.auxiliaries[static_cast<size_t>(spec.encoder_sources[i][k])][t];
        x[static_cast<size_t>(t)] = static_cast<uint32_t>(w.output_index(w.sample(in, rng)));
      }
      trace.inputs.push_back(std::move(x));
    }
  }

  const SideBlock y_all = transmit(spec, trace.inputs, rng);
  const ChannelContext ctx(spec);
  const SourceCodeSpec source = induced_source_code(spec);
  for (size_t j = 0; j < spec.decode_specs.size(); ++j) {
    SideBlock yj(static_cast<size_t>(spec.n));
    for (int t = 0; t < spec.n; ++t)
      yj[static_cast<size_t>(t)] = ctx.dec_ycell[j][y_all[static_cast<size_t>(t)]];
    trace.outputs.push_back(yj);

    const auto& dec = spec.decode_specs[j];
    std::vector<FieldVector> cj;
    for (int si : dec.decode_set) cj.push_back(spec.c[static_cast<size_t>(si)]);
    const DecodeResult res = crng_decode(source, static_cast<int>(j), cj, yj, rng, budget);
    std::vector<FieldVector> m_hat;
    if (!res.failed)
      for (size_t k = 0; k < dec.decode_set.size(); ++k)
        m_hat.push_back(
            mat_vec_mul(spec.g[static_cast<size_t>(dec.decode_set[k])], res.reproduction[k]));
    trace.decoded.push_back(std::move(m_hat));
  }
  return trace;
}

namespace {

// Shared sweep: for fixed auxiliary blocks z (all messages), accumulates the
// probability that every decoder's output projects onto the given per-decoder
// message ranks (or, for decoding_mass, reproduces z itself).
struct ExactSweep {
  const ChannelCodeSpec* spec;
  const ChannelContext* ctx;
  std::vector<DecoderTables> tables;
  std::vector<const ConditionalKernel*> dec_kernels;  // posterior kernels per decoder
  std::vector<ConditionalKernel> dec_kernel_storage;

  explicit ExactSweep(const ChannelCodeSpec& s, const ChannelContext& c,
                      const SourceCodeSpec& induced, uint64_t budget)
      : spec(&s), ctx(&c) {
    for (int j = 0; j < static_cast<int>(s.decode_specs.size()); ++j) {
      tables.push_back(build_decoder_tables(s, induced, j, budget));
      std::vector<std::string> targets;
      for (int si : s.decode_specs[static_cast<size_t>(j)].decode_set)
        targets.push_back(induced.sources[static_cast<size_t>(si)]);
      dec_kernel_storage.push_back(
          conditional(induced.letter, targets, s.decode_specs[static_cast<size_t>(j)].side_info));
    }
    for (const auto& k : dec_kernel_storage) dec_kernels.push_back(&k);
  }

  // P(all decoders output the target message ranks | z blocks), exactly.
  double all_correct_given_z(const std::vector<FieldVector>& z_all,
                             const std::vector<uint64_t>& target_m_rank) const {
    const int n = spec->n;
    double result = 0;
    // DFS over output blocks, tracking per-decoder side-block ranks
    std::vector<uint64_t> y_rank(tables.size(), 0);
    std::function<void(int, double)> dfs = [&](int t, double prob) {
      if (t == n) {
        double correct = prob;
        for (size_t j = 0; j < tables.size() && correct > 0; ++j)
          correct *=
              tables[j].correct[y_rank[j] * tables[j].m_space + target_m_rank[j]];
        result += correct;
        return;
      }
      const uint64_t zc = ctx->zcell_at(z_all, t);
      const auto& row = ctx->induced.row_by_index(zc);
      for (uint64_t yc = 0; yc < row.size(); ++yc) {
        if (row[yc] == 0) continue;
        std::vector<uint64_t> saved = y_rank;
        for (size_t j = 0; j < tables.size(); ++j)
          y_rank[j] = y_rank[j] * ctx->dec_side_cells[j] + ctx->dec_ycell[j][yc];
        dfs(t + 1, prob * row[yc]);
        y_rank = saved;
      }
    };
    dfs(0, 1.0);
    return result;
  }

  // P(every decoder reproduces z_{D_j} exactly | z blocks); the source-level
  // correctness used by the decomposition's decoding term.
  double all_reproduce_given_z(const std::vector<FieldVector>& z_all) const {
    const int n = spec->n;
    double result = 0;
    std::vector<uint64_t> y_rank(tables.size(), 0);
    std::function<void(int, double)> dfs = [&](int t, double prob) {
      if (t == n) {
        double correct = prob;
        for (size_t j = 0; j < tables.size() && correct > 0; ++j) {
          // posterior weight of the true tuple under the decoder's kernel
          const auto& dec = spec->decode_specs[j];
          double w = 1.0;
          uint64_t yr = y_rank[j];
          std::vector<uint32_t> digits(static_cast<size_t>(n));
          for (int tt = n - 1; tt >= 0; --tt) {
            digits[static_cast<size_t>(tt)] =
                static_cast<uint32_t>(yr % ctx->dec_side_cells[j]);
            yr /= ctx->dec_side_cells[j];
          }
          for (int tt = 0; tt < n && w > 0; ++tt) {
            uint64_t zc = 0;
            for (int si : dec.decode_set)
              zc = zc * spec->q + z_all[static_cast<size_t>(si)][tt];
            w *= dec_kernels[j]->row_by_index(digits[static_cast<size_t>(tt)])[zc];
          }
          if (tables[j].coset_mass[y_rank[j]] > 0)
            correct *= w * tables[j].true_weight_norm[y_rank[j]];
          else
            correct *= tables[j].coset_size
                           ? 1.0 / static_cast<double>(tables[j].coset_size)
                           : 0.0;
        }
        result += correct;
        return;
      }
      const uint64_t zc = ctx->zcell_at(z_all, t);
      const auto& row = ctx->induced.row_by_index(zc);
      for (uint64_t yc = 0; yc < row.size(); ++yc) {
        if (row[yc] == 0) continue;
        std::vector<uint64_t> saved = y_rank;
        for (size_t j = 0; j < tables.size(); ++j)
          y_rank[j] = y_rank[j] * ctx->dec_side_cells[j] + ctx->dec_ycell[j][yc];
        dfs(t + 1, prob * row[yc]);
        y_rank = saved;
      }
    };
    dfs(0, 1.0);
    return result;
  }
};

// Enumeration of all message tuples with per-group coset data.
struct MessageSweep {
  const ChannelCodeSpec* spec;
  std::vector<GroupSampler> samplers;
  std::vector<uint64_t> m_space;  // per message
  uint64_t total_m = 1;

  explicit MessageSweep(const ChannelCodeSpec& s, uint64_t budget) : spec(&s) {
    if (s.groups_disjoint()) {
      for (const auto& group : s.encoder_sources) samplers.emplace_back(s, group);
    } else {
      for (size_t m = 0; m < s.messages.size(); ++m)
        samplers.emplace_back(s, std::vector<int>{static_cast<int>(m)});
    }
    for (size_t m = 0; m < s.messages.size(); ++m) {
      m_space.push_back(checked_pow(
          s.q, static_cast<uint64_t>(s.g[m].rows()), budget, "message space"));
      if (total_m > budget / m_space.back())
        throw BudgetExceeded("message sweep exceeds enumeration budget");
      total_m *= m_space.back();
    }
  }

  std::vector<FieldVector> message_of_rank(uint64_t rank) const {
    std::vector<FieldVector> m(spec->messages.size(), FieldVector(spec->q, 0));
    for (size_t s = spec->messages.size(); s-- > 0;) {
      m[s] = FieldVector::from_index(spec->q, spec->g[s].rows(), rank % m_space[s]);
      rank /= m_space[s];
    }
    return m;
  }
};

}  // namespace

double end_to_end_error_exact(const ChannelCodeSpec& spec, uint64_t budget) {
  spec.validate();
  const ChannelContext ctx(spec);
  const SourceCodeSpec induced = induced_source_code(spec);
  induced.validate();
  const ExactSweep sweep(spec, ctx, induced, budget);
  const MessageSweep msweep(spec, budget);

  double correct_total = 0;
  for (uint64_t m_rank = 0; m_rank < msweep.total_m; ++m_rank) {
    const std::vector<FieldVector> m = msweep.message_of_rank(m_rank);

    // per-decoder target ranks
    std::vector<uint64_t> targets;
    for (const auto& dec : spec.decode_specs) {
      uint64_t r = 0;
      for (int si : dec.decode_set)
        r = r * msweep.m_space[static_cast<size_t>(si)] +
            m[static_cast<size_t>(si)].to_index();
      targets.push_back(r);
    }

    // restricted priors per sampler group
    bool failed = false;
    std::vector<std::vector<CosetSystem>> cosets;
    std::vector<double> masses;
    for (const auto& sampler : msweep.samplers) {
      std::vector<FieldVector> group_m;
      for (int mi : sampler.group) group_m.push_back(m[static_cast<size_t>(mi)]);
      auto cs = sampler.intersection_cosets(group_m);
      bool empty = false;
      for (const auto& one : cs) empty = empty || one.is_empty();
      double mass = 0;
      if (!empty) mass = sampler.restricted_mass(cs, budget);
      if (empty || mass <= 0) {
        failed = true;
        break;
      }
      cosets.push_back(std::move(cs));
      masses.push_back(mass);
    }
    if (failed) continue;  // encoder failure: zero correctness mass for this m

    // walk the product of group-restricted priors
    std::function<void(size_t, std::vector<FieldVector>&, double)> walk =
        [&](size_t gi, std::vector<FieldVector>& z_all, double weight) {
          if (gi == msweep.samplers.size()) {
            correct_total += weight * sweep.all_correct_given_z(z_all, targets);
            return;
          }
          const auto& sampler = msweep.samplers[gi];
          walk_coset_product(cosets[gi], budget, [&](const std::vector<FieldVector>& zg) {
            const double w = sampler.block_weight(zg) / masses[gi];
            if (w <= 0) return true;
            for (size_t k = 0; k < sampler.group.size(); ++k)
              z_all[static_cast<size_t>(sampler.group[k])] = zg[k];
            walk(gi + 1, z_all, weight * w);
            return true;
          });
        };
    std::vector<FieldVector> z_all(spec.messages.size(), FieldVector(spec.q, spec.n));
    walk(0, z_all, 1.0);
  }
  const double error = 1.0 - correct_total / static_cast<double>(msweep.total_m);
  return std::min(std::max(error, 0.0), 1.0);
}

ErrorEstimate end_to_end_error_mc(const ChannelCodeSpec& spec, uint64_t trials, Rng& rng,
                                  uint64_t budget) {
  spec.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  uint64_t errors = 0;
  for (uint64_t trial = 0; trial < trials; ++trial) {
    const TransmissionTrace trace = run_trial(spec, rng, budget);
    bool wrong = trace.encoder_failed;
    for (size_t j = 0; j < spec.decode_specs.size() && !wrong; ++j) {
      const auto& dec = spec.decode_specs[j];
      if (trace.decoded[j].size() != dec.decode_set.size()) {
        wrong = true;
        break;
      }
      for (size_t k = 0; k < dec.decode_set.size(); ++k)
        if (!(trace.decoded[j][k] ==
              trace.messages[static_cast<size_t>(dec.decode_set[k])]))
          wrong = true;
    }
    if (wrong) ++errors;
  }
  const WilsonInterval ci = wilson95(errors, trials);
  return {ci.estimate, ci.low, ci.high, errors, trials};
}

ErrorDecomposition error_decomposition(const ChannelCodeSpec& spec, uint64_t budget) {
  spec.validate();
  const ChannelContext ctx(spec);
  const SourceCodeSpec induced = induced_source_code(spec);
  const ExactSweep sweep(spec, ctx, induced, budget);
  const MessageSweep msweep(spec, budget);

  ErrorDecomposition out;

  // per-group f-coset masses (denominators of the conditional prior)
  std::vector<std::vector<CosetSystem>> f_cosets;
  std::vector<double> f_masses;
  for (const auto& sampler : msweep.samplers) {
    f_cosets.push_back(sampler.f_cosets());
    f_masses.push_back(sampler.restricted_mass(f_cosets.back(), budget));
  }

  // encoder failure mass and the total-variation term, one message at a time
  const double uniform = 1.0 / static_cast<double>(msweep.total_m);
  for (uint64_t m_rank = 0; m_rank < msweep.total_m; ++m_rank) {
    const std::vector<FieldVector> m = msweep.message_of_rank(m_rank);
    bool failed = false;
    double joint_mass = 1.0;
    for (size_t gi = 0; gi < msweep.samplers.size(); ++gi) {
      std::vector<FieldVector> group_m;
      for (int mi : msweep.samplers[gi].group) group_m.push_back(m[static_cast<size_t>(mi)]);
      auto cs = msweep.samplers[gi].intersection_cosets(group_m);
      bool empty = false;
      for (const auto& one : cs) empty = empty || one.is_empty();
      const double mass = empty ? 0.0 : msweep.samplers[gi].restricted_mass(cs, budget);
      if (mass <= 0) failed = true;
      joint_mass *= mass;
    }
    if (failed) out.encoder_failure_mass += uniform;
    double f_mass = 1.0;
    for (double fm : f_masses) f_mass *= fm;
    out.mismatch_tv += std::abs(uniform - joint_mass / f_mass);
  }

  // decoding error conditioned on the pinned f-coset
  double reproduce = 0;
  std::function<void(size_t, std::vector<FieldVector>&, double)> walk =
      [&](size_t gi, std::vector<FieldVector>& z_all, double weight) {
        if (gi == msweep.samplers.size()) {
          reproduce += weight * sweep.all_reproduce_given_z(z_all);
          return;
        }
        const auto& sampler = msweep.samplers[gi];
        walk_coset_product(f_cosets[gi], budget, [&](const std::vector<FieldVector>& zg) {
          const double w = sampler.block_weight(zg) / f_masses[gi];
          if (w <= 0) return true;
          for (size_t k = 0; k < sampler.group.size(); ++k)
            z_all[static_cast<size_t>(sampler.group[k])] = zg[k];
          walk(gi + 1, z_all, weight * w);
          return true;
        });
      };
  std::vector<FieldVector> z_all(spec.messages.size(), FieldVector(spec.q, spec.n));
  walk(0, z_all, 1.0);
  out.decoding_mass = 1.0 - reproduce;
  return out;
}

}  // namespace crng
