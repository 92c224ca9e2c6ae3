#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crng/budget.hpp"
#include "crng/coset.hpp"
#include "crng/matrix.hpp"
#include "crng/pmf.hpp"
#include "crng/rng.hpp"
#include "crng/source_code.hpp"

namespace crng {

// Channel code built on the source code: per message s a hash pair
// (f_s with the pinned vector c_s, g_s carrying the message), per encoder a
// constrained sampler of the auxiliary blocks, and decoders that run the
// source decoder against the induced channel and project through g.
//
// Encoder groups must partition the message set when the auxiliary prior
// couples messages of one encoder; overlapping groups (common messages fed
// to several encoders) are supported when the prior factorizes per message,
// each message then drawing its auxiliary block exactly once per trial.
struct ChannelCodeSpec {
  int n = 1;
  uint32_t q = 2;
  std::vector<std::string> messages;          // auxiliary variable names Z_s
  std::vector<FieldMatrix> f;                 // rows l_s
  std::vector<FieldMatrix> g;                 // rows k_s; message alphabet q^{k_s}
  std::vector<FieldVector> c;                 // pinned vectors, length l_s
  std::vector<std::vector<int>> encoder_sources;  // S_i as indices into messages
  JointPMF z_prior_letter;                    // joint law of the Z letters
  std::vector<ConditionalKernel> input_kernels;  // W_i: X_i given Z_{S_i} letters
  ConditionalKernel channel;                  // Y_J given X_I letters
  std::vector<SourceDecoder> decode_specs;    // decode_set indices + side Y names

  void validate() const;
  bool groups_disjoint() const;
  double message_rate(int s) const {
    return static_cast<double>(g[static_cast<size_t>(s)].rows()) / n * std::log2(q);
  }
};

struct TransmissionTrace {
  bool encoder_failed = false;
  std::vector<FieldVector> messages;               // m_s in GF(q)^{k_s}
  std::vector<FieldVector> auxiliaries;            // z_s blocks
  std::vector<std::vector<uint32_t>> inputs;       // x_i blocks (cell indices)
  std::vector<SideBlock> outputs;                  // y_j blocks (cell indices)
  std::vector<std::vector<FieldVector>> decoded;   // per decoder, m-hat per decoded message
};

// c_s = f_s(z_s) with z_s drawn from the prior block law; the push-forward
// the construction pins the codewords with.
std::vector<FieldVector> draw_pinned_vectors(const ChannelCodeSpec& spec, Rng& rng);

struct EncodeOutcome {
  bool failed = false;
  std::vector<FieldVector> aux;       // z_s for s in the group, group order
  std::vector<uint32_t> input_block;  // x_i cells, length n
};

// Exact constrained sampling for encoder i: the prior restricted to the
// intersection of the f- and g-cosets of its messages, then the input kernel.
EncodeOutcome encode(const ChannelCodeSpec& spec, int i, const std::vector<FieldVector>& m,
                     Rng& rng, uint64_t budget = kDefaultEnumerationBudget);

// Letterwise channel use; returns the block of combined output-tuple cells.
SideBlock transmit(const ChannelCodeSpec& spec,
                   const std::vector<std::vector<uint32_t>>& inputs, Rng& rng);

// Projects a combined output block onto decoder j's side variables.
SideBlock project_output(const ChannelCodeSpec& spec, int j, const SideBlock& y_all);

// Source-decodes the auxiliaries behind y_j against the induced joint and
// projects through g.
std::vector<FieldVector> decode(const ChannelCodeSpec& spec, int j, const SideBlock& y, Rng& rng,
                                uint64_t budget = kDefaultEnumerationBudget);

// Per-letter channel from the auxiliaries to the outputs, marginalizing the
// physical inputs.
ConditionalKernel induced_channel(const ChannelCodeSpec& spec);

// One full round trip with uniform random messages; records every vector.
TransmissionTrace run_trial(const ChannelCodeSpec& spec, Rng& rng,
                            uint64_t budget = kDefaultEnumerationBudget);

// P(any decoder misses any of its messages), uniform independent messages.
double end_to_end_error_exact(const ChannelCodeSpec& spec,
                              uint64_t budget = kDefaultEnumerationBudget);
ErrorEstimate end_to_end_error_mc(const ChannelCodeSpec& spec, uint64_t trials, Rng& rng,
                                  uint64_t budget = kDefaultEnumerationBudget);

// The three exact components of the error decomposition: the uniform mass of
// messages whose intersection coset is empty or carries no prior mass, the
// source-decoding error conditioned on the pinned f-coset, and the total
// variation between the normalized intersection-coset masses and the uniform
// message distribution. Their sum upper-bounds the end-to-end error.
struct ErrorDecomposition {
  double encoder_failure_mass = 0;
  double decoding_mass = 0;
  double mismatch_tv = 0;
};
ErrorDecomposition error_decomposition(const ChannelCodeSpec& spec,
                                       uint64_t budget = kDefaultEnumerationBudget);

// The source-code view the decoders run against: letter joint of the
// auxiliaries and the outputs under the induced channel, same encoders f.
SourceCodeSpec induced_source_code(const ChannelCodeSpec& spec);

}  // namespace crng
