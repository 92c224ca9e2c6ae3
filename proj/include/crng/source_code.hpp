#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crng/budget.hpp"
#include "crng/coset.hpp"
#include "crng/matrix.hpp"
#include "crng/pmf.hpp"
#include "crng/rng.hpp"
#include "crng/stats.hpp"

namespace crng {

// One decoder: which sources it reproduces and which letter variables it
// observes as side information.
struct SourceDecoder {
  std::vector<int> decode_set;         // indices into SourceCodeSpec::sources
  std::vector<std::string> side_info;  // letter variable names; may be empty
};

// A multi-terminal source code at block length n: per-source matrix encoders
// over GF(q) and stochastic decoders that sample from the source posterior
// restricted to the encoder cosets. The single-letter joint `letter` covers
// every source variable (alphabet q each) and every side-information
// variable; blocks are its i.i.d. extension.
struct SourceCodeSpec {
  int n = 1;
  uint32_t q = 2;
  std::vector<std::string> sources;
  std::vector<FieldMatrix> encoders;  // f_s with cols == n
  std::vector<SourceDecoder> decoders;
  JointPMF letter;

  void validate() const;
  double rate(int s) const {  // (l_s / n) * log2 q
    return static_cast<double>(encoders[static_cast<size_t>(s)].rows()) / n * std::log2(q);
  }
};

struct DecodeResult {
  bool failed = false;             // typicality miss or inconsistent codewords
  bool zero_mass_fallback = false; // posterior had no mass on the coset; uniform draw
  std::vector<FieldVector> reproduction;  // one block per decoded source
};

enum class DecoderKind { Crng, Map, Typicality };

// Side-information blocks are sequences of cell indices over the decoder's
// side variables (row indices of the conditional kernel).
using SideBlock = std::vector<uint32_t>;

std::vector<FieldVector> encode(const SourceCodeSpec& spec, const std::vector<FieldVector>& z);

// Samples the reproduction exactly from the posterior restricted and
// renormalized on the codeword coset.
DecodeResult crng_decode(const SourceCodeSpec& spec, int j, const std::vector<FieldVector>& c,
                         const SideBlock& y, Rng& rng,
                         uint64_t budget = kDefaultEnumerationBudget);

// Posterior argmax over the coset; ties broken by the deterministic coset
// enumeration order.
DecodeResult map_decode(const SourceCodeSpec& spec, int j, const std::vector<FieldVector>& c,
                        const SideBlock& y, uint64_t budget = kDefaultEnumerationBudget);

// First coset element inside the conditional typicality set; fails when the
// intersection is empty. The entropy table maps nonempty subset masks of the
// decode set (bit i = i-th entry) to the conditional entropy threshold.
DecodeResult typicality_decode(const SourceCodeSpec& spec, int j,
                               const std::vector<FieldVector>& c, const SideBlock& y,
                               double epsilon, const std::map<uint64_t, double>& entropy_table,
                               uint64_t budget = kDefaultEnumerationBudget);

// Shannon conditional entropies of the letter joint, the i.i.d. instantiation
// of the thresholds the typicality decoder needs.
std::map<uint64_t, double> shannon_entropy_table(const SourceCodeSpec& spec, int j);

// P(any decoder reproduces any of its sources incorrectly), exactly. CRNG
// errors are closed-form posterior-mass sums; no sampling is involved.
double exact_error(const SourceCodeSpec& spec, DecoderKind kind,
                   double typicality_epsilon = 0.0,
                   uint64_t budget = kDefaultEnumerationBudget);

struct ErrorEstimate {
  double estimate = 0;
  double ci_low = 0;
  double ci_high = 0;
  uint64_t errors = 0;
  uint64_t trials = 0;
};

// Bernoulli Monte Carlo estimate of the same quantity with a Wilson 95% CI.
ErrorEstimate mc_error(const SourceCodeSpec& spec, DecoderKind kind, uint64_t trials, Rng& rng,
                       double typicality_epsilon = 0.0,
                       uint64_t budget = kDefaultEnumerationBudget);

// Exact MAP error of the two-encoder code (f1, f2) on the doubly symmetric
// binary source with flip probability `flip` and a single decoder without
// side information. Works in the space of difference vectors u = z1 xor z2,
// so it scales to block lengths the generic sweep cannot reach; the generic
// exact_error is its oracle at small n.
double dsbs_pair_map_exact_error(const FieldMatrix& f1, const FieldMatrix& f2, double flip);

}  // namespace crng
