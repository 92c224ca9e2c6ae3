#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crng/budget.hpp"
#include "crng/rng.hpp"

namespace crng {

struct Variable {
  std::string name;
  uint32_t size = 2;

  friend bool operator==(const Variable&, const Variable&) = default;
};

using Outcome = std::vector<uint32_t>;  // one symbol per variable, in table order

// Exact joint probability mass function over named finite variables, stored
// as a dense row-major table. Immutable after construction; all operations
// return new objects.
class JointPMF {
 public:
  JointPMF() = default;
  JointPMF(std::vector<Variable> variables, std::vector<double> probs);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<double>& probs() const { return p_; }
  uint64_t table_size() const { return p_.size(); }

  int variable_index(const std::string& name) const;  // -1 when absent
  int require_variable(const std::string& name) const;

  double prob(const Outcome& o) const { return p_[index_of(o)]; }
  uint64_t index_of(const Outcome& o) const;
  Outcome outcome_of(uint64_t index) const;

  // Summed-out distribution over `keep`; original variable order preserved.
  JointPMF marginal(const std::vector<std::string>& keep) const;

  // H(target | given) in bits, 0 log 0 = 0.
  double entropy(const std::vector<std::string>& target,
                 const std::vector<std::string>& given = {}) const;

  // I(a ; b | given) = H(a|given) - H(a|b,given), clamped to 0 at -1e-9.
  double mutual_information(const std::vector<std::string>& a, const std::vector<std::string>& b,
                            const std::vector<std::string>& given = {}) const;

  // n-fold i.i.d. extension; variable v becomes v_1 ... v_n, letter-major
  // order (all variables of letter 1, then letter 2, ...).
  JointPMF block_extend(int n, uint64_t budget = kDefaultTableBudget) const;

  // Inverse-CDF draw over the dense table order.
  Outcome sample(Rng& rng) const;

  friend bool operator==(const JointPMF&, const JointPMF&) = default;

 private:
  void rebuild_strides();

  std::vector<Variable> vars_;
  std::vector<double> p_;
  std::vector<uint64_t> strides_;
};

// Conditional distribution table p(output | input) with named variables on
// both sides. Rows of conditioning cells that carry zero mass in the source
// joint are filled uniformly and flagged; Eq-style posterior formulas divide
// by conditional masses and the caller must branch on the flag.
class ConditionalKernel {
 public:
  ConditionalKernel() = default;
  ConditionalKernel(std::vector<Variable> inputs, std::vector<Variable> outputs,
                    std::vector<std::vector<double>> rows, std::vector<bool> flagged = {});

  const std::vector<Variable>& input_variables() const { return in_; }
  const std::vector<Variable>& output_variables() const { return out_; }
  uint64_t input_cells() const { return rows_.size(); }
  uint64_t output_cells() const { return rows_.empty() ? 0 : rows_[0].size(); }

  uint64_t input_index(const Outcome& in) const;
  uint64_t output_index(const Outcome& out) const;
  Outcome output_of(uint64_t index) const;

  double prob(const Outcome& out, const Outcome& in) const {
    return rows_[input_index(in)][output_index(out)];
  }
  const std::vector<double>& row(const Outcome& in) const { return rows_[input_index(in)]; }
  const std::vector<double>& row_by_index(uint64_t i) const { return rows_[i]; }
  bool row_flagged(const Outcome& in) const { return flagged_[input_index(in)]; }
  bool row_flagged_by_index(uint64_t i) const { return flagged_[i]; }

  // Draw from one conditioning row.
  Outcome sample(const Outcome& in, Rng& rng) const;

  // Identity channel: output is a copy of the input tuple.
  static ConditionalKernel identity(const std::vector<Variable>& inputs,
                                    const std::vector<std::string>& output_names);

 private:
  std::vector<Variable> in_, out_;
  std::vector<std::vector<double>> rows_;
  std::vector<bool> flagged_;
};

// Rows p(target | given) extracted from a joint.
ConditionalKernel conditional(const JointPMF& p, const std::vector<std::string>& target,
                              const std::vector<std::string>& given);

// Chains prior and kernel into a joint over prior vars + kernel outputs.
// Kernel inputs must name variables of the prior; output names must be fresh.
JointPMF compose(const JointPMF& prior, const ConditionalKernel& k,
                 uint64_t budget = kDefaultTableBudget);

// Convenience builders used all over the test and experiment configs.
JointPMF make_bernoulli(const std::string& name, double p1);
JointPMF make_uniform(const std::string& name, uint32_t size);
// Doubly symmetric binary source: Z1 uniform, Z2 = Z1 xor Bern(flip).
JointPMF make_dsbs(const std::string& z1, const std::string& z2, double flip);
// Binary symmetric channel kernel from `input` to a fresh variable `output`.
ConditionalKernel make_bsc(const std::string& input, const std::string& output, double flip);
JointPMF product(const JointPMF& a, const JointPMF& b);

double binary_entropy(double p);

}  // namespace crng
