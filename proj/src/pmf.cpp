#include "crng/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace crng {
namespace {

constexpr double kMassTolerance = 1e-12;

double xlog2x(double p) { return p > 0 ? p * std::log2(p) : 0.0; }

std::vector<uint64_t> strides_for(const std::vector<Variable>& vars) {
  std::vector<uint64_t> s(vars.size(), 1);
  for (size_t i = vars.size(); i-- > 1;) s[i - 1] = s[i] * vars[i].size;
  return s;
}

uint64_t cells_of(const std::vector<Variable>& vars) {
  uint64_t n = 1;
  for (const auto& v : vars) n *= v.size;
  return n;
}

void require_distinct_names(const std::vector<Variable>& vars) {
  std::set<std::string> seen;
  for (const auto& v : vars)
    if (!seen.insert(v.name).second)
      throw std::invalid_argument("duplicate variable name: " + v.name);
}

}  // namespace

double binary_entropy(double p) { return -xlog2x(p) - xlog2x(1.0 - p); }

JointPMF::JointPMF(std::vector<Variable> variables, std::vector<double> probs)
    : vars_(std::move(variables)), p_(std::move(probs)) {
  require_distinct_names(vars_);
  for (const auto& v : vars_)
    if (v.size < 1) throw std::invalid_argument("alphabet size must be at least 1");
  if (p_.size() != cells_of(vars_))
    throw std::invalid_argument("probability table size does not match alphabet product");
  double mass = 0;
  for (double x : p_) {
    if (x < 0) throw std::invalid_argument("negative probability");
    mass += x;
  }
  if (std::abs(mass - 1.0) > kMassTolerance)
    throw std::invalid_argument("probabilities must sum to 1 within 1e-12");
  rebuild_strides();
}

void JointPMF::rebuild_strides() { strides_ = strides_for(vars_); }

int JointPMF::variable_index(const std::string& name) const {
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  return -1;
}

int JointPMF::require_variable(const std::string& name) const {
  int i = variable_index(name);
  if (i < 0) throw std::invalid_argument("unknown variable: " + name);
  return i;
}

uint64_t JointPMF::index_of(const Outcome& o) const {
  if (o.size() != vars_.size()) throw std::invalid_argument("outcome arity mismatch");
  uint64_t idx = 0;
  for (size_t i = 0; i < o.size(); ++i) {
    if (o[i] >= vars_[i].size) throw std::invalid_argument("symbol out of alphabet range");
    idx += o[i] * strides_[i];
  }
  return idx;
}

Outcome JointPMF::outcome_of(uint64_t index) const {
  Outcome o(vars_.size());
  for (size_t i = 0; i < vars_.size(); ++i) {
    o[i] = static_cast<uint32_t>(index / strides_[i]);
    index %= strides_[i];
  }
  return o;
}

JointPMF JointPMF::marginal(const std::vector<std::string>& keep) const {
  std::vector<int> keep_idx;
  for (const auto& name : keep) keep_idx.push_back(require_variable(name));
  // original variable order preserved
  std::sort(keep_idx.begin(), keep_idx.end());
  keep_idx.erase(std::unique(keep_idx.begin(), keep_idx.end()), keep_idx.end());

  std::vector<Variable> mvars;
  for (int i : keep_idx) mvars.push_back(vars_[static_cast<size_t>(i)]);
  std::vector<uint64_t> mstrides = strides_for(mvars);
  std::vector<double> mp(cells_of(mvars), 0.0);
  for (uint64_t idx = 0; idx < p_.size(); ++idx) {
    if (p_[idx] == 0) continue;
    uint64_t midx = 0;
    for (size_t k = 0; k < keep_idx.size(); ++k) {
      const size_t vi = static_cast<size_t>(keep_idx[k]);
      midx += ((idx / strides_[vi]) % vars_[vi].size) * mstrides[k];
    }
    mp[midx] += p_[idx];
  }
  // renormalization guard against accumulated rounding
  double mass = 0;
  for (double x : mp) mass += x;
  if (std::abs(mass - 1.0) > kMassTolerance)
    throw std::logic_error("marginal lost probability mass");
  return JointPMF(std::move(mvars), std::move(mp));
}

double JointPMF::entropy(const std::vector<std::string>& target,
                         const std::vector<std::string>& given) const {
  // Overlapping sets are fine: H(A|B) = H(A u B) - H(B), so H(X|X) = 0.
  std::vector<std::string> joint = target;
  joint.insert(joint.end(), given.begin(), given.end());

  auto plain_entropy = [](const JointPMF& m) {
    double h = 0;
    for (double x : m.p_) h -= xlog2x(x);
    return h;
  };
  const double h_joint = plain_entropy(marginal(joint));
  if (given.empty()) return h_joint;
  return h_joint - plain_entropy(marginal(given));
}

double JointPMF::mutual_information(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b,
                                    const std::vector<std::string>& given) const {
  std::set<std::string> seen(a.begin(), a.end());
  for (const auto& name : b)
    if (seen.count(name))
      throw std::invalid_argument("information arguments must be disjoint: " + name);
  std::vector<std::string> b_given = b;
  b_given.insert(b_given.end(), given.begin(), given.end());
  const double mi = entropy(a, given) - entropy(a, b_given);
  if (mi < -1e-9)
    throw std::logic_error("mutual information fell below -1e-9; inconsistent table");
  return std::max(mi, 0.0);
}

JointPMF JointPMF::block_extend(int n, uint64_t budget) const {
  if (n < 1) throw std::invalid_argument("block length must be at least 1");
  if (n == 1) return *this;
  uint64_t cells = 1;
  for (int t = 0; t < n; ++t) {
    if (cells > budget / p_.size())
      throw BudgetExceeded("block extension table exceeds budget");
    cells *= p_.size();
  }
  std::vector<Variable> bvars;
  bvars.reserve(vars_.size() * static_cast<size_t>(n));
  for (int t = 1; t <= n; ++t)
    for (const auto& v : vars_)
      bvars.push_back({v.name + "_" + std::to_string(t), v.size});
  std::vector<double> bp(cells, 1.0);
  for (uint64_t idx = 0; idx < cells; ++idx) {
    uint64_t x = idx;
    double prod = 1.0;
    for (int t = n - 1; t >= 0; --t) {
      prod *= p_[x % p_.size()];
      x /= p_.size();
    }
    bp[idx] = prod;
  }
  return JointPMF(std::move(bvars), std::move(bp));
}

Outcome JointPMF::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0;
  for (uint64_t idx = 0; idx < p_.size(); ++idx) {
    acc += p_[idx];
    if (u < acc) return outcome_of(idx);
  }
  return outcome_of(p_.size() - 1);
}

ConditionalKernel::ConditionalKernel(std::vector<Variable> inputs, std::vector<Variable> outputs,
                                     std::vector<std::vector<double>> rows,
                                     std::vector<bool> flagged)
    : in_(std::move(inputs)), out_(std::move(outputs)), rows_(std::move(rows)),
      flagged_(std::move(flagged)) {
  require_distinct_names(in_);
  require_distinct_names(out_);
  if (rows_.size() != cells_of(in_)) throw std::invalid_argument("kernel row count mismatch");
  if (flagged_.empty()) flagged_.assign(rows_.size(), false);
  if (flagged_.size() != rows_.size()) throw std::invalid_argument("kernel flag count mismatch");
  const uint64_t out_cells = cells_of(out_);
  for (const auto& r : rows_) {
    if (r.size() != out_cells) throw std::invalid_argument("kernel row width mismatch");
    double mass = 0;
    for (double x : r) {
      if (x < 0) throw std::invalid_argument("negative kernel probability");
      mass += x;
    }
    if (std::abs(mass - 1.0) > kMassTolerance)
      throw std::invalid_argument("kernel row must sum to 1 within 1e-12");
  }
}

uint64_t ConditionalKernel::input_index(const Outcome& in) const {
  if (in.size() != in_.size()) throw std::invalid_argument("kernel input arity mismatch");
  auto strides = strides_for(in_);
  uint64_t idx = 0;
  for (size_t i = 0; i < in.size(); ++i) {
    if (in[i] >= in_[i].size) throw std::invalid_argument("kernel input symbol out of range");
    idx += in[i] * strides[i];
  }
  return idx;
}

uint64_t ConditionalKernel::output_index(const Outcome& out) const {
  if (out.size() != out_.size()) throw std::invalid_argument("kernel output arity mismatch");
  auto strides = strides_for(out_);
  uint64_t idx = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] >= out_[i].size) throw std::invalid_argument("kernel output symbol out of range");
    idx += out[i] * strides[i];
  }
  return idx;
}

Outcome ConditionalKernel::output_of(uint64_t index) const {
  auto strides = strides_for(out_);
  Outcome o(out_.size());
  for (size_t i = 0; i < out_.size(); ++i) {
    o[i] = static_cast<uint32_t>(index / strides[i]);
    index %= strides[i];
  }
  return o;
}

Outcome ConditionalKernel::sample(const Outcome& in, Rng& rng) const {
  const auto& r = rows_[input_index(in)];
  const double u = rng.uniform();
  double acc = 0;
  for (size_t i = 0; i < r.size(); ++i) {
    acc += r[i];
    if (u < acc) return output_of(i);
  }
  return output_of(r.size() - 1);
}

ConditionalKernel ConditionalKernel::identity(const std::vector<Variable>& inputs,
                                              const std::vector<std::string>& output_names) {
  if (output_names.size() != inputs.size())
    throw std::invalid_argument("identity kernel needs one output name per input");
  std::vector<Variable> outs;
  for (size_t i = 0; i < inputs.size(); ++i) outs.push_back({output_names[i], inputs[i].size});
  const uint64_t cells = cells_of(inputs);
  std::vector<std::vector<double>> rows(cells, std::vector<double>(cells, 0.0));
  for (uint64_t i = 0; i < cells; ++i) rows[i][i] = 1.0;
  return ConditionalKernel(inputs, std::move(outs), std::move(rows));
}

ConditionalKernel conditional(const JointPMF& p, const std::vector<std::string>& target,
                              const std::vector<std::string>& given) {
  std::set<std::string> tset(target.begin(), target.end());
  for (const auto& g : given)
    if (tset.count(g)) throw std::invalid_argument("target and given must be disjoint: " + g);

  std::vector<Variable> in_vars, out_vars;
  for (const auto& name : given) in_vars.push_back(p.variables()[static_cast<size_t>(p.require_variable(name))]);
  for (const auto& name : target) out_vars.push_back(p.variables()[static_cast<size_t>(p.require_variable(name))]);

  const uint64_t in_cells = cells_of(in_vars);
  const uint64_t out_cells = cells_of(out_vars);
  std::vector<std::vector<double>> rows(in_cells, std::vector<double>(out_cells, 0.0));
  std::vector<double> mass(in_cells, 0.0);

  auto in_strides = strides_for(in_vars);
  auto out_strides = strides_for(out_vars);
  std::vector<int> in_idx, out_idx;
  for (const auto& name : given) in_idx.push_back(p.require_variable(name));
  for (const auto& name : target) out_idx.push_back(p.require_variable(name));

  for (uint64_t idx = 0; idx < p.table_size(); ++idx) {
    const double w = p.probs()[idx];
    if (w == 0) continue;
    Outcome o = p.outcome_of(idx);
    uint64_t ri = 0, ci = 0;
    for (size_t k = 0; k < in_idx.size(); ++k) ri += o[static_cast<size_t>(in_idx[k])] * in_strides[k];
    for (size_t k = 0; k < out_idx.size(); ++k) ci += o[static_cast<size_t>(out_idx[k])] * out_strides[k];
    rows[ri][ci] += w;
    mass[ri] += w;
  }

  std::vector<bool> flagged(in_cells, false);
  for (uint64_t ri = 0; ri < in_cells; ++ri) {
    if (mass[ri] > 0) {
      for (auto& x : rows[ri]) x /= mass[ri];
    } else {
      // zero conditioning mass: flagged uniform row, never an error here
      flagged[ri] = true;
      for (auto& x : rows[ri]) x = 1.0 / static_cast<double>(out_cells);
    }
  }
  return ConditionalKernel(std::move(in_vars), std::move(out_vars), std::move(rows),
                           std::move(flagged));
}

JointPMF compose(const JointPMF& prior, const ConditionalKernel& k, uint64_t budget) {
  std::vector<int> in_idx;
  for (const auto& v : k.input_variables()) {
    const int i = prior.require_variable(v.name);
    if (prior.variables()[static_cast<size_t>(i)].size != v.size)
      throw std::invalid_argument("kernel input alphabet mismatch for " + v.name);
    in_idx.push_back(i);
  }
  for (const auto& v : k.output_variables())
    if (prior.variable_index(v.name) >= 0)
      throw std::invalid_argument("kernel output name collides with prior variable: " + v.name);

  std::vector<Variable> jvars = prior.variables();
  jvars.insert(jvars.end(), k.output_variables().begin(), k.output_variables().end());
  const uint64_t out_cells = k.output_cells() ? k.output_cells() : 1;
  if (prior.table_size() > budget / out_cells)
    throw BudgetExceeded("composed table exceeds budget");

  std::vector<double> jp(prior.table_size() * out_cells, 0.0);
  for (uint64_t idx = 0; idx < prior.table_size(); ++idx) {
    const double w = prior.probs()[idx];
    Outcome o = prior.outcome_of(idx);
    Outcome in(in_idx.size());
    for (size_t t = 0; t < in_idx.size(); ++t) in[t] = o[static_cast<size_t>(in_idx[t])];
    const auto& row = k.row(in);
    for (uint64_t oc = 0; oc < out_cells; ++oc) jp[idx * out_cells + oc] = w * row[oc];
  }
  return JointPMF(std::move(jvars), std::move(jp));
}

JointPMF make_bernoulli(const std::string& name, double p1) {
  return JointPMF({{name, 2}}, {1.0 - p1, p1});
}

JointPMF make_uniform(const std::string& name, uint32_t size) {
  return JointPMF({{name, size}}, std::vector<double>(size, 1.0 / size));
}

JointPMF make_dsbs(const std::string& z1, const std::string& z2, double flip) {
  const double same = (1.0 - flip) / 2.0, diff = flip / 2.0;
  return JointPMF({{z1, 2}, {z2, 2}}, {same, diff, diff, same});
}

ConditionalKernel make_bsc(const std::string& input, const std::string& output, double flip) {
  return ConditionalKernel({{input, 2}}, {{output, 2}},
                           {{1.0 - flip, flip}, {flip, 1.0 - flip}});
}

JointPMF product(const JointPMF& a, const JointPMF& b) {
  std::vector<Variable> vars = a.variables();
  vars.insert(vars.end(), b.variables().begin(), b.variables().end());
  std::vector<double> p;
  p.reserve(a.table_size() * b.table_size());
  for (double x : a.probs())
    for (double y : b.probs()) p.push_back(x * y);
  return JointPMF(std::move(vars), std::move(p));
}

}  // namespace crng
