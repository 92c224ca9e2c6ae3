#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "crng/coset.hpp"
#include "crng/matrix.hpp"
#include "crng/rng.hpp"
#include "crng/vector.hpp"

namespace crng {

enum class EnsembleKind {
  UniformLinear,       // i.i.d. uniform matrix entries
  SparseColumnWeight,  // every column has exactly w nonzero entries
  RandomBinningTable,  // explicit uniform function table on the whole domain
};

// An ensemble of hash functions GF(q)^cols -> GF(q)^rows (codomain indices
// for the table kind). All three kinds place the uniform distribution on a
// finite family, which is what the enumerators below walk.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::UniformLinear;
  uint32_t q = 2;
  int rows = 1;
  int cols = 1;
  int column_weight = 0;  // only for SparseColumnWeight

  void validate() const;

  uint64_t domain_size() const;  // q^cols
  uint64_t image_space_size() const;  // q^rows

  // Number of functions in the family; throws BudgetExceeded past the budget.
  uint64_t family_size(uint64_t budget = kDefaultEnumerationBudget) const;
};

// Explicit function table: codeword index (base-q rank) per domain point.
struct FunctionTable {
  uint32_t q = 2;
  int rows = 1;
  int cols = 1;
  std::vector<uint64_t> codeword_index;  // size q^cols
};

// A sampled hash function: a matrix for the linear kinds, a table otherwise.
class HashFunction {
 public:
  explicit HashFunction(FieldMatrix m) : impl_(std::move(m)) {}
  explicit HashFunction(FunctionTable t) : impl_(std::move(t)) {}

  bool is_linear() const { return std::holds_alternative<FieldMatrix>(impl_); }
  const FieldMatrix& matrix() const {
    if (!is_linear()) throw std::logic_error("table-backed hash function has no matrix form");
    return std::get<FieldMatrix>(impl_);
  }

  int rows() const;
  int cols() const;
  uint32_t modulus() const;

  FieldVector apply(const FieldVector& z) const;

 private:
  std::variant<FieldMatrix, FunctionTable> impl_;
};

// Draws one member of the family, uniformly; a pure function of
// (spec, rows, cols, seed stream). The two linear kinds yield a FieldMatrix.
FieldMatrix sample_matrix(const EnsembleSpec& spec, int rows, int cols, Rng& rng);

// Same draw for any kind, wrapped as a HashFunction (tables included).
HashFunction sample_hash(const EnsembleSpec& spec, Rng& rng,
                         uint64_t budget = kDefaultEnumerationBudget);

// Visits every member of the family exactly once, uniform weights. The hash
// property and the two bound verifiers average over these walks.
void for_each_member(const EnsembleSpec& spec, const std::function<void(const HashFunction&)>& fn,
                     uint64_t budget = kDefaultEnumerationBudget);

// Im F = union of member images; the threshold alpha/|Im F| in the hash
// inequality and the bin ranges of the bound verifiers use it. Closed form
// (the full codomain) for UniformLinear and RandomBinningTable; computed by
// enumeration for sparse ensembles, whose single columns cannot always reach
// every codeword.
std::vector<uint64_t> ensemble_image_set(const EnsembleSpec& spec,
                                         uint64_t budget = kDefaultEnumerationBudget);
uint64_t ensemble_image_size(const EnsembleSpec& spec,
                             uint64_t budget = kDefaultEnumerationBudget);

}  // namespace crng
