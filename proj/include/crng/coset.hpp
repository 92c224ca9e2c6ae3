#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "crng/budget.hpp"
#include "crng/matrix.hpp"
#include "crng/vector.hpp"

namespace crng {

// A linear constraint set m.z = rhs defining an affine coset of GF(q)^n.
struct AffineSystem {
  FieldMatrix m;
  FieldVector rhs;

  AffineSystem(FieldMatrix mat, FieldVector r) : m(std::move(mat)), rhs(std::move(r)) {
    if (m.modulus() != rhs.modulus()) throw std::invalid_argument("field modulus mismatch");
    if (m.rows() != rhs.length())
      throw std::invalid_argument("system rhs length must equal matrix rows");
  }

  int ambient_dim() const { return m.cols(); }

  // Stacks the constraints of two systems over the same space.
  AffineSystem intersected_with(const AffineSystem& other) const {
    if (ambient_dim() != other.ambient_dim())
      throw std::invalid_argument("ambient dimension mismatch in coset intersection");
    std::vector<uint32_t> rhs_values = rhs.values();
    rhs_values.insert(rhs_values.end(), other.rhs.values().begin(), other.rhs.values().end());
    return AffineSystem(m.stacked_on(other.m), FieldVector(m.modulus(), std::move(rhs_values)));
  }
};

// Solved form of {z : m.z = rhs}: a particular solution plus an independent
// kernel basis, or the empty marker for inconsistent systems. Coset size is
// q^(kernel dimension).
class CosetSystem {
 public:
  static CosetSystem empty(uint32_t q, int ambient_dim) {
    CosetSystem cs;
    cs.q_ = q;
    cs.ambient_ = ambient_dim;
    cs.empty_ = true;
    return cs;
  }
  // kernel_basis vectors are expected in standard form: vector j has value 1
  // at free_coords[j] and 0 at every other free coordinate. solve_affine
  // produces exactly this shape.
  static CosetSystem solved(FieldVector particular, std::vector<FieldVector> kernel_basis,
                            std::vector<int> free_coords) {
    if (kernel_basis.size() != free_coords.size())
      throw std::invalid_argument("kernel basis / free coordinate count mismatch");
    CosetSystem cs;
    cs.q_ = particular.modulus();
    cs.ambient_ = particular.length();
    cs.empty_ = false;
    cs.particular_ = std::move(particular);
    cs.kernel_ = std::move(kernel_basis);
    cs.free_coords_ = std::move(free_coords);
    return cs;
  }

  bool is_empty() const { return empty_; }
  uint32_t modulus() const { return q_; }
  int ambient_dim() const { return ambient_; }
  int kernel_dim() const { return static_cast<int>(kernel_.size()); }
  const FieldVector& particular() const { return particular_; }
  const std::vector<FieldVector>& kernel_basis() const { return kernel_; }

  // q^(kernel dim); saturates at UINT64_MAX on overflow.
  uint64_t size() const {
    if (empty_) return 0;
    uint64_t s = 1;
    for (int i = 0; i < kernel_dim(); ++i) {
      if (s > UINT64_MAX / q_) return UINT64_MAX;
      s *= q_;
    }
    return s;
  }

  bool contains(const FieldVector& z) const;

  // Visits every member exactly once in a deterministic order: a reflected
  // mixed-radix Gray walk over the kernel coefficients, so consecutive
  // members differ by +/- one kernel basis vector (Knuth 7.2.1.1 Alg. H).
  void for_each(const std::function<void(const FieldVector&)>& fn,
                uint64_t budget = kDefaultEnumerationBudget) const;

  std::vector<FieldVector> enumerate(uint64_t budget = kDefaultEnumerationBudget) const;

  // Member z maps to the unique coefficient tuple t with particular + K.t = z;
  // returns the Gray-walk visit position of that tuple. Gives each member a
  // stable dense index without enumerating.
  uint64_t index_of(const FieldVector& z) const;

 private:
  uint32_t q_ = 2;
  int ambient_ = 0;
  bool empty_ = true;
  FieldVector particular_;
  std::vector<FieldVector> kernel_;
  std::vector<int> free_coords_;
};

// Reduced row echelon solve with a deterministic pivot rule (leftmost nonzero
// column, first suitable row), so the solved representation is reproducible
// across runs and platforms.
CosetSystem solve_affine(const FieldMatrix& m, const FieldVector& rhs);
inline CosetSystem solve_affine(const AffineSystem& sys) { return solve_affine(sys.m, sys.rhs); }

inline CosetSystem intersect_cosets(const AffineSystem& a, const AffineSystem& b) {
  return solve_affine(a.intersected_with(b));
}

// Rank via the same elimination; used by the |coset| * q^rank == q^n check.
int matrix_rank(const FieldMatrix& m);

// Walks the Cartesian product of solved cosets in a fixed deterministic
// order: per-coset Gray enumerations with the last coordinate fastest.
// Stops early when fn returns false. Empty factors yield no visits.
void walk_coset_product(const std::vector<CosetSystem>& cosets, uint64_t budget,
                        const std::function<bool(const std::vector<FieldVector>&)>& fn);

}  // namespace crng
