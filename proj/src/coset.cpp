#include "crng/coset.hpp"

#include <string>

namespace crng {
namespace {

struct Echelon {
  std::vector<std::vector<uint32_t>> rows;  // reduced rows, each of width cols (+1 if augmented)
  std::vector<int> pivot_col;               // pivot column of each reduced row
  bool inconsistent = false;                // only meaningful for augmented systems
};

// RREF over GF(q). When augmented, the last column carries the rhs and never
// hosts a pivot; a zero row with nonzero rhs marks inconsistency.
Echelon reduce(const FieldMatrix& m, const FieldVector* rhs) {
  const uint32_t q = m.modulus();
  const int cols = m.cols();
  const int width = cols + (rhs ? 1 : 0);
  Echelon e;
  std::vector<std::vector<uint32_t>> work(static_cast<size_t>(m.rows()));
  for (int r = 0; r < m.rows(); ++r) {
    auto& row = work[static_cast<size_t>(r)];
    row.resize(static_cast<size_t>(width));
    for (int c = 0; c < cols; ++c) row[static_cast<size_t>(c)] = m.at(r, c);
    if (rhs) row[static_cast<size_t>(cols)] = (*rhs)[r];
  }

  int next = 0;  // next row position to fill with a pivot
  for (int col = 0; col < cols && next < m.rows(); ++col) {
    int pivot = -1;
    for (int r = next; r < m.rows(); ++r) {
      if (work[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(work[static_cast<size_t>(pivot)], work[static_cast<size_t>(next)]);
    auto& prow = work[static_cast<size_t>(next)];
    const uint32_t inv = gf_inv(prow[static_cast<size_t>(col)], q);
    for (auto& x : prow) x = gf_mul(x, inv, q);
    for (int r = 0; r < m.rows(); ++r) {
      if (r == next) continue;
      auto& row = work[static_cast<size_t>(r)];
      const uint32_t factor = row[static_cast<size_t>(col)];
      if (factor == 0) continue;
      for (int c = 0; c < width; ++c)
        row[static_cast<size_t>(c)] =
            gf_sub(row[static_cast<size_t>(c)], gf_mul(factor, prow[static_cast<size_t>(c)], q), q);
    }
    e.pivot_col.push_back(col);
    ++next;
  }

  if (rhs) {
    for (int r = next; r < m.rows(); ++r)
      if (work[static_cast<size_t>(r)][static_cast<size_t>(cols)] != 0) e.inconsistent = true;
  }
  work.resize(static_cast<size_t>(next));
  e.rows = std::move(work);
  return e;
}

}  // namespace

CosetSystem solve_affine(const FieldMatrix& m, const FieldVector& rhs) {
  if (m.modulus() != rhs.modulus()) throw std::invalid_argument("field modulus mismatch");
  if (m.rows() != rhs.length()) throw std::invalid_argument("rhs length must equal matrix rows");
  const uint32_t q = m.modulus();
  const int n = m.cols();

  Echelon e = reduce(m, &rhs);
  if (e.inconsistent) return CosetSystem::empty(q, n);

  std::vector<bool> is_pivot(static_cast<size_t>(n), false);
  for (int c : e.pivot_col) is_pivot[static_cast<size_t>(c)] = true;

  FieldVector particular(q, n);
  for (size_t r = 0; r < e.rows.size(); ++r)
    particular[e.pivot_col[r]] = e.rows[r][static_cast<size_t>(n)];

  std::vector<FieldVector> kernel;
  std::vector<int> free_coords;
  for (int freec = 0; freec < n; ++freec) {
    if (is_pivot[static_cast<size_t>(freec)]) continue;
    FieldVector v(q, n);
    v[freec] = 1;
    for (size_t r = 0; r < e.rows.size(); ++r)
      v[e.pivot_col[r]] = gf_neg(e.rows[r][static_cast<size_t>(freec)], q);
    kernel.push_back(std::move(v));
    free_coords.push_back(freec);
  }
  return CosetSystem::solved(std::move(particular), std::move(kernel), std::move(free_coords));
}

int matrix_rank(const FieldMatrix& m) {
  return static_cast<int>(reduce(m, nullptr).pivot_col.size());
}

bool CosetSystem::contains(const FieldVector& z) const {
  if (empty_ || z.length() != ambient_ || z.modulus() != q_) return false;
  // Coefficients are read off the free coordinates (kernel vectors are in
  // standard form there); membership means they reconstruct the difference.
  FieldVector delta = z.sub(particular_);
  FieldVector recon(q_, ambient_);
  for (size_t j = 0; j < kernel_.size(); ++j)
    recon.add_scaled_in_place(kernel_[j], delta[free_coords_[j]]);
  return recon == delta;
}

uint64_t CosetSystem::index_of(const FieldVector& z) const {
  if (!contains(z)) throw std::invalid_argument("vector is not a member of the coset");
  FieldVector delta = z.sub(particular_);
  const int k = kernel_dim();
  // Rank of the coefficient tuple in the reflected mixed-radix Gray order
  // used by for_each. Digit j runs reflected exactly when the integer formed
  // by the more significant rank digits is odd (each step of the digits
  // above reverses the traversal below).
  uint64_t rank = 0;
  for (int j = k - 1; j >= 0; --j) {
    const uint32_t d = delta[free_coords_[static_cast<size_t>(j)]];
    const uint32_t v = (rank % 2 == 0) ? d : (q_ - 1 - d);
    rank = rank * q_ + v;
  }
  return rank;
}

void CosetSystem::for_each(const std::function<void(const FieldVector&)>& fn,
                           uint64_t budget) const {
  if (empty_) return;
  const uint64_t total = size();
  if (total == UINT64_MAX || total > budget)
    throw BudgetExceeded("coset of size " + std::to_string(total) +
                         " exceeds enumeration budget " + std::to_string(budget));

  const int k = kernel_dim();
  FieldVector current = particular_;
  if (k == 0) {
    fn(current);
    return;
  }

  // Loopless reflected mixed-radix Gray generation: each step changes one
  // kernel coefficient by +/-1, so the vector update is a single axpy.
  std::vector<uint32_t> digits(static_cast<size_t>(k), 0);
  std::vector<int> dir(static_cast<size_t>(k), +1);
  std::vector<int> focus(static_cast<size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) focus[static_cast<size_t>(i)] = i;

  fn(current);
  for (;;) {
    const int j = focus[0];
    focus[0] = 0;
    if (j == k) break;
    const size_t sj = static_cast<size_t>(j);
    const int step = dir[sj];
    digits[sj] = static_cast<uint32_t>(static_cast<int>(digits[sj]) + step);
    current.add_scaled_in_place(kernel_[sj], step > 0 ? 1 : q_ - 1);
    if (digits[sj] == 0 || digits[sj] == q_ - 1) {
      dir[sj] = -dir[sj];
      focus[sj] = focus[sj + 1];
      focus[sj + 1] = j + 1;
    }
    fn(current);
  }
}

std::vector<FieldVector> CosetSystem::enumerate(uint64_t budget) const {
  std::vector<FieldVector> out;
  if (!empty_) out.reserve(static_cast<size_t>(size()));
  for_each([&](const FieldVector& z) { out.push_back(z); }, budget);
  return out;
}

void walk_coset_product(const std::vector<CosetSystem>& cosets, uint64_t budget,
                        const std::function<bool(const std::vector<FieldVector>&)>& fn) {
  if (cosets.empty()) return;
  uint64_t total = 1;
  for (const auto& cs : cosets) {
    const uint64_t size = cs.size();
    if (size == 0) return;
    if (size == UINT64_MAX || total > budget / size)
      throw BudgetExceeded("product coset exceeds enumeration budget");
    total *= size;
  }
  std::vector<std::vector<FieldVector>> lists;
  for (const auto& cs : cosets) lists.push_back(cs.enumerate(budget));
  std::vector<size_t> idx(cosets.size(), 0);
  std::vector<FieldVector> current;
  for (const auto& l : lists) current.push_back(l[0]);
  for (;;) {
    if (!fn(current)) return;
    size_t k = cosets.size();
    bool done = true;
    while (k-- > 0) {
      if (++idx[k] < lists[k].size()) {
        current[k] = lists[k][idx[k]];
        done = false;
        break;
      }
      idx[k] = 0;
      current[k] = lists[k][0];
    }
    if (done) return;
  }
}

}  // namespace crng
