#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "crng/gf.hpp"
#include "crng/vector.hpp"

namespace crng {

// Dense row-major matrix over GF(q). rows <= cols and rows > cols are both
// legal; no rank is assumed anywhere. Rows of GF(2) matrices are additionally
// mirrored into 64-bit masks, which mat_vec_mul and the elimination use when
// cols <= 64; the packing is a storage detail and never changes results.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(uint32_t q, int rows, int cols)
      : q_(q), rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0) {
    check_prime_modulus(q);
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
    repack();
  }
  FieldMatrix(uint32_t q, std::initializer_list<std::initializer_list<uint32_t>> rows) {
    check_prime_modulus(q);
    q_ = q;
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
    a_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("ragged matrix rows");
      for (uint32_t x : r) a_.push_back(x % q);
    }
    repack();
  }

  uint32_t modulus() const { return q_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  uint32_t at(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }
  void set(int r, int c, uint32_t v) {
    a_[static_cast<size_t>(r) * cols_ + c] = v % q_;
    if (bitpacked()) {
      uint64_t m = uint64_t{1} << c;
      if (v % q_)
        bits_[static_cast<size_t>(r)] |= m;
      else
        bits_[static_cast<size_t>(r)] &= ~m;
    }
  }

  bool bitpacked() const { return q_ == 2 && cols_ <= 64; }
  uint64_t row_bits(int r) const { return bits_[static_cast<size_t>(r)]; }

  FieldVector row(int r) const {
    FieldVector v(q_, cols_);
    for (int c = 0; c < cols_; ++c) v[c] = at(r, c);
    return v;
  }

  // Vertical concatenation; realizes stacked systems like (f_s; g_s).
  FieldMatrix stacked_on(const FieldMatrix& below) const {
    if (q_ != below.q_) throw std::invalid_argument("field modulus mismatch");
    if (cols_ != below.cols_) throw std::invalid_argument("column count mismatch in stack");
    FieldMatrix r(q_, rows_ + below.rows_, cols_);
    std::copy(a_.begin(), a_.end(), r.a_.begin());
    std::copy(below.a_.begin(), below.a_.end(), r.a_.begin() + a_.size());
    r.repack();
    return r;
  }

  static FieldMatrix identity(uint32_t q, int n) {
    FieldMatrix m(q, n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  friend bool operator==(const FieldMatrix& a, const FieldMatrix& b) {
    return a.q_ == b.q_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

 private:
  void repack() {
    bits_.assign(static_cast<size_t>(rows_), 0);
    if (!bitpacked()) return;
    for (int r = 0; r < rows_; ++r) {
      uint64_t w = 0;
      for (int c = 0; c < cols_; ++c)
        if (at(r, c)) w |= uint64_t{1} << c;
      bits_[static_cast<size_t>(r)] = w;
    }
  }

  uint32_t q_ = 2;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<uint32_t> a_;
  std::vector<uint64_t> bits_;
};

inline FieldVector mat_vec_mul(const FieldMatrix& m, const FieldVector& v) {
  if (m.modulus() != v.modulus()) throw std::invalid_argument("field modulus mismatch");
  if (m.cols() != v.length()) throw std::invalid_argument("matrix/vector dimension mismatch");
  FieldVector out(m.modulus(), m.rows());
  if (m.bitpacked()) {
    uint64_t packed = 0;
    for (int c = 0; c < v.length(); ++c)
      if (v[c]) packed |= uint64_t{1} << c;
    for (int r = 0; r < m.rows(); ++r)
      out[r] = static_cast<uint32_t>(__builtin_popcountll(m.row_bits(r) & packed) & 1);
    return out;
  }
  const uint32_t q = m.modulus();
  for (int r = 0; r < m.rows(); ++r) {
    uint64_t acc = 0;
    for (int c = 0; c < m.cols(); ++c) acc += static_cast<uint64_t>(m.at(r, c)) * v[c];
    out[r] = static_cast<uint32_t>(acc % q);
  }
  return out;
}

}  // namespace crng
