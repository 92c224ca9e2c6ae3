#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "crng/gf.hpp"

namespace crng {

// Vector over GF(q). Immutable in spirit: operations return new values and
// shared instances are safe to read concurrently.
class FieldVector {
 public:
  FieldVector() = default;
  FieldVector(uint32_t q, int length) : q_(q), v_(static_cast<size_t>(length), 0) {
    check_prime_modulus(q);
    if (length < 0) throw std::invalid_argument("negative vector length");
  }
  FieldVector(uint32_t q, std::vector<uint32_t> values) : q_(q), v_(std::move(values)) {
    check_prime_modulus(q);
    for (auto& x : v_) x %= q_;
  }
  FieldVector(uint32_t q, std::initializer_list<uint32_t> values)
      : FieldVector(q, std::vector<uint32_t>(values)) {}

  uint32_t modulus() const { return q_; }
  int length() const { return static_cast<int>(v_.size()); }
  uint32_t operator[](int i) const { return v_[static_cast<size_t>(i)]; }
  uint32_t& operator[](int i) { return v_[static_cast<size_t>(i)]; }
  const std::vector<uint32_t>& values() const { return v_; }

  bool is_zero() const {
    for (uint32_t x : v_)
      if (x) return false;
    return true;
  }

  FieldVector add(const FieldVector& o) const {
    require_same_shape(o);
    FieldVector r(q_, length());
    for (int i = 0; i < length(); ++i) r.v_[i] = gf_add(v_[i], o.v_[i], q_);
    return r;
  }

  FieldVector sub(const FieldVector& o) const {
    require_same_shape(o);
    FieldVector r(q_, length());
    for (int i = 0; i < length(); ++i) r.v_[i] = gf_sub(v_[i], o.v_[i], q_);
    return r;
  }

  FieldVector scaled(uint32_t s) const {
    FieldVector r(q_, length());
    for (int i = 0; i < length(); ++i) r.v_[i] = gf_mul(v_[i], s, q_);
    return r;
  }

  // In-place axpy, used by the Gray-walk coset enumerator.
  void add_scaled_in_place(const FieldVector& o, uint32_t s) {
    require_same_shape(o);
    for (int i = 0; i < length(); ++i) v_[i] = gf_add(v_[i], gf_mul(o.v_[i], s, q_), q_);
  }

  // Rank of this vector's coordinates as a base-q integer, high digit first.
  // Used as a dense index into tables over GF(q)^n.
  uint64_t to_index() const {
    uint64_t idx = 0;
    for (uint32_t x : v_) idx = idx * q_ + x;
    return idx;
  }

  static FieldVector from_index(uint32_t q, int length, uint64_t idx) {
    FieldVector r(q, length);
    for (int i = length - 1; i >= 0; --i) {
      r.v_[static_cast<size_t>(i)] = static_cast<uint32_t>(idx % q);
      idx /= q;
    }
    return r;
  }

  friend bool operator==(const FieldVector& a, const FieldVector& b) {
    return a.q_ == b.q_ && a.v_ == b.v_;
  }

 private:
  void require_same_shape(const FieldVector& o) const {
    if (q_ != o.q_) throw std::invalid_argument("field modulus mismatch");
    if (v_.size() != o.v_.size()) throw std::invalid_argument("vector length mismatch");
  }

  uint32_t q_ = 2;
  std::vector<uint32_t> v_;
};

}  // namespace crng
