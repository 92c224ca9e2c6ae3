#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crng {

inline bool is_prime(uint32_t q) {
  if (q < 2) return false;
  for (uint32_t d = 2; static_cast<uint64_t>(d) * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

inline void check_prime_modulus(uint32_t q) {
  if (!is_prime(q))
    throw std::invalid_argument("field modulus must be prime, got " + std::to_string(q));
}

// Scalar of the prime field GF(q). Vectors and matrices store the modulus
// once and keep raw residues; this type is the checked boundary for scalar
// arguments in public interfaces.
struct FieldElement {
  uint32_t value = 0;
  uint32_t modulus = 2;

  FieldElement() = default;
  FieldElement(uint32_t v, uint32_t q) : value(v % q), modulus(q) { check_prime_modulus(q); }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

// Residue arithmetic on raw values; callers guarantee operands share q.
inline uint32_t gf_add(uint32_t a, uint32_t b, uint32_t q) { return (a + b) % q; }
inline uint32_t gf_sub(uint32_t a, uint32_t b, uint32_t q) { return (a + q - b) % q; }
inline uint32_t gf_neg(uint32_t a, uint32_t q) { return a == 0 ? 0 : q - a; }
inline uint32_t gf_mul(uint32_t a, uint32_t b, uint32_t q) {
  return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % q);
}

inline uint32_t gf_pow(uint32_t a, uint32_t e, uint32_t q) {
  uint32_t r = 1 % q;
  while (e) {
    if (e & 1) r = gf_mul(r, a, q);
    a = gf_mul(a, a, q);
    e >>= 1;
  }
  return r;
}

// Inverse by Fermat; q is prime so a^(q-2) works for a != 0.
inline uint32_t gf_inv(uint32_t a, uint32_t q) {
  if (a % q == 0) throw std::domain_error("inverse of zero in GF(q)");
  return gf_pow(a % q, q - 2, q);
}

}  // namespace crng
