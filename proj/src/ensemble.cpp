#include "crng/ensemble.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace crng {
namespace {

uint64_t checked_pow(uint64_t base, uint64_t exp, uint64_t cap) {
  uint64_t r = 1;
  for (uint64_t i = 0; i < exp; ++i) {
    if (r > cap / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<uint64_t>(n - k + i) / static_cast<uint64_t>(i);
  return r;
}

// Unranks the lexicographically `rank`-th k-subset of {0,...,n-1}.
std::vector<int> unrank_combination(int n, int k, uint64_t rank) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(k));
  int start = 0;
  for (int picked = 0; picked < k; ++picked) {
    for (int v = start; v < n; ++v) {
      uint64_t block = binomial(n - v - 1, k - picked - 1);
      if (rank < block) {
        out.push_back(v);
        start = v + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

// Per-column choice count for the sparse ensemble: positions times values.
uint64_t sparse_column_choices(const EnsembleSpec& s) {
  return binomial(s.rows, s.column_weight) *
         checked_pow(s.q - 1, static_cast<uint64_t>(s.column_weight), UINT64_MAX);
}

FieldMatrix sparse_matrix_from_column_ranks(const EnsembleSpec& s,
                                            const std::vector<uint64_t>& ranks) {
  FieldMatrix m(s.q, s.rows, s.cols);
  const uint64_t value_combos = checked_pow(s.q - 1, static_cast<uint64_t>(s.column_weight), UINT64_MAX);
  for (int c = 0; c < s.cols; ++c) {
    uint64_t rank = ranks[static_cast<size_t>(c)];
    const uint64_t comb_rank = rank / value_combos;
    uint64_t value_rank = rank % value_combos;
    std::vector<int> rows_hit = unrank_combination(s.rows, s.column_weight, comb_rank);
    for (int j = s.column_weight - 1; j >= 0; --j) {
      const uint32_t val = 1 + static_cast<uint32_t>(value_rank % (s.q - 1));
      value_rank /= (s.q - 1);
      m.set(rows_hit[static_cast<size_t>(j)], c, val);
    }
  }
  return m;
}

}  // namespace

void EnsembleSpec::validate() const {
  check_prime_modulus(q);
  if (rows < 1 || cols < 1) throw std::invalid_argument("ensemble dimensions must be positive");
  if (kind == EnsembleKind::SparseColumnWeight) {
    if (column_weight < 1) throw std::invalid_argument("column weight must be at least 1");
    if (column_weight > rows)
      throw std::invalid_argument("column weight " + std::to_string(column_weight) +
                                  " exceeds row count " + std::to_string(rows));
  }
}

uint64_t EnsembleSpec::domain_size() const {
  return checked_pow(q, static_cast<uint64_t>(cols), UINT64_MAX);
}

uint64_t EnsembleSpec::image_space_size() const {
  return checked_pow(q, static_cast<uint64_t>(rows), UINT64_MAX);
}

uint64_t EnsembleSpec::family_size(uint64_t budget) const {
  validate();
  uint64_t n = 0;
  switch (kind) {
    case EnsembleKind::UniformLinear:
      n = checked_pow(q, static_cast<uint64_t>(rows) * static_cast<uint64_t>(cols), budget);
      break;
    case EnsembleKind::SparseColumnWeight:
      n = checked_pow(sparse_column_choices(*this), static_cast<uint64_t>(cols), budget);
      break;
    case EnsembleKind::RandomBinningTable: {
      const uint64_t domain = domain_size();
      if (domain == UINT64_MAX || domain > budget)
        throw BudgetExceeded("binning table domain exceeds budget");
      n = 1;
      for (uint64_t i = 0; i < domain; ++i) {
        if (n > budget / image_space_size()) {
          n = UINT64_MAX;
          break;
        }
        n *= image_space_size();
      }
      break;
    }
  }
  if (n == UINT64_MAX || n > budget)
    throw BudgetExceeded("ensemble family size exceeds enumeration budget");
  return n;
}

int HashFunction::rows() const {
  return is_linear() ? matrix().rows() : std::get<FunctionTable>(impl_).rows;
}
int HashFunction::cols() const {
  return is_linear() ? matrix().cols() : std::get<FunctionTable>(impl_).cols;
}
uint32_t HashFunction::modulus() const {
  return is_linear() ? matrix().modulus() : std::get<FunctionTable>(impl_).q;
}

FieldVector HashFunction::apply(const FieldVector& z) const {
  if (is_linear()) return mat_vec_mul(matrix(), z);
  const auto& t = std::get<FunctionTable>(impl_);
  if (z.modulus() != t.q || z.length() != t.cols)
    throw std::invalid_argument("hash input shape mismatch");
  return FieldVector::from_index(t.q, t.rows, t.codeword_index[z.to_index()]);
}

FieldMatrix sample_matrix(const EnsembleSpec& spec, int rows, int cols, Rng& rng) {
  EnsembleSpec s = spec;
  s.rows = rows;
  s.cols = cols;
  // zero-rate encoders are a legal degenerate code: an empty matrix
  if (rows == 0 && cols >= 1 && s.kind != EnsembleKind::RandomBinningTable) {
    check_prime_modulus(s.q);
    return FieldMatrix(s.q, 0, cols);
  }
  s.validate();
  switch (s.kind) {
    case EnsembleKind::UniformLinear: {
      FieldMatrix m(s.q, rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m.set(r, c, static_cast<uint32_t>(rng.below(s.q)));
      return m;
    }
    case EnsembleKind::SparseColumnWeight: {
      FieldMatrix m(s.q, rows, cols);
      std::vector<int> pool(static_cast<size_t>(rows));
      for (int c = 0; c < cols; ++c) {
        for (int i = 0; i < rows; ++i) pool[static_cast<size_t>(i)] = i;
        // partial Fisher-Yates: first w entries become the nonzero positions
        for (int i = 0; i < s.column_weight; ++i) {
          const int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(rows - i)));
          std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
        }
        for (int i = 0; i < s.column_weight; ++i)
          m.set(pool[static_cast<size_t>(i)], c, 1 + static_cast<uint32_t>(rng.below(s.q - 1)));
      }
      return m;
    }
    case EnsembleKind::RandomBinningTable:
      throw std::invalid_argument(
          "RandomBinningTable members are function tables, not matrices; use sample_hash");
  }
  throw std::logic_error("unreachable");
}

HashFunction sample_hash(const EnsembleSpec& spec, Rng& rng, uint64_t budget) {
  spec.validate();
  if (spec.kind != EnsembleKind::RandomBinningTable)
    return HashFunction(sample_matrix(spec, spec.rows, spec.cols, rng));
  const uint64_t domain = spec.domain_size();
  if (domain == UINT64_MAX || domain > budget)
    throw BudgetExceeded("binning table domain too large for explicit table");
  FunctionTable t;
  t.q = spec.q;
  t.rows = spec.rows;
  t.cols = spec.cols;
  t.codeword_index.resize(domain);
  for (auto& cw : t.codeword_index) cw = rng.below(spec.image_space_size());
  return HashFunction(t);
}

void for_each_member(const EnsembleSpec& spec, const std::function<void(const HashFunction&)>& fn,
                     uint64_t budget) {
  const uint64_t total = spec.family_size(budget);
  switch (spec.kind) {
    case EnsembleKind::UniformLinear: {
      const uint64_t cells = static_cast<uint64_t>(spec.rows) * static_cast<uint64_t>(spec.cols);
      for (uint64_t idx = 0; idx < total; ++idx) {
        FieldMatrix m(spec.q, spec.rows, spec.cols);
        uint64_t x = idx;
        for (uint64_t cell = 0; cell < cells; ++cell) {
          m.set(static_cast<int>(cell) / spec.cols, static_cast<int>(cell) % spec.cols,
                static_cast<uint32_t>(x % spec.q));
          x /= spec.q;
        }
        fn(HashFunction(std::move(m)));
      }
      return;
    }
    case EnsembleKind::SparseColumnWeight: {
      const uint64_t per_col = sparse_column_choices(spec);
      std::vector<uint64_t> ranks(static_cast<size_t>(spec.cols), 0);
      for (uint64_t idx = 0; idx < total; ++idx) {
        uint64_t x = idx;
        for (int c = 0; c < spec.cols; ++c) {
          ranks[static_cast<size_t>(c)] = x % per_col;
          x /= per_col;
        }
        fn(HashFunction(sparse_matrix_from_column_ranks(spec, ranks)));
      }
      return;
    }
    case EnsembleKind::RandomBinningTable: {
      const uint64_t domain = spec.domain_size();
      const uint64_t codomain = spec.image_space_size();
      FunctionTable t;
      t.q = spec.q;
      t.rows = spec.rows;
      t.cols = spec.cols;
      t.codeword_index.assign(domain, 0);
      for (uint64_t idx = 0; idx < total; ++idx) {
        uint64_t x = idx;
        for (uint64_t d = 0; d < domain; ++d) {
          t.codeword_index[d] = x % codomain;
          x /= codomain;
        }
        fn(HashFunction(t));
      }
      return;
    }
  }
}

std::vector<uint64_t> ensemble_image_set(const EnsembleSpec& spec, uint64_t budget) {
  spec.validate();
  if (spec.kind != EnsembleKind::SparseColumnWeight) {
    std::vector<uint64_t> all(spec.image_space_size());
    for (uint64_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  std::set<uint64_t> image;
  const uint64_t domain = spec.domain_size();
  if (domain == UINT64_MAX || domain > budget)
    throw BudgetExceeded("sparse image enumeration domain exceeds budget");
  for_each_member(
      spec,
      [&](const HashFunction& f) {
        for (uint64_t zi = 0; zi < domain; ++zi)
          image.insert(f.apply(FieldVector::from_index(spec.q, spec.cols, zi)).to_index());
      },
      budget);
  return std::vector<uint64_t>(image.begin(), image.end());
}

uint64_t ensemble_image_size(const EnsembleSpec& spec, uint64_t budget) {
  spec.validate();
  if (spec.kind != EnsembleKind::SparseColumnWeight) return spec.image_space_size();
  return ensemble_image_set(spec, budget).size();
}

}  // namespace crng
