#include "crng/linprog.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crng {
namespace {

constexpr double kEps = 1e-9;

// Standard-form tableau over columns [structural | slacks | artificials | rhs].
// Rows are normalized to nonnegative rhs; every row gets an artificial and
// phase 1 drives their sum to zero. Bland's rule prevents cycling.
class Tableau {
 public:
  Tableau(const std::vector<std::vector<double>>& a, const std::vector<double>& b, int n_struct)
      : m_(static_cast<int>(a.size())), n_struct_(n_struct) {
    slack0_ = n_struct_;
    art0_ = n_struct_ + m_;
    n_total_ = n_struct_ + 2 * m_;
    rows_.assign(static_cast<size_t>(m_), std::vector<double>(static_cast<size_t>(n_total_) + 1, 0.0));
    basis_.assign(static_cast<size_t>(m_), -1);
    for (int i = 0; i < m_; ++i) {
      auto& row = rows_[static_cast<size_t>(i)];
      const double sign = b[static_cast<size_t>(i)] < 0 ? -1.0 : 1.0;
      for (int j = 0; j < n_struct_; ++j)
        row[static_cast<size_t>(j)] = sign * a[static_cast<size_t>(i)][static_cast<size_t>(j)];
      row[static_cast<size_t>(slack0_ + i)] = sign;
      row[static_cast<size_t>(art0_ + i)] = 1.0;
      row.back() = sign * b[static_cast<size_t>(i)];
      if (sign > 0) {
        basis_[static_cast<size_t>(i)] = slack0_ + i;
        row[static_cast<size_t>(art0_ + i)] = 0.0;  // not needed for this row
      } else {
        basis_[static_cast<size_t>(i)] = art0_ + i;
      }
    }
  }

  bool phase1() {
    std::vector<double> obj(static_cast<size_t>(n_total_), 0.0);
    bool any_art = false;
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<size_t>(i)] >= art0_) any_art = true;
      obj[static_cast<size_t>(art0_ + i)] = -1.0;  // maximize -(artificial sum)
    }
    if (!any_art) return true;
    run(obj, /*allow_artificials=*/true);
    for (int i = 0; i < m_; ++i)
      if (basis_[static_cast<size_t>(i)] >= art0_ && rows_[static_cast<size_t>(i)].back() > kEps)
        return false;
    drive_out_artificials();
    return true;
  }

  // Pivot zero-level artificials out of the basis so phase 2 cannot lift
  // them. A row with no usable pivot column is a redundant constraint and
  // stays inert (all non-artificial coefficients zero).
  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<size_t>(i)] < art0_) continue;
      for (int j = 0; j < art0_; ++j) {
        if (std::abs(rows_[static_cast<size_t>(i)][static_cast<size_t>(j)]) > kEps) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  bool phase2(const std::vector<double>& c_struct, double* value) {
    std::vector<double> obj(static_cast<size_t>(n_total_), 0.0);
    for (int j = 0; j < n_struct_; ++j)
      obj[static_cast<size_t>(j)] = c_struct[static_cast<size_t>(j)];
    if (!run(obj, /*allow_artificials=*/false)) return false;
    double v = 0;
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[static_cast<size_t>(i)];
      if (j >= 0 && j < n_struct_)
        v += c_struct[static_cast<size_t>(j)] * rows_[static_cast<size_t>(i)].back();
    }
    *value = v;
    return true;
  }

  std::vector<double> solution(int n_struct) const {
    std::vector<double> x(static_cast<size_t>(n_struct), 0.0);
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[static_cast<size_t>(i)];
      if (j >= 0 && j < n_struct) x[static_cast<size_t>(j)] = rows_[static_cast<size_t>(i)].back();
    }
    return x;
  }

 private:
  bool run(const std::vector<double>& obj, bool allow_artificials) {
    const int limit = allow_artificials ? n_total_ : art0_;
    for (int iter = 0; iter < 10000; ++iter) {
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        double red = obj[static_cast<size_t>(j)];
        for (int i = 0; i < m_; ++i) {
          const int bj = basis_[static_cast<size_t>(i)];
          if (bj >= 0 && obj[static_cast<size_t>(bj)] != 0)
            red -= obj[static_cast<size_t>(bj)] *
                   rows_[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
        if (red > kEps) {
          enter = j;  // Bland: lowest improving index
          break;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double aij = rows_[static_cast<size_t>(i)][static_cast<size_t>(enter)];
        if (aij > kEps) {
          const double ratio = rows_[static_cast<size_t>(i)].back() / aij;
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps &&
               (leave < 0 || basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

  void pivot(int row, int col) {
    auto& prow = rows_[static_cast<size_t>(row)];
    const double pv = prow[static_cast<size_t>(col)];
    for (auto& x : prow) x /= pv;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      auto& r = rows_[static_cast<size_t>(i)];
      const double f = r[static_cast<size_t>(col)];
      if (std::abs(f) < 1e-14) continue;
      for (size_t j = 0; j < r.size(); ++j) r[j] -= f * prow[j];
    }
    basis_[static_cast<size_t>(row)] = col;
  }

  int m_;
  int n_struct_;
  int slack0_;
  int art0_;
  int n_total_;
  std::vector<std::vector<double>> rows_;
  std::vector<int> basis_;
};

}  // namespace

LpResult lp_maximize(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                     const std::vector<double>& c) {
  if (a.size() != b.size()) throw std::invalid_argument("lp row count mismatch");
  const size_t n = c.size();
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("lp column count mismatch");

  LpResult result;
  if (a.empty()) {
    bool zero_obj = true;
    for (double x : c)
      if (std::abs(x) > kEps) zero_obj = false;
    result.status = zero_obj ? LpStatus::Optimal : LpStatus::Unbounded;
    result.value = 0;
    result.x.assign(n, 0.0);
    return result;
  }

  // free variables split as x = x+ - x-
  std::vector<std::vector<double>> a2(a.size(), std::vector<double>(2 * n));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < n; ++j) {
      a2[i][j] = a[i][j];
      a2[i][n + j] = -a[i][j];
    }
  std::vector<double> c2(2 * n);
  for (size_t j = 0; j < n; ++j) {
    c2[j] = c[j];
    c2[n + j] = -c[j];
  }

  Tableau t(a2, b, static_cast<int>(2 * n));
  if (!t.phase1()) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  double value = 0;
  if (!t.phase2(c2, &value)) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  result.status = LpStatus::Optimal;
  result.value = value;
  auto split = t.solution(static_cast<int>(2 * n));
  result.x.resize(n);
  for (size_t j = 0; j < n; ++j) result.x[j] = split[j] - split[n + j];
  return result;
}

}  // namespace crng
