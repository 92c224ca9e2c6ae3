#include "crng/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crng {
namespace {

// Series expansion of the lower regularized incomplete gamma, valid x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for the upper function, valid x >= a+1 (Lentz).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (a <= 0) throw std::invalid_argument("gamma shape must be positive");
  if (x < 0) throw std::invalid_argument("gamma argument must be nonnegative");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_sf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi-square needs at least one dof");
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

double chi_square_gof_p_value(const std::vector<double>& expected,
                              const std::vector<uint64_t>& observed, double min_expected) {
  if (expected.size() != observed.size() || expected.empty())
    throw std::invalid_argument("expected/observed size mismatch");

  // Pool small-expectation cells into the largest cell.
  size_t biggest = 0;
  for (size_t i = 1; i < expected.size(); ++i)
    if (expected[i] > expected[biggest]) biggest = i;

  std::vector<double> e;
  std::vector<double> o;
  double pooled_e = expected[biggest];
  double pooled_o = static_cast<double>(observed[biggest]);
  for (size_t i = 0; i < expected.size(); ++i) {
    if (i == biggest) continue;
    if (expected[i] < min_expected) {
      pooled_e += expected[i];
      pooled_o += static_cast<double>(observed[i]);
    } else {
      e.push_back(expected[i]);
      o.push_back(static_cast<double>(observed[i]));
    }
  }
  e.push_back(pooled_e);
  o.push_back(pooled_o);
  if (e.size() < 2) return 1.0;  // everything pooled: nothing to test

  double stat = 0;
  for (size_t i = 0; i < e.size(); ++i) {
    if (e[i] <= 0) {
      if (o[i] > 0) return 0.0;  // mass observed where none was possible
      continue;
    }
    const double d = o[i] - e[i];
    stat += d * d / e[i];
  }
  return chi_square_sf(stat, static_cast<int>(e.size()) - 1);
}

WilsonInterval wilson95(uint64_t successes, uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("Wilson interval needs at least one trial");
  const double z = 1.959963984540054;  // Phi^{-1}(0.975)
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace crng
