#pragma once

#include <cstdint>
#include <vector>

namespace crng {

// Upper regularized incomplete gamma Q(a, x); chi-square p-values need it.
double regularized_gamma_q(double a, double x);

// P(X >= x) for X ~ chi-square with dof degrees of freedom.
double chi_square_sf(double x, int dof);

// Pearson chi-square goodness of fit of observed counts against expected
// counts. Cells with expected < min_expected are pooled into the largest
// cell before the statistic is formed (one fewer dof per pooled cell is not
// charged; pooling keeps the test conservative at desk scale).
double chi_square_gof_p_value(const std::vector<double>& expected,
                              const std::vector<uint64_t>& observed,
                              double min_expected = 5.0);

struct WilsonInterval {
  double estimate = 0;
  double low = 0;
  double high = 0;
};

// 95% Wilson score interval for a Bernoulli proportion.
WilsonInterval wilson95(uint64_t successes, uint64_t trials);

}  // namespace crng
