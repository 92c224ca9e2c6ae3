#pragma once

#include <vector>

namespace crng {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0;
  std::vector<double> x;
};

// maximize c.x subject to A x <= b, x free (no sign restriction).
// Dense two-phase tableau simplex with Bland's rule; sized for the region
// machinery here (tens of constraints, a handful of variables), not for
// anything larger.
LpResult lp_maximize(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                     const std::vector<double>& c);

}  // namespace crng
