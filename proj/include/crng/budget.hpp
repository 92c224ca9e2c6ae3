#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crng {

// Exact decoders, ensemble walks and block tables are exponential; budgets
// cap their size and exceeding one is an error, never a silent truncation.
inline constexpr uint64_t kDefaultEnumerationBudget = uint64_t{1} << 24;
inline constexpr uint64_t kDefaultTableBudget = uint64_t{1} << 22;  // PMF cells

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crng
