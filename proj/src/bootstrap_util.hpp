#pragma once

// Internal helpers shared by the two bootstrap tests: the upper-tail p-value
// and the order-statistic rejection rule. `sorted` must be ascending.

#include <algorithm>
#include <cmath>
#include <vector>

namespace lrcov::detail {

// p = 1 - #{draws <= stat} / B.
inline double upper_p_value(const std::vector<double>& sorted, double stat) {
  const auto at_most = std::upper_bound(sorted.begin(), sorted.end(), stat) - sorted.begin();
  return 1.0 - static_cast<double>(at_most) / static_cast<double>(sorted.size());
}

// Reject at level alpha iff stat exceeds the floor((1-alpha)B)-th order
// statistic (1-based, clamped into [1, B]).
inline bool reject_at_level(const std::vector<double>& sorted, double stat, double alpha) {
  const int B = static_cast<int>(sorted.size());
  int k = static_cast<int>(std::floor((1.0 - alpha) * B));
  k = std::min(std::max(k, 1), B);
  return stat > sorted[static_cast<std::size_t>(k - 1)];
}

} // namespace lrcov::detail
