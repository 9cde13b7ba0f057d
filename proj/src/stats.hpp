#pragma once

#include <algorithm>
#include <vector>

namespace streamstab::detail {

/// Median of a nonempty sample; mean of the two middle values for even sizes.
inline double median(std::vector<double> values) {
  const auto n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace streamstab::detail
