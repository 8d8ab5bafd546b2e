#pragma once

#include <cstdint>
#include <limits>

#include "hcwalk/errors.hpp"

namespace hcwalk {

/// Exact binomial coefficient C(n, k), built multiplicatively so that no
/// factorial is ever formed. Throws if the result does not fit in 64 bits.
[[nodiscard]] constexpr std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) is divisible by i after the multiplication.
    const auto factor = static_cast<std::uint64_t>(n - k + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / factor)
      throw InvalidArgument("binomial coefficient overflows 64 bits");
    result = result * factor / static_cast<std::uint64_t>(i);
  }
  return result;
}

}  // namespace hcwalk
