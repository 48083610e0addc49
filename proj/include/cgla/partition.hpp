#pragma once

#include <cstdint>

namespace cgla {

/// Burst-aligned split of one vector: the main segment runs on the array,
/// the residual (shorter than one burst) runs on the host.
struct Partition {
  std::uint64_t main_len = 0;
  std::uint64_t residual_len = 0;

  std::uint64_t length() const noexcept { return main_len + residual_len; }
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// main_len = floor(vec_len / burst) * burst. burst must be >= 1.
Partition partition_vector(std::uint64_t vec_len, std::uint64_t burst);

}  // namespace cgla
