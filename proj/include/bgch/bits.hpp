#pragma once

#include <bit>
#include <cstdint>

namespace bgch {

// all-ones over the valid trailing bits of the last word (d % 64 == 0 -> full)
inline std::uint64_t tail_mask(std::size_t d) {
  const std::size_t r = d % 64;
  return r == 0 ? ~0ULL : ((1ULL << r) - 1);
}

// Count of differing bit positions among the first d bits. Trailing garbage
// in the last word is masked out.
inline std::uint32_t hamming_distance_raw(const std::uint64_t* a,
                                          const std::uint64_t* b,
                                          std::size_t d) {
  const std::size_t words = (d + 63) / 64;
  std::uint32_t dist = 0;
  for (std::size_t w = 0; w + 1 < words; ++w)
    dist += static_cast<std::uint32_t>(std::popcount(a[w] ^ b[w]));
  dist += static_cast<std::uint32_t>(
      std::popcount((a[words - 1] ^ b[words - 1]) & tail_mask(d)));
  return dist;
}

// Q_a . Q_b = d - 2 * D_H for +-1 codes
inline std::int32_t code_dot(const std::uint64_t* a, const std::uint64_t* b,
                             std::size_t d) {
  return static_cast<std::int32_t>(d) -
         2 * static_cast<std::int32_t>(hamming_distance_raw(a, b, d));
}

}  // namespace bgch
