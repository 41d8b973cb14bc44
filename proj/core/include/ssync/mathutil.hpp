#pragma once

#include <bit>
#include <cstdint>

namespace ssync {

// floor(lg x) for x >= 1.
inline unsigned floor_lg(uint64_t x) { return 63u - static_cast<unsigned>(std::countl_zero(x)); }

// ceil(lg x) for x >= 1; ceil_lg(1) = 0.
inline unsigned ceil_lg(uint64_t x) { return x <= 1 ? 0u : floor_lg(x - 1) + 1; }

inline uint64_t reverse_bits(uint64_t v) {
  v = ((v >> 1) & 0x5555555555555555ull) | ((v & 0x5555555555555555ull) << 1);
  v = ((v >> 2) & 0x3333333333333333ull) | ((v & 0x3333333333333333ull) << 2);
  v = ((v >> 4) & 0x0F0F0F0F0F0F0F0Full) | ((v & 0x0F0F0F0F0F0F0F0Full) << 4);
  v = ((v >> 8) & 0x00FF00FF00FF00FFull) | ((v & 0x00FF00FF00FF00FFull) << 8);
  v = ((v >> 16) & 0x0000FFFF0000FFFFull) | ((v & 0x0000FFFF0000FFFFull) << 16);
  return (v >> 32) | (v << 32);
}

// Reverses the low `count` bits of v (count in [1..64]).
inline uint64_t reverse_low(uint64_t v, unsigned count) { return reverse_bits(v) >> (64 - count); }

inline uint64_t low_bits(unsigned count) {
  return count >= 64 ? ~uint64_t{0} : ((uint64_t{1} << count) - 1);
}

inline uint64_t ipow(uint64_t base, unsigned e) {
  uint64_t r = 1;
  while (e--) r *= base;
  return r;
}

}  // namespace ssync
