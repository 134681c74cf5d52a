#pragma once

#include <cstdint>
#include <random>

namespace monoreg {

/// splitmix64 mixing step.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic substream engine keyed by up to three counters.
/// The same (seed, a, b, c) always yields the same engine regardless of
/// which worker asks for it, so parallel schedules cannot change results.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ (a + 0x2545f4914f6cdd1dULL));
  s = splitmix64(s ^ (b + 0x9e3779b97f4a7c15ULL));
  s = splitmix64(s ^ (c + 0xd1342543de82ef95ULL));
  return std::mt19937_64(s);
}

}  // namespace monoreg
