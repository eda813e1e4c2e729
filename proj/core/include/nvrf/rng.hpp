#pragma once

#include <cstdint>
#include <limits>

namespace nvrf {

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: the state is derived from (seed, key...) so any
/// evaluation order yields the same draws for a given key.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
    : state_(splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b))
  {
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()()
  {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

} // namespace nvrf
