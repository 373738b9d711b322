#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sbts {

//! One step of the SplitMix64 output function.
constexpr std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

//! Seed of the stream identified by `keys` under the run seed. Streams with
//! different key tuples are statistically independent; the derivation does
//! not depend on thread count or evaluation order.
constexpr std::uint64_t
stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
  std::uint64_t h = splitmix64(seed);
  for (auto k : keys)
    h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ull));
  return h;
}

using Rng = std::mt19937_64;

inline Rng
make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
  return Rng(stream_seed(seed, keys));
}

// Stream namespaces, so that e.g. path 3 of a generation run never shares a
// stream with sample 3 of a simulation using the same seed.
enum class Stream : std::uint64_t
{
  generate_path = 1,
  conditional = 2,
  simulate = 3,
  params = 4,
  split = 5,
  restarts = 6,
  metrics = 7,
};

constexpr std::uint64_t
key(Stream s)
{
  return static_cast<std::uint64_t>(s);
}

} // namespace sbts
