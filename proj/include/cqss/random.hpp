#pragma once

#include <cstdint>
#include <random>

// Seed derivation and canonical uniform draws.
//
// Every random choice in a session is derived from one root seed. Each round
// owns its own engine (stream `round`, index = round id), so sessions can be
// replayed, chunked across threads, or partially re-run without disturbing
// other rounds' draws. Doubles are mapped from raw engine output by hand
// instead of going through std::uniform_real_distribution, whose output is
// not pinned by the standard; byte-identical transcripts across platforms
// are a feature we test for.

namespace cqss {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
  round = 1,        // all quantum/protocol draws of one round
  sample_draw = 2,  // membership draws for the second check sample
  message = 3,      // demo plaintext generation
};

inline std::uint64_t derive_seed(std::uint64_t root, Stream stream,
                                 std::uint64_t index) noexcept {
  const auto tag = static_cast<std::uint64_t>(stream);
  return splitmix64(splitmix64(root ^ tag * 0xd1b54a32d192ed03ULL) + index);
}

inline std::mt19937_64 make_engine(std::uint64_t root, Stream stream,
                                   std::uint64_t index) {
  return std::mt19937_64{derive_seed(root, stream, index)};
}

// Uniform double in [0, 1) using the top 53 bits of one engine step.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_bit(std::mt19937_64& rng) {
  return uniform01(rng) < 0.5 ? 0 : 1;
}

// Uniform integer in [0, n). Negligibly biased for the small n used here,
// but deterministic, which the bit-exact replay guarantee needs.
inline int uniform_index(std::mt19937_64& rng, int n) {
  const int k = static_cast<int>(uniform01(rng) * n);
  return k < n ? k : n - 1;
}

}  // namespace cqss
