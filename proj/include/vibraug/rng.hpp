#pragma once

#include <cmath>
#include <cstdint>

#include "vibraug/error.hpp"

namespace vibraug {

// Stream ids are namespaced by purpose so independently seeded consumers can
// never collide: the top byte tags the purpose, the low bits carry indices.
namespace streams {
constexpr std::uint64_t split = 0x01ull << 56;
constexpr std::uint64_t augment = 0x02ull << 56;
constexpr std::uint64_t synth = 0x03ull << 56;
constexpr std::uint64_t init = 0x04ull << 56;
constexpr std::uint64_t shuffle = 0x05ull << 56;
constexpr std::uint64_t tree = 0x06ull << 56;
constexpr std::uint64_t toy = 0x07ull << 56;
}  // namespace streams

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ seeded from (seed, stream_id) through splitmix64. Output is
// identical on every platform; one (seed, stream) pair always replays the
// same sequence. Normal deviates use the Marsaglia polar method with the
// spare discarded, so consumption counts stay well defined.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t sm = seed ^ (0xa0761d6478bd642full ^ stream_id);
    for (auto& word : s_) word = splitmix64(sm);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // cannot happen twice
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw Error("uniform_int: empty range");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  double normal(double mean, double stddev) {
    if (stddev <= 0.0) return mean;
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return mean + stddev * u * std::sqrt(-2.0 * std::log(s) / s);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

}  // namespace vibraug
