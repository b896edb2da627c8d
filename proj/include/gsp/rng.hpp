#pragma once

#include <cmath>
#include <cstdint>

namespace gsp {

// Counter-based RNG (Philox2x64-10). A stream is (seed, stream_id); block i of a
// stream is a pure function of (seed, stream_id, i), so any work partition that
// assigns whole streams to workers reproduces bit-identical output regardless of
// worker count or ordering.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_count = 1;
};

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_id)
      : key_(mix(seed ^ 0x9E3779B97F4A7C15ull) ^ mix(stream_id)) {}

  // Uniform in (0,1); never returns 0 or 1.
  double uniform() {
    const std::uint64_t u = next();
    return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; caches the second variate.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t next() {
    if (sub_ == 0) {
      philox(counter_, key_, block_);
      ++counter_;
      sub_ = 2;
    }
    return block_[2 - (sub_--)];
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static void philox(std::uint64_t counter, std::uint64_t key, std::uint64_t out[2]) {
    constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
    constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;
    std::uint64_t c0 = counter, c1 = 0xA5A5A5A5A5A5A5A5ull, k = key;
    for (int round = 0; round < 10; ++round) {
      const unsigned __int128 prod = static_cast<unsigned __int128>(kMul) * c0;
      const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
      const std::uint64_t lo = static_cast<std::uint64_t>(prod);
      c0 = hi ^ k ^ c1;
      c1 = lo;
      k += kWeyl;
    }
    out[0] = c0;
    out[1] = c1;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::uint64_t block_[2] = {0, 0};
  int sub_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gsp
