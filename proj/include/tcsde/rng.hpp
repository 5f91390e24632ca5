#pragma once

// SplitMix64-based random streams (Steele, Lea & Flood 2014; Vigna 2015).
// Every consumer owns its own stream, derived from a run seed and an index
// by a fixed mixing function, so results do not depend on thread count or
// on the platform's std::random implementation.

#include <cmath>
#include <cstdint>

namespace tcsde {

// SplitMix64 finalizer; also used as the stream-derivation hash.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t operator()() { return next(); }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double uniform_open01() {
    return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Standard normal via the Marsaglia polar method (no trig calls).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform_open01() - 1.0;
      v = 2.0 * uniform_open01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // Standard exponential (rate 1).
  double exponential() { return -std::log(uniform_open01()); }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent substream for (seed, index). The algorithm is part
// of the output contract: changing it changes every sampled path.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(mix64(seed) ^ mix64(index)));
}

inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b) {
  return SplitMix64(mix64(mix64(mix64(seed) ^ mix64(a)) ^ mix64(b)));
}

}  // namespace tcsde
