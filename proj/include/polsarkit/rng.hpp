#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace polsar {

// Counter-based splittable RNG. A stream is identified by a 64-bit key;
// derive() hashes the key with a tag to open an independent stream, so
// per-pixel / per-region streams do not depend on evaluation order.
// Draws within a stream advance splitmix64 state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed), state_(seed) {}

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // one splitmix64 round over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  Rng derive(std::uint64_t tag) const { return Rng(mix(key_, tag)); }
  Rng derive(std::uint64_t tag_a, std::uint64_t tag_b) const {
    return Rng(mix(mix(key_, tag_a), tag_b));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit resolution
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; no cached second value so the stream
  // position is a pure function of the draw count
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // circular complex normal with E[|z|^2] = 1
  std::complex<double> next_circular() {
    const double re = next_gaussian();
    const double im = next_gaussian();
    return {re * 0.70710678118654752440, im * 0.70710678118654752440};
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t state_;
};

}  // namespace polsar
