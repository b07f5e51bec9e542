#pragma once

#include <cstdint>
#include <random>

#include "bead/bytes.hpp"

namespace bead {

// Single deterministic random stream for a run. std::mt19937_64 output is
// fully specified by the standard; the helpers below avoid std:: distributions
// whose output is implementation-defined, so a given seed produces identical
// draws on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, bound). Modulo bias is below 2^-32 for the bounds used here.
  std::uint64_t uniform_u64(std::uint64_t bound) {
    return bound == 0 ? 0 : next_u64() % bound;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform_real() < p; }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 8 == 0) {
        word_ = next_u64();
      }
      out[i] = static_cast<std::uint8_t>(word_ >> (8 * (i % 8)));
    }
    return out;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_u64(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
  std::uint64_t word_ = 0;
};

}  // namespace bead
