#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace wgt {

// Reproducible random stream. Draws are defined bit-for-bit from the
// mt19937_64 output (the standard distributions are implementation-defined,
// so they are not used):
//   uniform()  = (word >> 11) * 2^-53, in [0, 1)
//   normal()   = Box-Muller cosine branch from two uniforms, no caching
// A (seed, stream) pair is expanded through std::seed_seq.
class Rng {
 public:
  static constexpr std::string_view kFamily =
      "mt19937_64+seed_seq(seed_lo,seed_hi,stream_lo,stream_hi)/u53/box-muller-cos";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wgt
