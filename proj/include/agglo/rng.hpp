#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace agglo {

std::uint64_t splitmix64(std::uint64_t& state);

// Folds a sequence of integers into one well-mixed 64-bit seed.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// xoshiro256** with self-contained variate transforms, so a seed yields the
// same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // [0, 1) with 53 random bits.
  double uniform();
  // (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }
  double normal();       // Marsaglia polar method
  double exponential();  // rate 1
  double sign() { return (next() >> 63) ? -1.0 : 1.0; }

 private:
  std::array<std::uint64_t, 4> s_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace agglo
