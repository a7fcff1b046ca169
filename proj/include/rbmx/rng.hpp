#pragma once

#include <cstdint>
#include <random>

#include "rbmx/rational.hpp"

namespace rbmx {

// Platform-independent: raw mt19937_64 output plus rejection sampling,
// no std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  Integer below(const Integer& n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace rbmx
