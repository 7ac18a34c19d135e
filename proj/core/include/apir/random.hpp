#pragma once

#include <cstdint>
#include <random>

#include "apir/field.hpp"

namespace apir {

/// Source of uniform integers. Every randomized routine in the library draws
/// through this interface, which lets the exhaustive enumerator (see
/// enumerate.hpp) walk every possible random tape.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  /// Uniform integer in [0, bound). bound must be >= 1.
  virtual std::uint64_t below(std::uint64_t bound) = 0;
};

/// mt19937_64-backed source. below() uses masked rejection sampling, so there
/// is no modulo bias.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t bound) override;

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to expand one master seed into independent streams.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Seed for trial `trial` of stream `stream` under `master`. Stream 0 is the
/// client, 1 the adversary, 2 the simulator.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream) noexcept;

/// Uniform over Z_p, or over Z_p \ {0} when exclude_zero is set.
FieldElement sample_uniform(const PrimeField& field, bool exclude_zero, RandomSource& rng);

}  // namespace apir
