#include "apir/random.hpp"

#include <bit>

#include "apir/errors.hpp"

namespace apir {

std::uint64_t SeededRandom::below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("below(0) has empty support");
  const std::uint64_t mask =
      bound > (std::uint64_t{1} << 63) ? ~std::uint64_t{0} : std::bit_ceil(bound) - 1;
  for (;;) {
    const std::uint64_t x = engine_() & mask;
    if (x < bound) return x;
  }
}

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream) noexcept {
  return mix_seed(mix_seed(mix_seed(master) ^ trial) ^ (stream * 0xd1b54a32d192ed03ULL));
}

FieldElement sample_uniform(const PrimeField& field, bool exclude_zero, RandomSource& rng) {
  const std::uint64_t p = field.modulus();
  if (exclude_zero) return field.element(1 + rng.below(p - 1));
  return field.element(rng.below(p));
}

}  // namespace apir
