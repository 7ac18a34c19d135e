#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>

#include "apir/errors.hpp"
#include "apir/field.hpp"
#include "apir/random.hpp"

namespace apir {
namespace {

TEST(PrimeField, RejectsCompositesAndOutOfRange) {
  EXPECT_THROW(PrimeField(0), ValidationError);
  EXPECT_THROW(PrimeField(1), ValidationError);
  EXPECT_THROW(PrimeField(9), ValidationError);
  EXPECT_THROW(PrimeField(561), ValidationError);  // Carmichael
  EXPECT_THROW(PrimeField(PrimeField::kMaxModulus + 1), ValidationError);
  EXPECT_NO_THROW(PrimeField(2));
  EXPECT_NO_THROW(PrimeField(257));
  EXPECT_NO_THROW(PrimeField((std::uint64_t{1} << 61) - 1));
}

TEST(PrimeField, PrimalityMatchesTrialDivision) {
  auto trial = [](std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
      if (n % d == 0) return false;
    }
    return true;
  };
  for (std::uint64_t n = 0; n < 5000; ++n) EXPECT_EQ(is_prime_u64(n), trial(n)) << n;
}

TEST(PrimeField, BitsPerElement) {
  EXPECT_EQ(PrimeField(2).bits_per_element(), 1U);
  EXPECT_EQ(PrimeField(5).bits_per_element(), 2U);
  EXPECT_EQ(PrimeField(257).bits_per_element(), 8U);
  EXPECT_EQ(PrimeField(251).bits_per_element(), 7U);
}

TEST(FieldElement, SmallExamples) {
  const PrimeField f(7);
  EXPECT_EQ((f.element(3) + f.element(5)).value(), 1U);
  EXPECT_EQ((f.element(3) - f.element(5)).value(), 5U);
  EXPECT_EQ((-f.element(3)).value(), 4U);
  EXPECT_EQ((-f.zero()).value(), 0U);
  EXPECT_EQ(f.element(3).inverse().value(), 5U);
  EXPECT_EQ(f.element(10).value(), 3U);
}

TEST(FieldElement, InverseMatchesBruteForce) {
  for (std::uint64_t p : {2ULL, 3ULL, 7ULL, 101ULL, 257ULL}) {
    const PrimeField f(p);
    for (std::uint64_t a = 1; a < p; ++a) {
      std::uint64_t expected = 0;
      for (std::uint64_t x = 1; x < p; ++x) {
        if (a * x % p == 1) expected = x;
      }
      EXPECT_EQ(f.element(a).inverse().value(), expected) << "p=" << p << " a=" << a;
    }
  }
}

TEST(FieldElement, IdentityAndDivision) {
  const PrimeField f(101);
  for (std::uint64_t a = 0; a < 101; ++a) {
    EXPECT_EQ(f.element(a) * f.one(), f.element(a));
    EXPECT_EQ(f.element(a) + f.zero(), f.element(a));
    if (a != 0) EXPECT_EQ((f.element(a) / f.element(a)), f.one());
  }
}

TEST(FieldElement, LargeModulusProductMatchesLongMultiplication) {
  const std::uint64_t p = (std::uint64_t{1} << 61) - 1;
  const PrimeField f(p);
  const std::uint64_t a = p - 2;
  const std::uint64_t b = p - 3;
  // (p-2)(p-3) = 6 mod p
  EXPECT_EQ((f.element(a) * f.element(b)).value(), 6U);
  EXPECT_EQ((f.element(a) + f.element(b)).value(), p - 5);
}

TEST(FieldElement, PowAgreesWithRepeatedProduct) {
  const PrimeField f(13);
  const FieldElement g = f.element(6);
  FieldElement acc = f.one();
  for (std::uint64_t e = 0; e < 30; ++e) {
    EXPECT_EQ(g.pow(e), acc) << e;
    acc *= g;
  }
}

TEST(FieldElement, Errors) {
  const PrimeField f(7);
  const PrimeField g(11);
  EXPECT_THROW(f.zero().inverse(), DomainError);
  EXPECT_THROW(f.one() / f.zero(), DomainError);
  EXPECT_THROW(f.one() + g.one(), UsageError);
  EXPECT_THROW(f.one() * g.one(), UsageError);
  EXPECT_THROW(f.checked(7), ValidationError);
  EXPECT_THROW(FieldElement(9, f), ValidationError);
  EXPECT_EQ(f.checked(6).value(), 6U);
}

TEST(Sampling, SingletonSupport) {
  const PrimeField f(2);
  SeededRandom rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_uniform(f, true, rng).value(), 1U);
}

TEST(Sampling, ExcludeZeroNeverDrawsZero) {
  const PrimeField f(5);
  SeededRandom rng(4);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const auto v = sample_uniform(f, true, rng).value();
    ASSERT_NE(v, 0U);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 4U);
}

TEST(Sampling, ResidueFrequenciesWithinFourSigma) {
  const PrimeField f(5);
  SeededRandom rng(5);
  constexpr int kDraws = 1'000'000;
  std::array<int, 5> counts{};
  for (int i = 0; i < kDraws; ++i) ++counts[sample_uniform(f, false, rng).value()];
  const double q = 0.2;
  const double halfwidth = 4 * std::sqrt(q * (1 - q) / kDraws);
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / kDraws, q, halfwidth);
}

TEST(Sampling, BelowHandlesExtremeBounds) {
  SeededRandom rng(6);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rng.below(1), 0U);
  const std::uint64_t huge = (std::uint64_t{1} << 63) + 5;
  for (int i = 0; i < 100; ++i) EXPECT_LT(rng.below(huge), huge);
}

TEST(Sampling, DerivedSeedsDifferAcrossStreamsAndTrials) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    for (std::uint64_t stream = 0; stream < 3; ++stream) seeds.insert(derive_seed(1, trial, stream));
  }
  EXPECT_EQ(seeds.size(), 300U);
  EXPECT_EQ(derive_seed(9, 4, 1), derive_seed(9, 4, 1));
}

}  // namespace
}  // namespace apir
