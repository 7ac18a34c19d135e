#include <gtest/gtest.h>

#include <map>

#include "apir/enumerate.hpp"
#include "apir/errors.hpp"
#include "apir/polynomial.hpp"
#include "apir/random.hpp"
#include "apir/sharing.hpp"

namespace apir {
namespace {

std::vector<FieldElement> elems(const PrimeField& f, std::initializer_list<std::uint64_t> vs) {
  std::vector<FieldElement> out;
  for (auto v : vs) out.push_back(f.element(v));
  return out;
}

std::vector<Point> points(const PrimeField& f, std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> xy) {
  std::vector<Point> out;
  for (auto [x, y] : xy) out.emplace_back(f.element(x), f.element(y));
  return out;
}

TEST(Polynomial, EvalExamples) {
  const PrimeField f(7);
  EXPECT_EQ(Polynomial(elems(f, {1, 2})).eval(f.element(3)).value(), 0U);
  const Polynomial zero(elems(f, {0, 0}));
  EXPECT_TRUE(zero.is_zero());
  EXPECT_EQ(zero.degree(), -1);
  EXPECT_EQ(zero.eval(f.element(5)).value(), 0U);
}

TEST(Polynomial, EvalMatchesMonomialSum) {
  const PrimeField f(101);
  SeededRandom rng(11);
  std::vector<FieldElement> c;
  for (int i = 0; i < 4; ++i) c.push_back(sample_uniform(f, false, rng));
  c[3] = f.element(17);
  const Polynomial poly(c);
  ASSERT_EQ(poly.degree(), 3);
  for (std::uint64_t x = 0; x < 101; ++x) {
    std::uint64_t sum = 0;
    std::uint64_t power = 1;
    for (const auto& ci : c) {
      sum = (sum + ci.value() * power) % 101;
      power = power * x % 101;
    }
    EXPECT_EQ(poly.eval(f.element(x)).value(), sum) << x;
  }
}

TEST(Interpolation, TwoPointExample) {
  const PrimeField f(7);
  EXPECT_EQ(lagrange_interpolate(points(f, {{1, 3}, {2, 5}})).coeffs(), elems(f, {1, 2}));
}

TEST(Interpolation, SinglePointIsConstant) {
  const PrimeField f(7);
  EXPECT_EQ(lagrange_interpolate(points(f, {{4, 6}})).coeffs(), elems(f, {6}));
}

TEST(Interpolation, RecoversRandomPolynomials) {
  const PrimeField f(257);
  SeededRandom rng(12);
  for (std::size_t d = 0; d < 8; ++d) {
    std::vector<FieldElement> c;
    for (std::size_t i = 0; i <= d; ++i) c.push_back(sample_uniform(f, false, rng));
    c.back() = sample_uniform(f, true, rng);
    const Polynomial poly(c);
    std::vector<Point> pts;
    for (std::size_t i = 0; i <= d; ++i) {
      const FieldElement x = f.element(3 * i + 2);
      pts.emplace_back(x, poly.eval(x));
    }
    EXPECT_EQ(lagrange_interpolate(pts), poly) << "degree " << d;
  }
}

TEST(Interpolation, Errors) {
  const PrimeField f(7);
  EXPECT_THROW(lagrange_interpolate({}), UsageError);
  EXPECT_THROW(lagrange_interpolate(points(f, {{1, 2}, {1, 3}})), UsageError);
}

TEST(DegreeCheck, Examples) {
  const PrimeField f(7);
  EXPECT_TRUE(consistent_with_degree(points(f, {{1, 1}, {2, 3}, {3, 5}}), 1));
  // Line through the first two points gives y(3) = 3.
  EXPECT_FALSE(consistent_with_degree(points(f, {{1, 1}, {2, 2}, {3, 4}}), 1));
  EXPECT_TRUE(consistent_with_degree(points(f, {{1, 1}, {2, 2}, {3, 4}}), 2));
  EXPECT_THROW(consistent_with_degree(points(f, {{1, 1}}), 1), UsageError);
}

TEST(DegreeCheck, MatchesBruteForceOverAllTriples) {
  // Oracle: search every line a + b x over Z_5.
  const PrimeField f(5);
  for (std::uint64_t y1 = 0; y1 < 5; ++y1) {
    for (std::uint64_t y2 = 0; y2 < 5; ++y2) {
      for (std::uint64_t y3 = 0; y3 < 5; ++y3) {
        bool on_line = false;
        for (std::uint64_t a = 0; a < 5; ++a) {
          for (std::uint64_t b = 0; b < 5; ++b) {
            on_line |= (a + b) % 5 == y1 && (a + 2 * b) % 5 == y2 && (a + 3 * b) % 5 == y3;
          }
        }
        EXPECT_EQ(consistent_with_degree(points(f, {{3, y3}, {1, y1}, {2, y2}}), 1), on_line);
      }
    }
  }
}

TEST(LagrangeWeights, Examples) {
  const PrimeField f(7);
  EXPECT_EQ(lagrange_weights_at_zero(elems(f, {1})), elems(f, {1}));
  EXPECT_EQ(lagrange_weights_at_zero(elems(f, {1, 2})), elems(f, {2, 6}));
  EXPECT_THROW(lagrange_weights_at_zero(elems(f, {0, 1})), UsageError);
  EXPECT_THROW(lagrange_weights_at_zero(elems(f, {2, 2})), UsageError);
}

TEST(LagrangeWeights, SumToOne) {
  const PrimeField f(101);
  for (std::size_t k = 1; k < 10; ++k) {
    FieldElement sum = f.zero();
    for (const auto& l : lagrange_weights_at_zero(canonical_points(f, k))) sum += l;
    EXPECT_EQ(sum, f.one()) << k;
  }
}

TEST(Sharing, DegreeZeroCopiesSecret) {
  const PrimeField f(11);
  SeededRandom rng(1);
  const auto shares = share_vector(elems(f, {4, 9}), 0, canonical_points(f, 3), rng);
  for (const auto& s : shares) EXPECT_EQ(s.values, elems(f, {4, 9}));
}

TEST(Sharing, AnyTwoSharesReconstructUnderEveryCoefficient) {
  const PrimeField f(5);
  const auto dist = enumerate_outcomes([&](RandomSource& rng) {
    const auto shares = share_vector(elems(f, {2}), 1, canonical_points(f, 3), rng);
    Outcome out;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        out.push_back(reconstruct_at_zero(
                          {{shares[i].server_point, shares[i].values[0]}, {shares[j].server_point, shares[j].values[0]}},
                          1)
                          .value());
      }
    }
    return out;
  });
  EXPECT_EQ(dist.tapes(), 5U);
  EXPECT_EQ(dist.probability(Outcome{2, 2, 2}), 1);
}

TEST(Sharing, SingleShareIsUniformForEverySecret) {
  const PrimeField f(5);
  for (std::uint64_t secret = 0; secret < 5; ++secret) {
    const auto dist = enumerate_outcomes([&](RandomSource& rng) {
      return Outcome{share_vector(elems(f, {secret}), 1, canonical_points(f, 3), rng)[0].values[0].value()};
    });
    for (std::uint64_t v = 0; v < 5; ++v) EXPECT_EQ(dist.probability(Outcome{v}), Rational(1, 5));
  }
}

TEST(Sharing, Errors) {
  const PrimeField f(11);
  SeededRandom rng(1);
  EXPECT_THROW(share_vector(elems(f, {1}), 3, canonical_points(f, 3), rng), UsageError);
  EXPECT_THROW(share_vector(elems(f, {1}), 1, elems(f, {0, 1}), rng), UsageError);
  EXPECT_THROW(share_vector(elems(f, {1}), 1, elems(f, {2, 2}), rng), UsageError);
  EXPECT_THROW(canonical_points(PrimeField(3), 3), UsageError);
}

TEST(Reconstruct, Examples) {
  const PrimeField f(7);
  EXPECT_EQ(reconstruct_at_zero(points(f, {{1, 4}, {2, 4}}), 0).value(), 4U);
  EXPECT_EQ(reconstruct_at_zero(points(f, {{1, 3}, {2, 5}}), 1).value(), 1U);
}

TEST(Reconstruct, RoundTripsRandomSharings) {
  const PrimeField f(257);
  SeededRandom rng(2);
  std::vector<FieldElement> secret;
  for (int i = 0; i < 6; ++i) secret.push_back(sample_uniform(f, false, rng));
  for (std::size_t d = 0; d < 5; ++d) {
    const auto shares = share_vector(secret, d, canonical_points(f, 5), rng);
    for (std::size_t c = 0; c < secret.size(); ++c) {
      std::vector<Point> pts;
      for (const auto& s : shares) pts.emplace_back(s.server_point, s.values[c]);
      EXPECT_EQ(reconstruct_at_zero(pts, d), secret[c]);
    }
  }
}

}  // namespace
}  // namespace apir
