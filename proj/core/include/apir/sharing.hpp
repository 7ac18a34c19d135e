#pragma once

#include <cstddef>
#include <vector>

#include "apir/field.hpp"
#include "apir/polynomial.hpp"
#include "apir/random.hpp"

namespace apir {

/// One party's share of a secret vector: f_i(server_point) for every coordinate i.
struct ShareVector {
  FieldElement server_point;
  std::vector<FieldElement> values;
};

/// Canonical evaluation points 1..count.
std::vector<FieldElement> canonical_points(const PrimeField& field, std::size_t count);

/// Degree-`degree` Shamir sharing of every coordinate of `secret`.
///
/// Each coordinate gets its own polynomial f_i(x) = secret[i] + c_1 x + ... +
/// c_d x^d with fresh uniform c_k; randomness is drawn coordinate by
/// coordinate, lowest coefficient first. Output j holds f_i(points[j]).
/// Throws UsageError when degree >= points.size() or the points contain 0 or
/// duplicates.
std::vector<ShareVector> share_vector(const std::vector<FieldElement>& secret, std::size_t degree,
                                      const std::vector<FieldElement>& points, RandomSource& rng);

/// Value at zero of the degree-<=d polynomial through the first d+1 shares.
FieldElement reconstruct_at_zero(const std::vector<Point>& shares, std::size_t degree);

}  // namespace apir
