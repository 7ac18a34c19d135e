#include "apir/sharing.hpp"

#include <set>

#include "apir/errors.hpp"

namespace apir {

std::vector<FieldElement> canonical_points(const PrimeField& field, std::size_t count) {
  if (count >= field.modulus()) throw UsageError("need p > number of evaluation points");
  std::vector<FieldElement> points;
  points.reserve(count);
  for (std::size_t j = 1; j <= count; ++j) points.push_back(field.element(j));
  return points;
}

std::vector<ShareVector> share_vector(const std::vector<FieldElement>& secret, std::size_t degree,
                                      const std::vector<FieldElement>& points, RandomSource& rng) {
  if (points.empty()) throw UsageError("no share points");
  if (degree >= points.size()) throw UsageError("sharing degree must be below the number of shares");
  std::set<std::uint64_t> seen;
  for (const auto& x : points) {
    if (x.is_zero()) throw UsageError("share point 0 would reveal the secret");
    if (!seen.insert(x.value()).second) throw UsageError("duplicate share point");
  }
  const PrimeField field = points.front().field();

  std::vector<ShareVector> shares;
  shares.reserve(points.size());
  for (const auto& x : points) shares.push_back({x, {}});
  for (auto& s : shares) s.values.reserve(secret.size());

  std::vector<FieldElement> coeffs(degree + 1, field.zero());
  for (const auto& s : secret) {
    coeffs[0] = s;
    for (std::size_t k = 1; k <= degree; ++k) coeffs[k] = sample_uniform(field, false, rng);
    const Polynomial f(coeffs);
    for (auto& share : shares) share.values.push_back(f.eval(share.server_point));
  }
  return shares;
}

FieldElement reconstruct_at_zero(const std::vector<Point>& shares, std::size_t degree) {
  if (shares.size() < degree + 1) throw UsageError("not enough shares to reconstruct");
  std::vector<FieldElement> xs;
  xs.reserve(degree + 1);
  for (std::size_t j = 0; j <= degree; ++j) xs.push_back(shares[j].first);
  const auto weights = lagrange_weights_at_zero(xs);
  FieldElement acc = xs.front().field().zero();
  for (std::size_t j = 0; j <= degree; ++j) acc += weights[j] * shares[j].second;
  return acc;
}

}  // namespace apir
