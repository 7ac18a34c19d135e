#include "apir/polynomial.hpp"

#include <algorithm>
#include <set>

#include "apir/errors.hpp"

namespace apir {
namespace {

void require_distinct(const std::vector<FieldElement>& xs) {
  std::set<std::uint64_t> seen;
  for (const auto& x : xs) {
    if (!seen.insert(x.value()).second) throw UsageError("duplicate evaluation point");
  }
}

std::vector<FieldElement> xs_of(const std::vector<Point>& points) {
  std::vector<FieldElement> xs;
  xs.reserve(points.size());
  for (const auto& [x, y] : points) xs.push_back(x);
  return xs;
}

}  // namespace

Polynomial::Polynomial(std::vector<FieldElement> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

FieldElement Polynomial::eval(const FieldElement& x) const {
  FieldElement acc = x.field().zero();
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial lagrange_interpolate(const std::vector<Point>& points) {
  if (points.empty()) throw UsageError("interpolation needs at least one point");
  const auto xs = xs_of(points);
  require_distinct(xs);
  const PrimeField field = xs.front().field();
  const std::size_t k = points.size();

  // master(x) = prod_i (x - x_i), degree k.
  std::vector<FieldElement> master{field.one()};
  for (const auto& xi : xs) {
    std::vector<FieldElement> next(master.size() + 1, field.zero());
    for (std::size_t d = 0; d < master.size(); ++d) {
      next[d + 1] += master[d];
      next[d] -= master[d] * xi;
    }
    master = std::move(next);
  }

  std::vector<FieldElement> result(k, field.zero());
  std::vector<FieldElement> basis(k, field.zero());
  for (std::size_t i = 0; i < k; ++i) {
    const FieldElement& xi = xs[i];
    // Synthetic division of master by (x - x_i).
    FieldElement carry = field.zero();
    for (std::size_t d = k; d-- > 0;) {
      carry = master[d + 1] + carry * xi;
      basis[d] = carry;
    }
    const FieldElement denom = Polynomial(basis).eval(xi);
    const FieldElement scale = points[i].second / denom;
    for (std::size_t d = 0; d < k; ++d) result[d] += basis[d] * scale;
  }
  return Polynomial(std::move(result));
}

bool consistent_with_degree(const std::vector<Point>& points, std::size_t d) {
  if (points.size() <= d) {
    throw UsageError("degree check needs more than d points; the check would be vacuous");
  }
  require_distinct(xs_of(points));
  std::vector<Point> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const Point& a, const Point& b) { return a.first.value() < b.first.value(); });
  const Polynomial f = lagrange_interpolate({sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(d + 1)});
  return std::all_of(sorted.begin() + static_cast<std::ptrdiff_t>(d + 1), sorted.end(),
                     [&](const Point& pt) { return f.eval(pt.first) == pt.second; });
}

std::vector<FieldElement> lagrange_weights_at_zero(const std::vector<FieldElement>& xs) {
  if (xs.empty()) throw UsageError("no evaluation points");
  require_distinct(xs);
  for (const auto& x : xs) {
    if (x.is_zero()) throw UsageError("evaluation point 0 is reserved for the secret");
  }
  std::vector<FieldElement> weights;
  weights.reserve(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    FieldElement num = xs[j].field().one();
    FieldElement den = xs[j].field().one();
    for (std::size_t m = 0; m < xs.size(); ++m) {
      if (m == j) continue;
      num *= xs[m];
      den *= xs[m] - xs[j];
    }
    weights.push_back(num / den);
  }
  return weights;
}

}  // namespace apir
