#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "apir/field.hpp"

namespace apir {

using Point = std::pair<FieldElement, FieldElement>;

/// Univariate polynomial over Z_p, constant term first. Trailing zero
/// coefficients are never stored, so the zero polynomial has no coefficients.
class Polynomial {
 public:
  explicit Polynomial(std::vector<FieldElement> coeffs);

  const std::vector<FieldElement>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// -1 stands for the zero polynomial's degree of minus infinity.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

  /// Horner evaluation.
  FieldElement eval(const FieldElement& x) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<FieldElement> coeffs_;
};

/// Unique polynomial of degree < points.size() through every point.
/// Throws UsageError on an empty list or duplicate x.
Polynomial lagrange_interpolate(const std::vector<Point>& points);

/// True iff one polynomial of degree <= d passes through every point. The
/// candidate is interpolated through the d+1 points with smallest x and the
/// remaining points are checked against it. Requires points.size() > d.
bool consistent_with_degree(const std::vector<Point>& points, std::size_t d);

/// Weights l_j with sum_j l_j * f(x_j) = f(0) for every f of degree < xs.size().
/// Throws UsageError for x = 0 or duplicates.
std::vector<FieldElement> lagrange_weights_at_zero(const std::vector<FieldElement>& xs);

}  // namespace apir
