#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apir/enumerate.hpp"

namespace apir {

/// Outcome of one security experiment.
///
/// Rates are exact rationals: hits/trials for Monte Carlo runs and exact
/// probabilities for exhaustive runs. `ci_halfwidth` is a 4-sigma binomial
/// half-width (0 when exhaustive).
struct ExperimentReport {
  std::string experiment;
  std::uint64_t trials = 0;
  bool exhaustive = false;
  std::vector<std::pair<std::string, Rational>> rates;
  std::optional<Rational> statistical_distance;
  double ci_halfwidth = 0.0;
  Rational analytic_bound = 0;
  bool within_bound = false;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> notes;

  /// Throws std::out_of_range for unknown names.
  const Rational& rate(std::string_view name) const;
  void set_rate(std::string name, Rational value);
  void add_note(std::string key, std::string value);

  /// key=value lines, one metric per line, the last one `seed=<u64>`.
  std::string to_text() const;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// 4 * sqrt(q (1 - q) / trials).
double binomial_halfwidth(double q, std::uint64_t trials);

std::string format_rational(const Rational& r);

}  // namespace apir
