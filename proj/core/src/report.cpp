#include "apir/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace apir {

const Rational& ExperimentReport::rate(std::string_view name) const {
  for (const auto& [key, value] : rates) {
    if (key == name) return value;
  }
  throw std::out_of_range("no rate named " + std::string(name));
}

void ExperimentReport::set_rate(std::string name, Rational value) {
  for (auto& [key, v] : rates) {
    if (key == name) {
      v = std::move(value);
      return;
    }
  }
  rates.emplace_back(std::move(name), std::move(value));
}

void ExperimentReport::add_note(std::string key, std::string value) {
  notes.emplace_back(std::move(key), std::move(value));
}

std::string format_rational(const Rational& r) {
  std::ostringstream os;
  os << numerator(r) << '/' << denominator(r);
  return os.str();
}

std::string ExperimentReport::to_text() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "experiment=" << experiment << '\n';
  os << "mode=" << (exhaustive ? "exhaustive" : "monte_carlo") << '\n';
  os << "trials=" << trials << '\n';
  for (const auto& [key, value] : notes) os << key << '=' << value << '\n';
  for (const auto& [key, value] : rates) {
    os << key << '=' << to_double(value) << '\n';
    os << key << ".exact=" << format_rational(value) << '\n';
  }
  if (statistical_distance) {
    os << "statistical_distance=" << to_double(*statistical_distance) << '\n';
    os << "statistical_distance.exact=" << format_rational(*statistical_distance) << '\n';
  }
  os << "ci_halfwidth=" << ci_halfwidth << '\n';
  os << "analytic_bound=" << to_double(analytic_bound) << '\n';
  os << "analytic_bound.exact=" << format_rational(analytic_bound) << '\n';
  os << "within_bound=" << (within_bound ? 1 : 0) << '\n';
  os << "seed=" << seed << '\n';
  return os.str();
}

double binomial_halfwidth(double q, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return 4.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
}

}  // namespace apir
