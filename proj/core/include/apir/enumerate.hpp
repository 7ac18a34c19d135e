#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "apir/random.hpp"

namespace apir {

using Rational = boost::multiprecision::cpp_rational;

/// Encoded outcome of one randomized run; distributions are over these.
using Outcome = std::vector<std::uint64_t>;

/// Largest random-tape space the exhaustive mode will walk.
inline constexpr std::uint64_t kEnumerationCap = std::uint64_t{1} << 24;

/// Random source that walks every random tape of a computation depth-first.
///
/// Each call to below(b) is a branch point with b equally likely children.
/// After a run, advance() moves to the next unvisited tape; the probability of
/// the tape just visited is 1 / leaf_denominator().
class TapeWalker final : public RandomSource {
 public:
  std::uint64_t below(std::uint64_t bound) override;

  /// Prepares the next tape; false once every tape has been visited.
  bool advance();
  std::uint64_t leaf_denominator() const noexcept { return denominator_; }

 private:
  std::vector<std::uint64_t> digits_;
  std::vector<std::uint64_t> bounds_;
  std::size_t position_ = 0;
  std::uint64_t denominator_ = 1;
};

/// Records the draws of a wrapped source so the same tape can be replayed.
class RecordingSource final : public RandomSource {
 public:
  explicit RecordingSource(RandomSource& inner) : inner_(inner) {}
  std::uint64_t below(std::uint64_t bound) override;
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& tape() const noexcept { return tape_; }

 private:
  RandomSource& inner_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> tape_;
};

/// Replays a recorded tape; throws std::logic_error if the consumer diverges.
class ReplaySource final : public RandomSource {
 public:
  explicit ReplaySource(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& tape) : tape_(tape) {}
  std::uint64_t below(std::uint64_t bound) override;

 private:
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& tape_;
  std::size_t position_ = 0;
};

/// Exact finite distribution over outcomes with rational probabilities.
class ExactDistribution {
 public:
  void add(const Outcome& outcome, std::uint64_t denominator, std::uint64_t count = 1);

  Rational probability(const Outcome& outcome) const;
  Rational probability_if(const std::function<bool(const Outcome&)>& event) const;
  std::vector<Outcome> support() const;
  Rational total_mass() const;
  /// Number of tapes added.
  std::uint64_t tapes() const noexcept { return tapes_; }

 private:
  // outcome -> (tape denominator -> number of tapes)
  std::map<Outcome, std::map<std::uint64_t, std::uint64_t>> mass_;
  std::uint64_t tapes_ = 0;
};

/// Runs `experiment` once per random tape and collects the exact outcome
/// distribution. Throws UsageError when the tape space exceeds `cap`; exact
/// claims never silently fall back to sampling.
ExactDistribution enumerate_outcomes(const std::function<Outcome(RandomSource&)>& experiment,
                                     std::uint64_t cap = kEnumerationCap);

/// Half the L1 distance. Throws UsageError when outcome arities differ.
Rational total_variation(const ExactDistribution& a, const ExactDistribution& b);

double to_double(const Rational& r);

}  // namespace apir
