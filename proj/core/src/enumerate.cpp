#include "apir/enumerate.hpp"

#include <set>
#include <stdexcept>
#include <string>

#include "apir/errors.hpp"

namespace apir {

std::uint64_t TapeWalker::below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("below(0) has empty support");
  if (position_ < digits_.size()) {
    if (bounds_[position_] != bound) throw std::logic_error("experiment is not deterministic given its tape");
  } else {
    digits_.push_back(0);
    bounds_.push_back(bound);
  }
  if (denominator_ > kEnumerationCap * kEnumerationCap / bound) {
    throw UsageError("random tape too long for exhaustive enumeration");
  }
  denominator_ *= bound;
  return digits_[position_++];
}

bool TapeWalker::advance() {
  digits_.resize(position_);
  bounds_.resize(position_);
  while (!digits_.empty() && digits_.back() + 1 == bounds_.back()) {
    digits_.pop_back();
    bounds_.pop_back();
  }
  position_ = 0;
  denominator_ = 1;
  if (digits_.empty()) return false;
  ++digits_.back();
  return true;
}

std::uint64_t RecordingSource::below(std::uint64_t bound) {
  const std::uint64_t v = inner_.below(bound);
  tape_.emplace_back(bound, v);
  return v;
}

std::uint64_t ReplaySource::below(std::uint64_t bound) {
  if (position_ >= tape_.size() || tape_[position_].first != bound) {
    throw std::logic_error("replayed experiment diverged from its recorded tape");
  }
  return tape_[position_++].second;
}

void ExactDistribution::add(const Outcome& outcome, std::uint64_t denominator, std::uint64_t count) {
  mass_[outcome][denominator] += count;
  tapes_ += count;
}

namespace {

Rational mass_of(const std::map<std::uint64_t, std::uint64_t>& by_denominator) {
  Rational total = 0;
  for (const auto& [den, count] : by_denominator) total += Rational(count) / Rational(den);
  return total;
}

}  // namespace

Rational ExactDistribution::probability(const Outcome& outcome) const {
  const auto it = mass_.find(outcome);
  return it == mass_.end() ? Rational(0) : mass_of(it->second);
}

Rational ExactDistribution::probability_if(const std::function<bool(const Outcome&)>& event) const {
  Rational total = 0;
  for (const auto& [outcome, by_den] : mass_) {
    if (event(outcome)) total += mass_of(by_den);
  }
  return total;
}

std::vector<Outcome> ExactDistribution::support() const {
  std::vector<Outcome> out;
  out.reserve(mass_.size());
  for (const auto& [outcome, by_den] : mass_) out.push_back(outcome);
  return out;
}

Rational ExactDistribution::total_mass() const {
  return probability_if([](const Outcome&) { return true; });
}

ExactDistribution enumerate_outcomes(const std::function<Outcome(RandomSource&)>& experiment, std::uint64_t cap) {
  ExactDistribution dist;
  TapeWalker walker;
  bool first = true;
  do {
    Outcome outcome = experiment(walker);
    if (first && walker.leaf_denominator() > cap) {
      throw UsageError("randomness space of " + std::to_string(walker.leaf_denominator()) +
                       " tapes exceeds the exhaustive cap of " + std::to_string(cap));
    }
    first = false;
    dist.add(outcome, walker.leaf_denominator());
    if (dist.tapes() > cap) throw UsageError("randomness space exceeds the exhaustive cap");
  } while (walker.advance());
  return dist;
}

Rational total_variation(const ExactDistribution& a, const ExactDistribution& b) {
  std::set<Outcome> support;
  std::set<std::size_t> arities;
  for (const auto& o : a.support()) {
    support.insert(o);
    arities.insert(o.size());
  }
  for (const auto& o : b.support()) {
    support.insert(o);
    arities.insert(o.size());
  }
  if (arities.size() > 1) throw UsageError("distributions are over different outcome spaces");
  Rational sum = 0;
  for (const auto& o : support) sum += boost::multiprecision::abs(a.probability(o) - b.probability(o));
  return sum / 2;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace apir
