#include "apir/adversary.hpp"

#include <algorithm>

#include "apir/errors.hpp"
#include "apir/polynomial.hpp"
#include "apir/sharing.hpp"

namespace apir {
namespace {

std::vector<std::size_t> members_of(const AdversaryView& view) {
  std::vector<std::size_t> out;
  for (const auto& [j, q] : view.queries) out.push_back(j);
  return out;
}

class HonestAdversary final : public Adversary {
 public:
  std::string name() const override { return "honest"; }
  AdversaryMove tamper(const AdversaryView&, RandomSource&) const override { return {}; }
};

// Shifts component 0 by delta = 1 and sets the tag shift to guess * delta.
class TagForger final : public Adversary {
 public:
  explicit TagForger(bool use_leak) : use_leak_(use_leak) {}

  std::string name() const override { return use_leak_ ? "oracle_cheater" : "tag_guess"; }
  bool wants_key_leak() const override { return use_leak_; }

  AdversaryMove tamper(const AdversaryView& view, RandomSource& rng) const override {
    AdversaryMove move;
    if (view.queries.empty()) return move;
    const PrimeField& field = view.params.field;
    FieldElement guess = sample_uniform(field, true, rng);
    if (use_leak_) {
      if (!view.leaked_key) throw UsageError("oracle_cheater needs the leaked key");
      guess = *view.leaked_key;
    }
    const FieldElement delta = field.one();
    const auto plan = plan_forgery(view.params, members_of(view), delta, guess * delta);
    move.answers = honest_answers(view);
    for (const auto& [j, off] : plan.data_offsets) move.answers.at(j).a[0] += off;
    for (const auto& [j, off] : plan.tag_offsets) move.answers.at(j).b[0] += off;
    return move;
  }

 private:
  bool use_leak_;
};

class SelectiveProbe final : public Adversary {
 public:
  std::string name() const override { return "probe"; }
  AdversaryMove tamper(const AdversaryView& view, RandomSource&) const override {
    AdversaryMove move;
    if (view.queries.empty()) return move;
    const auto& [j, q] = *view.queries.begin();
    if (q.f_shares.front().is_zero()) {
      Answer a = ans(view.db, q);
      a.b[0] += view.params.field.one();
      move.answers.emplace(j, std::move(a));
    }
    return move;
  }
};

// Answers from a database whose first record is incremented componentwise:
// the classic selective-failure move against unauthenticated PIR.
class SwapRecord final : public Adversary {
 public:
  std::string name() const override { return "swap_record"; }
  AdversaryMove tamper(const AdversaryView& view, RandomSource&) const override {
    AdversaryMove move;
    move.answers = honest_answers(view);
    for (auto& [j, answer] : move.answers) {
      const Query& q = view.queries.at(j);
      for (std::size_t c = 0; c < view.params.w; ++c) {
        answer.a[c] += q.f_shares[0];
        answer.b[c] += q.h_shares[0];
      }
    }
    return move;
  }
};

class FlipComponent final : public Adversary {
 public:
  explicit FlipComponent(bool tag) : tag_(tag) {}
  std::string name() const override { return tag_ ? "flip_tag" : "flip_data"; }
  AdversaryMove tamper(const AdversaryView& view, RandomSource&) const override {
    AdversaryMove move;
    if (view.queries.empty()) return move;
    const auto& [j, q] = *view.queries.begin();
    Answer a = ans(view.db, q);
    (tag_ ? a.b : a.a)[0] += view.params.field.one();
    move.answers.emplace(j, std::move(a));
    return move;
  }

 private:
  bool tag_;
};

// Tag offsets on two members weighted so the reconstructed tag is unchanged.
// Rec accepts the correct block even though answers were altered.
class BenignShift final : public Adversary {
 public:
  std::string name() const override { return "benign_shift"; }
  AdversaryMove tamper(const AdversaryView& view, RandomSource&) const override {
    AdversaryMove move;
    if (view.queries.size() < 2) return move;
    const PrimeField& field = view.params.field;
    const auto weights = lagrange_weights_at_zero(canonical_points(field, view.params.ell));
    auto it = view.queries.begin();
    const std::size_t j1 = it->first;
    const std::size_t j2 = (++it)->first;
    move.answers = honest_answers(view);
    move.answers.at(j1).b[0] += field.one();
    move.answers.at(j2).b[0] -= weights[j1 - 1] / weights[j2 - 1];
    return move;
  }
};

}  // namespace

bool Adversary::decide(const AdversaryState&, bool accepted) const { return accepted; }

ForgeryPlan plan_forgery(const SchemeParams& params, const std::vector<std::size_t>& coalition,
                         const FieldElement& delta, const FieldElement& gamma) {
  ForgeryPlan plan;
  if (coalition.empty()) return plan;
  const PrimeField& field = params.field;
  std::vector<std::size_t> honest;
  for (std::size_t j = 1; j <= params.ell; ++j) {
    if (std::find(coalition.begin(), coalition.end(), j) == coalition.end()) honest.push_back(j);
  }
  if (honest.size() <= params.t) {
    // e(x) = delta * prod_{h honest} (h - x) / h: degree |honest| <= t, e(0) = delta.
    for (std::size_t j : coalition) {
      FieldElement e = delta;
      for (std::size_t h : honest) e *= (field.element(h) - field.element(j)) / field.element(h);
      plan.data_offsets.emplace(j, e);
    }
  } else {
    const std::size_t j0 = coalition.front();
    const auto data_weights = lagrange_weights_at_zero(canonical_points(field, params.t + 1));
    plan.data_offsets.emplace(j0, j0 <= params.t + 1 ? delta / data_weights[j0 - 1] : delta);
  }
  const auto tag_weights = lagrange_weights_at_zero(canonical_points(field, params.ell));
  const std::size_t j0 = coalition.front();
  plan.tag_offsets.emplace(j0, gamma / tag_weights[j0 - 1]);
  return plan;
}

std::map<std::size_t, Answer> honest_answers(const AdversaryView& view) {
  std::map<std::size_t, Answer> out;
  for (const auto& [j, q] : view.queries) out.emplace(j, ans(view.db, q));
  return out;
}

std::unique_ptr<Adversary> make_adversary(std::string_view name) {
  if (name == "honest") return std::make_unique<HonestAdversary>();
  if (name == "tag_guess") return std::make_unique<TagForger>(false);
  if (name == "oracle_cheater") return std::make_unique<TagForger>(true);
  if (name == "probe") return std::make_unique<SelectiveProbe>();
  if (name == "swap_record") return std::make_unique<SwapRecord>();
  if (name == "flip_tag") return std::make_unique<FlipComponent>(true);
  if (name == "flip_data") return std::make_unique<FlipComponent>(false);
  if (name == "benign_shift") return std::make_unique<BenignShift>();
  throw UsageError("unknown adversary '" + std::string(name) + "'");
}

std::vector<std::string> adversary_names() {
  return {"honest", "tag_guess", "oracle_cheater", "probe", "swap_record", "flip_tag", "flip_data", "benign_shift"};
}

FixedSubstitution::FixedSubstitution(Kind kind, std::size_t member, Answer value)
    : kind_(kind), member_(member), value_(std::move(value)) {}

std::string FixedSubstitution::name() const {
  return kind_ == Kind::offset ? "fixed_offset" : "fixed_constant";
}

AdversaryMove FixedSubstitution::tamper(const AdversaryView& view, RandomSource&) const {
  AdversaryMove move;
  const auto it = view.queries.find(member_);
  if (it == view.queries.end()) throw UsageError("substituted member is not in the coalition");
  if (kind_ == Kind::constant) {
    move.answers.emplace(member_, value_);
    return move;
  }
  Answer a = ans(view.db, it->second);
  for (std::size_t c = 0; c < a.a.size(); ++c) {
    a.a[c] += value_.a.at(c);
    a.b[c] += value_.b.at(c);
  }
  move.answers.emplace(member_, std::move(a));
  return move;
}

}  // namespace apir
