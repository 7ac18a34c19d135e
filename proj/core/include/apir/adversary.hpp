#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apir/random.hpp"
#include "apir/scheme.hpp"

namespace apir {

/// Opaque state carried from the first adversary stage to the second.
struct AdversaryState {
  std::vector<std::uint64_t> words;
};

/// Everything a corrupted coalition sees before answering.
struct AdversaryView {
  const SchemeParams& params;
  const Database& db;
  /// Coalition member (1-based server index) -> the query it received.
  const std::map<std::size_t, Query>& queries;
  /// Out-of-band copy of the client's tag key. Only populated for adversaries
  /// that ask for it, to show the integrity bound is tight once r leaks.
  std::optional<FieldElement> leaked_key;
};

struct AdversaryMove {
  AdversaryState state;
  /// Substituted answers. Coalition members missing here answer honestly.
  std::map<std::size_t, Answer> answers;
};

/// Two-stage malicious coalition strategy.
///
/// All randomness comes from the RandomSource handed to tamper(), which the
/// experiments derive per trial; implementations keep no mutable state, so one
/// instance can serve concurrent trials.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  virtual AdversaryMove tamper(const AdversaryView& view, RandomSource& rng) const = 0;
  /// Output bit given the acceptance bit. Default: report acceptance.
  virtual bool decide(const AdversaryState& state, bool accepted) const;
  virtual bool wants_key_leak() const { return false; }
};

/// Offsets a coalition adds to one answer component.
struct ForgeryPlan {
  std::map<std::size_t, FieldElement> data_offsets;
  std::map<std::size_t, FieldElement> tag_offsets;
};

/// Offsets that shift the reconstructed data value by `delta` and the
/// reconstructed tag by `gamma`.
///
/// When at most t servers stay honest the data offsets follow a degree-<=t
/// polynomial vanishing on the honest points, so the client's degree check
/// still passes. Otherwise only the first coalition member is shifted (and
/// the degree check will reject). The tag offset always lands on the first
/// coalition member. The client accepts the forgery iff gamma = r * delta.
ForgeryPlan plan_forgery(const SchemeParams& params, const std::vector<std::size_t>& coalition,
                         const FieldElement& delta, const FieldElement& gamma);

/// Answers every coalition member would give honestly.
std::map<std::size_t, Answer> honest_answers(const AdversaryView& view);

/// Built-in strategies, by CLI name:
///   honest          substitutes nothing
///   tag_guess       shifts component 0 by 1 and guesses the tag key uniformly
///   oracle_cheater  same forgery with the leaked key (always wins)
///   probe           flips the first member's tag iff its first data share is 0
///   swap_record     answers as if record 1 were incremented
///   flip_tag        always adds 1 to the first member's tag component 0
///   flip_data       always adds 1 to the first member's data component 0
///   benign_shift    cancelling tag offsets on two members (reconstruction unchanged)
/// All of them output beta = b.
std::unique_ptr<Adversary> make_adversary(std::string_view name);
std::vector<std::string> adversary_names();

/// Adds fixed offsets to one coalition member's answer, or replaces it with a
/// fixed answer. Used by the exhaustive substitution sweep.
class FixedSubstitution final : public Adversary {
 public:
  enum class Kind { offset, constant };
  FixedSubstitution(Kind kind, std::size_t member, Answer value);

  std::string name() const override;
  AdversaryMove tamper(const AdversaryView& view, RandomSource& rng) const override;

 private:
  Kind kind_;
  std::size_t member_;
  Answer value_;
};

}  // namespace apir
