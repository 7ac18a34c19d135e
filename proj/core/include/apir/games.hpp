#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "apir/adversary.hpp"
#include "apir/enumerate.hpp"
#include "apir/report.hpp"
#include "apir/scheme.hpp"

namespace apir {

/// Set of corrupted servers. A privacy coalition has at most t members; an
/// integrity coalition at most ell-1 (this scheme's v).
class Coalition {
 public:
  enum class Role { privacy, integrity };

  static Coalition privacy(const SchemeParams& params, std::vector<std::size_t> members);
  static Coalition integrity(const SchemeParams& params, std::vector<std::size_t> members);

  const std::vector<std::size_t>& members() const noexcept { return members_; }
  Role role() const noexcept { return role_; }
  bool contains(std::size_t j) const;

 private:
  Coalition(Role role, std::vector<std::size_t> members) : role_(role), members_(std::move(members)) {}
  Role role_;
  std::vector<std::size_t> members_;
};

struct RunOptions {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  /// Walk every random tape instead of sampling. Refuses spaces above `cap`.
  bool exhaustive = false;
  std::uint64_t cap = kEnumerationCap;
  /// Worker threads for Monte Carlo runs; 0 picks hardware concurrency.
  unsigned threads = 0;
};

/// The four experiments of the REAL-to-IDEAL hybrid chain.
enum class Hybrid {
  real = 0,          // H0: Que, adversary, Rec decides acceptance
  answer_check = 1,  // H1: as H0, acceptance iff every substituted answer is honest
  simulated = 2,     // H2: as H1 with simulated queries
  ideal = 3,         // H3: Sim0 / adversary / Sim1
};

/// State the simulator keeps between its two stages: honest coalition answers.
struct SimulatorState {
  std::map<std::size_t, Answer> honest;
};

/// Sim0: simulated coalition queries plus the honest answers to them.
std::pair<SimulatorState, std::map<std::size_t, Query>> simulator_first_stage(const SchemeParams& params,
                                                                               const Database& db,
                                                                               const Coalition& coalition,
                                                                               RandomSource& rng);
/// Sim1: acceptance bit, 1 iff every substituted answer equals the honest one.
bool simulator_second_stage(const SimulatorState& state, const std::map<std::size_t, Answer>& substituted);

/// Per-hybrid outcome of one trial; see run_hybrids.
struct HybridTrial {
  bool beta = false;
  bool accepted = false;
  bool tampered = false;
};

// Single trials. `client` drives Que or the simulator, `adversary` drives the
// adversary; passing the same source for both is allowed.
HybridTrial run_hybrid_trial(Hybrid hybrid, const SchemeParams& params, const Database& db, std::size_t alpha,
                             const Adversary& adversary, const Coalition& coalition, RandomSource& client,
                             RandomSource& adversary_rng);

/// Honest runs with uniform alpha. Bound: zero failures.
ExperimentReport run_correctness(const SchemeParams& params, const Database& db, const RunOptions& opts);

/// Integrity game: counts outputs outside {x_alpha, Bot}. Bound: w/(p-1).
ExperimentReport run_integrity_game(const SchemeParams& params, const Database& db, std::size_t alpha,
                                    const Adversary& adversary, const Coalition& coalition,
                                    const RunOptions& opts);

/// REAL_alpha: rates "beta" (Pr[beta=1]) and "accept" (Pr[b=1]).
ExperimentReport run_real_experiment(const SchemeParams& params, const Database& db, std::size_t alpha,
                                     const Adversary& adversary, const Coalition& coalition,
                                     const RunOptions& opts);

/// IDEAL_Sim built from the query simulator. alpha is not an input.
ExperimentReport run_ideal_experiment(const SchemeParams& params, const Database& db, const Adversary& adversary,
                                      const Coalition& coalition, const RunOptions& opts);

/// REAL_alpha for every listed alpha against IDEAL_Sim. Rates beta.real.<a>,
/// beta.ideal; statistical_distance is the largest REAL/IDEAL gap of beta and
/// rate "real_gap" the largest pairwise REAL_a / REAL_b gap. Bound: w/(p-1).
ExperimentReport run_privacy_comparison(const SchemeParams& params, const Database& db,
                                        const std::vector<std::size_t>& alphas, const Adversary& adversary,
                                        const Coalition& coalition, const RunOptions& opts);

/// The hybrid chain H0 (REAL) -> H1 (acceptance from answer equality) -> H2
/// (simulated queries) -> H3 (IDEAL via Sim0/Sim1).
///
/// Monte Carlo trials replay per-trial seeds: H0 and H1 share the client and
/// adversary tapes, H2 and H3 share the simulator and adversary tapes.
/// Rates: W0..W3, b_disagree01, beta_disagree01, beta_disagree23 and
/// coupling_mismatch (trials where the H0/H1 disagreement is not exactly
/// "tampered and accepted"; always 0 for a correct scheme).
ExperimentReport run_hybrids(const SchemeParams& params, const Database& db, std::size_t alpha,
                             const Adversary& adversary, const Coalition& coalition, const RunOptions& opts);

/// Sweeps every fixed substitution (offset added to, or constant replacing,
/// one member's answer) exhaustively. Rates best_offset, best_constant, best.
ExperimentReport sweep_fixed_substitutions(const SchemeParams& params, const Database& db, std::size_t alpha,
                                           const Coalition& coalition, std::uint64_t cap = kEnumerationCap);

using Sampler = std::function<Outcome(RandomSource&)>;

struct DistanceEstimate {
  double value = 0.0;
  std::optional<Rational> exact;
  double ci_halfwidth = 0.0;
};

/// Total variation distance between two samplers: exact by enumeration when
/// opts.exhaustive, otherwise a plug-in estimate from opts.trials draws each.
DistanceEstimate empirical_distribution_distance(const Sampler& a, const Sampler& b, const RunOptions& opts);

/// The coalition's view of Que(alpha), encoded as (j, f_shares, h_shares) per member.
Sampler query_view_sampler(const SchemeParams& params, std::size_t alpha, const std::vector<std::size_t>& coalition);
/// The same view produced by sim_queries.
Sampler simulated_view_sampler(const SchemeParams& params, const std::vector<std::size_t>& coalition);

/// w / (p - 1).
Rational integrity_bound(const SchemeParams& params);

}  // namespace apir
