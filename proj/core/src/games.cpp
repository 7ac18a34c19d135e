#include "apir/games.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "apir/errors.hpp"

namespace apir {
namespace {

Coalition::Role checked_role(const SchemeParams& params, const std::vector<std::size_t>& members,
                             std::size_t limit, Coalition::Role role) {
  std::set<std::size_t> seen;
  for (std::size_t j : members) {
    if (j < 1 || j > params.ell) throw UsageError("coalition member outside [1, ell]");
    if (!seen.insert(j).second) throw UsageError("duplicate coalition member");
  }
  if (members.size() > limit) throw UsageError("coalition larger than the role allows");
  return role;
}

std::map<std::size_t, Query> restrict_to(const std::vector<Query>& queries, const Coalition& coalition) {
  std::map<std::size_t, Query> out;
  for (std::size_t j : coalition.members()) out.emplace(j, queries[j - 1]);
  return out;
}

void require_inside(const AdversaryMove& move, const Coalition& coalition) {
  for (const auto& [j, a] : move.answers) {
    if (!coalition.contains(j)) throw UsageError("adversary substituted an answer outside its coalition");
  }
}

// Real-world run shared by REAL_alpha / H0 and the integrity game.
struct RealRun {
  AdversaryMove move;
  RetrievalResult result = RetrievalResult::bot();
  bool tampered = false;
};

RealRun run_real(const SchemeParams& params, const Database& db, std::size_t alpha, const Adversary& adversary,
                 const Coalition& coalition, RandomSource& client, RandomSource& adversary_rng) {
  const QueryBundle bundle = que(params, alpha, client);
  const auto coalition_queries = restrict_to(bundle.queries, coalition);
  AdversaryView view{params, db, coalition_queries, std::nullopt};
  if (adversary.wants_key_leak()) view.leaked_key = bundle.aux.r;
  RealRun run;
  run.move = adversary.tamper(view, adversary_rng);
  require_inside(run.move, coalition);

  std::vector<Answer> answers;
  answers.reserve(params.ell);
  for (std::size_t j = 1; j <= params.ell; ++j) {
    Answer honest = ans(db, bundle.queries[j - 1]);
    const auto it = run.move.answers.find(j);
    if (it != run.move.answers.end()) {
      if (it->second != honest) run.tampered = true;
      answers.push_back(it->second);
    } else {
      answers.push_back(std::move(honest));
    }
  }
  run.result = rec(answers, bundle.aux);
  return run;
}

bool answers_match(const std::map<std::size_t, Answer>& honest, const std::map<std::size_t, Answer>& substituted) {
  return std::all_of(substituted.begin(), substituted.end(),
                     [&](const auto& kv) { return honest.at(kv.first) == kv.second; });
}

// Rates of up to 32 per-trial event bits.
struct EventRates {
  std::vector<Rational> rates;
  std::uint64_t trials = 0;
};

using TrialBody = std::function<std::uint32_t(RandomSource& client, RandomSource& adversary)>;

unsigned worker_count(const RunOptions& opts) {
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const unsigned wanted = opts.threads == 0 ? hw : opts.threads;
  return static_cast<unsigned>(std::min<std::uint64_t>(wanted, std::max<std::uint64_t>(1, opts.trials)));
}

// Splits [0, trials) across workers; fn(trial) returns an event bitmask.
std::vector<std::uint64_t> count_events(std::uint64_t trials, unsigned workers, std::size_t events,
                                        const std::function<std::uint32_t(std::uint64_t)>& fn) {
  std::vector<std::uint64_t> totals(events, 0);
  std::mutex mu;
  std::exception_ptr failure;
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<std::uint64_t> local(events, 0);
    try {
      for (std::uint64_t i = begin; i < end; ++i) {
        const std::uint32_t bits = fn(i);
        for (std::size_t e = 0; e < events; ++e) local[e] += (bits >> e) & 1U;
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      return;
    }
    std::lock_guard lock(mu);
    for (std::size_t e = 0; e < events; ++e) totals[e] += local[e];
  };
  if (workers <= 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned k = 0; k < workers; ++k) {
      const std::uint64_t begin = k * chunk;
      const std::uint64_t end = std::min(trials, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return totals;
}

EventRates measure(const TrialBody& body, std::size_t events, const RunOptions& opts) {
  EventRates out;
  if (opts.exhaustive) {
    const auto dist = enumerate_outcomes(
        [&](RandomSource& rng) { return Outcome{body(rng, rng)}; }, opts.cap);
    out.trials = dist.tapes();
    for (std::size_t e = 0; e < events; ++e) {
      out.rates.push_back(dist.probability_if([e](const Outcome& o) { return ((o[0] >> e) & 1U) != 0; }));
    }
    return out;
  }
  if (opts.trials == 0) throw UsageError("need at least one trial");
  const auto totals = count_events(opts.trials, worker_count(opts), events, [&](std::uint64_t i) {
    SeededRandom client(derive_seed(opts.seed, i, 0));
    SeededRandom adversary(derive_seed(opts.seed, i, 1));
    return body(client, adversary);
  });
  out.trials = opts.trials;
  for (auto count : totals) out.rates.emplace_back(Rational(count) / Rational(opts.trials));
  return out;
}

ExperimentReport base_report(std::string name, const SchemeParams& params, const RunOptions& opts) {
  ExperimentReport report;
  report.experiment = std::move(name);
  report.exhaustive = opts.exhaustive;
  report.seed = opts.seed;
  report.add_note("p", std::to_string(params.modulus()));
  report.add_note("ell", std::to_string(params.ell));
  report.add_note("t", std::to_string(params.t));
  report.add_note("n", std::to_string(params.n));
  report.add_note("w", std::to_string(params.w));
  report.add_note("kappa", std::to_string(params.kappa));
  return report;
}

std::string members_text(const Coalition& coalition) {
  std::string out;
  for (std::size_t j : coalition.members()) out += (out.empty() ? "" : ",") + std::to_string(j);
  return out;
}

double gap_halfwidth(double q1, double q2, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return 4.0 * std::sqrt((q1 * (1 - q1) + q2 * (1 - q2)) / static_cast<double>(trials));
}

}  // namespace

Coalition Coalition::privacy(const SchemeParams& params, std::vector<std::size_t> members) {
  std::sort(members.begin(), members.end());
  const Role role = checked_role(params, members, params.t, Role::privacy);
  return Coalition(role, std::move(members));
}

Coalition Coalition::integrity(const SchemeParams& params, std::vector<std::size_t> members) {
  std::sort(members.begin(), members.end());
  const Role role = checked_role(params, members, params.ell - 1, Role::integrity);
  return Coalition(role, std::move(members));
}

bool Coalition::contains(std::size_t j) const {
  return std::binary_search(members_.begin(), members_.end(), j);
}

Rational integrity_bound(const SchemeParams& params) {
  return Rational(params.w) / Rational(params.modulus() - 1);
}

std::pair<SimulatorState, std::map<std::size_t, Query>> simulator_first_stage(const SchemeParams& params,
                                                                               const Database& db,
                                                                               const Coalition& coalition,
                                                                               RandomSource& rng) {
  auto queries = sim_queries(params, coalition.members(), rng);
  SimulatorState state;
  for (const auto& [j, q] : queries) state.honest.emplace(j, ans(db, q));
  return {std::move(state), std::move(queries)};
}

bool simulator_second_stage(const SimulatorState& state, const std::map<std::size_t, Answer>& substituted) {
  return answers_match(state.honest, substituted);
}

HybridTrial run_hybrid_trial(Hybrid hybrid, const SchemeParams& params, const Database& db, std::size_t alpha,
                             const Adversary& adversary, const Coalition& coalition, RandomSource& client,
                             RandomSource& adversary_rng) {
  if (coalition.role() != Coalition::Role::privacy) throw UsageError("hybrids need a privacy coalition");
  HybridTrial out;
  switch (hybrid) {
    case Hybrid::real: {
      const RealRun run = run_real(params, db, alpha, adversary, coalition, client, adversary_rng);
      out.accepted = !run.result.is_bot();
      out.tampered = run.tampered;
      out.beta = adversary.decide(run.move.state, out.accepted);
      return out;
    }
    case Hybrid::answer_check:
    case Hybrid::simulated: {
      std::map<std::size_t, Query> queries;
      if (hybrid == Hybrid::answer_check) {
        queries = restrict_to(que(params, alpha, client).queries, coalition);
      } else {
        queries = sim_queries(params, coalition.members(), client);
      }
      std::map<std::size_t, Answer> honest;
      for (const auto& [j, q] : queries) honest.emplace(j, ans(db, q));
      const AdversaryView view{params, db, queries, std::nullopt};
      const AdversaryMove move = adversary.tamper(view, adversary_rng);
      require_inside(move, coalition);
      out.accepted = answers_match(honest, move.answers);
      out.tampered = !out.accepted;
      out.beta = adversary.decide(move.state, out.accepted);
      return out;
    }
    case Hybrid::ideal: {
      auto [state, queries] = simulator_first_stage(params, db, coalition, client);
      const AdversaryView view{params, db, queries, std::nullopt};
      const AdversaryMove move = adversary.tamper(view, adversary_rng);
      require_inside(move, coalition);
      out.accepted = simulator_second_stage(state, move.answers);
      out.tampered = !out.accepted;
      out.beta = adversary.decide(move.state, out.accepted);
      return out;
    }
  }
  throw UsageError("unknown hybrid");
}

ExperimentReport run_correctness(const SchemeParams& params, const Database& db, const RunOptions& opts) {
  params.validate();
  if (db.n() != params.n || db.w() != params.w || db.field() != params.field) {
    throw UsageError("database does not match parameters");
  }
  const TrialBody body = [&](RandomSource& client, RandomSource&) -> std::uint32_t {
    const std::size_t alpha = 1 + client.below(params.n);
    const QueryBundle bundle = que(params, alpha, client);
    std::vector<Answer> answers;
    answers.reserve(params.ell);
    for (const auto& q : bundle.queries) answers.push_back(ans(db, q));
    const RetrievalResult y = rec(answers, bundle.aux);
    const bool failed = y.is_bot() || y.block() != db.block_copy(alpha);
    return failed ? 1U : 0U;
  };
  const EventRates rates = measure(body, 1, opts);
  ExperimentReport report = base_report("correctness", params, opts);
  report.trials = rates.trials;
  report.set_rate("failure", rates.rates[0]);
  report.analytic_bound = 0;
  report.within_bound = rates.rates[0] == 0;
  return report;
}

ExperimentReport run_integrity_game(const SchemeParams& params, const Database& db, std::size_t alpha,
                                    const Adversary& adversary, const Coalition& coalition,
                                    const RunOptions& opts) {
  if (coalition.members().size() > params.ell - 1) throw UsageError("integrity coalition too large");
  const auto expected = db.block_copy(alpha);
  const TrialBody body = [&](RandomSource& client, RandomSource& adversary_rng) -> std::uint32_t {
    const RealRun run = run_real(params, db, alpha, adversary, coalition, client, adversary_rng);
    const bool accepted = !run.result.is_bot();
    const bool violation = accepted && run.result.block() != expected;
    return (violation ? 1U : 0U) | (accepted ? 2U : 0U) | (run.tampered ? 4U : 0U);
  };
  const EventRates rates = measure(body, 3, opts);
  ExperimentReport report = base_report("integrity", params, opts);
  report.add_note("adversary", adversary.name());
  report.add_note("coalition", members_text(coalition));
  report.add_note("alpha", std::to_string(alpha));
  report.trials = rates.trials;
  report.set_rate("violation", rates.rates[0]);
  report.set_rate("accept", rates.rates[1]);
  report.set_rate("tampered", rates.rates[2]);
  report.analytic_bound = integrity_bound(params);
  const double bound = to_double(report.analytic_bound);
  report.ci_halfwidth = opts.exhaustive ? 0.0 : binomial_halfwidth(bound, rates.trials);
  report.within_bound = opts.exhaustive ? rates.rates[0] <= report.analytic_bound
                                        : to_double(rates.rates[0]) <= bound + report.ci_halfwidth;
  return report;
}

namespace {

ExperimentReport beta_report(std::string name, const SchemeParams& params, const Adversary& adversary,
                             const Coalition& coalition, const RunOptions& opts, const TrialBody& body) {
  const EventRates rates = measure(body, 2, opts);
  ExperimentReport report = base_report(std::move(name), params, opts);
  report.add_note("adversary", adversary.name());
  report.add_note("coalition", members_text(coalition));
  report.trials = rates.trials;
  report.set_rate("beta", rates.rates[0]);
  report.set_rate("accept", rates.rates[1]);
  report.analytic_bound = integrity_bound(params);
  report.within_bound = true;
  return report;
}

std::uint32_t hybrid_bits(const HybridTrial& h) { return (h.beta ? 1U : 0U) | (h.accepted ? 2U : 0U); }

}  // namespace

ExperimentReport run_real_experiment(const SchemeParams& params, const Database& db, std::size_t alpha,
                                     const Adversary& adversary, const Coalition& coalition,
                                     const RunOptions& opts) {
  auto report = beta_report("real", params, adversary, coalition, opts,
                            [&](RandomSource& client, RandomSource& adversary_rng) {
                              return hybrid_bits(run_hybrid_trial(Hybrid::real, params, db, alpha, adversary,
                                                                  coalition, client, adversary_rng));
                            });
  report.add_note("alpha", std::to_string(alpha));
  return report;
}

ExperimentReport run_ideal_experiment(const SchemeParams& params, const Database& db, const Adversary& adversary,
                                      const Coalition& coalition, const RunOptions& opts) {
  return beta_report("ideal", params, adversary, coalition, opts,
                     [&](RandomSource& client, RandomSource& adversary_rng) {
                       // alpha is irrelevant to H3; 1 is a placeholder that run_hybrid_trial ignores.
                       return hybrid_bits(run_hybrid_trial(Hybrid::ideal, params, db, 1, adversary, coalition,
                                                           client, adversary_rng));
                     });
}

ExperimentReport run_privacy_comparison(const SchemeParams& params, const Database& db,
                                        const std::vector<std::size_t>& alphas, const Adversary& adversary,
                                        const Coalition& coalition, const RunOptions& opts) {
  if (alphas.empty()) throw UsageError("no retrieval indices to compare");
  ExperimentReport report = base_report("privacy", params, opts);
  report.add_note("adversary", adversary.name());
  report.add_note("coalition", members_text(coalition));

  RunOptions ideal_opts = opts;
  ideal_opts.seed = derive_seed(opts.seed, 0, 7);
  const ExperimentReport ideal = run_ideal_experiment(params, db, adversary, coalition, ideal_opts);
  const Rational& ideal_beta = ideal.rate("beta");
  report.set_rate("beta.ideal", ideal_beta);

  std::vector<Rational> real_betas;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    RunOptions real_opts = opts;
    real_opts.seed = derive_seed(opts.seed, k + 1, 7);
    const ExperimentReport real = run_real_experiment(params, db, alphas[k], adversary, coalition, real_opts);
    real_betas.push_back(real.rate("beta"));
    report.set_rate("beta.real." + std::to_string(alphas[k]), real.rate("beta"));
  }

  Rational ideal_gap = 0;
  Rational real_gap = 0;
  double ci = 0.0;
  for (std::size_t k = 0; k < real_betas.size(); ++k) {
    ideal_gap = std::max(ideal_gap, Rational(boost::multiprecision::abs(real_betas[k] - ideal_beta)));
    if (!opts.exhaustive) {
      ci = std::max(ci, gap_halfwidth(to_double(real_betas[k]), to_double(ideal_beta), opts.trials));
    }
    for (std::size_t m = k + 1; m < real_betas.size(); ++m) {
      real_gap = std::max(real_gap, Rational(boost::multiprecision::abs(real_betas[k] - real_betas[m])));
      if (!opts.exhaustive) {
        ci = std::max(ci, gap_halfwidth(to_double(real_betas[k]), to_double(real_betas[m]), opts.trials));
      }
    }
  }
  report.trials = ideal.trials;
  report.set_rate("real_gap", real_gap);
  report.statistical_distance = ideal_gap;
  report.ci_halfwidth = ci;
  report.analytic_bound = integrity_bound(params);
  const double bound = to_double(report.analytic_bound);
  report.within_bound = opts.exhaustive ? (ideal_gap <= report.analytic_bound && real_gap <= report.analytic_bound)
                                        : (to_double(ideal_gap) <= bound + ci && to_double(real_gap) <= bound + ci);
  return report;
}

ExperimentReport run_hybrids(const SchemeParams& params, const Database& db, std::size_t alpha,
                             const Adversary& adversary, const Coalition& coalition, const RunOptions& opts) {
  // Bits of the H0/H1 half: beta0, beta1, b0, b1, tampered0.
  // Bits of the H2/H3 half: beta2, beta3, b2, b3.
  auto first_half = [&](RandomSource& c0, RandomSource& a0, RandomSource& c1, RandomSource& a1) {
    const HybridTrial h0 = run_hybrid_trial(Hybrid::real, params, db, alpha, adversary, coalition, c0, a0);
    const HybridTrial h1 = run_hybrid_trial(Hybrid::answer_check, params, db, alpha, adversary, coalition, c1, a1);
    return (h0.beta ? 1U : 0U) | (h1.beta ? 2U : 0U) | (h0.accepted ? 4U : 0U) | (h1.accepted ? 8U : 0U) |
           (h0.tampered ? 16U : 0U);
  };
  auto second_half = [&](RandomSource& c2, RandomSource& a2, RandomSource& c3, RandomSource& a3) {
    const HybridTrial h2 = run_hybrid_trial(Hybrid::simulated, params, db, alpha, adversary, coalition, c2, a2);
    const HybridTrial h3 = run_hybrid_trial(Hybrid::ideal, params, db, alpha, adversary, coalition, c3, a3);
    return (h2.beta ? 1U : 0U) | (h3.beta ? 2U : 0U) | (h2.accepted ? 4U : 0U) | (h3.accepted ? 8U : 0U);
  };
  auto derived = [](std::uint32_t first, std::uint32_t second) {
    const bool beta0 = first & 1U, beta1 = first & 2U, b0 = first & 4U, b1 = first & 8U, tampered = first & 16U;
    const bool beta2 = second & 1U, beta3 = second & 2U;
    const bool b_disagree = b0 != b1;
    const bool mismatch = b_disagree != (tampered && b0);
    return (beta0 ? 1U : 0U) | (beta1 ? 2U : 0U) | (beta2 ? 4U : 0U) | (beta3 ? 8U : 0U) |
           (b_disagree ? 16U : 0U) | (beta0 != beta1 ? 32U : 0U) | (beta2 != beta3 ? 64U : 0U) |
           (mismatch ? 128U : 0U);
  };

  std::vector<Rational> rates(8);
  std::uint64_t trials = 0;
  if (opts.exhaustive) {
    // H0 and H1 walk the same tape (Que then adversary), H2 and H3 likewise
    // (Sim' then adversary); the two halves are separate enumerations.
    const auto joint_first = enumerate_outcomes(
        [&](RandomSource& rng) {
          RecordingSource recorder(rng);
          const HybridTrial h0 =
              run_hybrid_trial(Hybrid::real, params, db, alpha, adversary, coalition, recorder, recorder);
          ReplaySource replay(recorder.tape());
          const HybridTrial h1 =
              run_hybrid_trial(Hybrid::answer_check, params, db, alpha, adversary, coalition, replay, replay);
          const std::uint32_t bits = (h0.beta ? 1U : 0U) | (h1.beta ? 2U : 0U) | (h0.accepted ? 4U : 0U) |
                                     (h1.accepted ? 8U : 0U) | (h0.tampered ? 16U : 0U);
          return Outcome{bits};
        },
        opts.cap);
    const auto joint_second = enumerate_outcomes(
        [&](RandomSource& rng) {
          RecordingSource recorder(rng);
          const HybridTrial h2 =
              run_hybrid_trial(Hybrid::simulated, params, db, alpha, adversary, coalition, recorder, recorder);
          ReplaySource replay(recorder.tape());
          const HybridTrial h3 =
              run_hybrid_trial(Hybrid::ideal, params, db, alpha, adversary, coalition, replay, replay);
          const std::uint32_t bits =
              (h2.beta ? 1U : 0U) | (h3.beta ? 2U : 0U) | (h2.accepted ? 4U : 0U) | (h3.accepted ? 8U : 0U);
          return Outcome{bits};
        },
        opts.cap);
    auto p_first = [&](std::uint32_t mask) {
      return joint_first.probability_if([mask](const Outcome& o) { return (o[0] & mask) != 0; });
    };
    auto p_second = [&](std::uint32_t mask) {
      return joint_second.probability_if([mask](const Outcome& o) { return (o[0] & mask) != 0; });
    };
    rates[0] = p_first(1U);
    rates[1] = p_first(2U);
    rates[2] = p_second(1U);
    rates[3] = p_second(2U);
    rates[4] = joint_first.probability_if([&](const Outcome& o) { return derived(o[0], 0) & 16U; });
    rates[5] = joint_first.probability_if([&](const Outcome& o) { return derived(o[0], 0) & 32U; });
    rates[6] = joint_second.probability_if([&](const Outcome& o) { return derived(0, o[0]) & 64U; });
    rates[7] = joint_first.probability_if([&](const Outcome& o) { return derived(o[0], 0) & 128U; });
    trials = joint_first.tapes() + joint_second.tapes();
  } else {
    if (opts.trials == 0) throw UsageError("need at least one trial");
    const auto totals = count_events(opts.trials, worker_count(opts), 8, [&](std::uint64_t i) {
      const std::uint64_t client_seed = derive_seed(opts.seed, i, 0);
      const std::uint64_t adversary_seed = derive_seed(opts.seed, i, 1);
      const std::uint64_t simulator_seed = derive_seed(opts.seed, i, 2);
      SeededRandom c0(client_seed), a0(adversary_seed), c1(client_seed), a1(adversary_seed);
      SeededRandom c2(simulator_seed), a2(adversary_seed), c3(simulator_seed), a3(adversary_seed);
      return derived(first_half(c0, a0, c1, a1), second_half(c2, a2, c3, a3));
    });
    for (std::size_t e = 0; e < 8; ++e) rates[e] = Rational(totals[e]) / Rational(opts.trials);
    trials = opts.trials;
  }

  ExperimentReport report = base_report("hybrids", params, opts);
  report.add_note("adversary", adversary.name());
  report.add_note("coalition", members_text(coalition));
  report.add_note("alpha", std::to_string(alpha));
  report.trials = trials;
  const char* names[] = {"W0", "W1", "W2", "W3", "b_disagree01", "beta_disagree01", "beta_disagree23",
                         "coupling_mismatch"};
  for (std::size_t e = 0; e < 8; ++e) report.set_rate(names[e], rates[e]);
  const Rational gap03 = boost::multiprecision::abs(rates[0] - rates[3]);
  report.statistical_distance = gap03;
  report.analytic_bound = integrity_bound(params);

  const Rational gap01 = boost::multiprecision::abs(rates[0] - rates[1]);
  const Rational gap12 = boost::multiprecision::abs(rates[1] - rates[2]);
  const bool structural = rates[6] == 0 && rates[7] == 0;
  if (opts.exhaustive) {
    report.ci_halfwidth = 0.0;
    report.within_bound = structural && rates[4] <= report.analytic_bound && gap01 <= report.analytic_bound &&
                          gap12 == 0 && rates[2] == rates[3];
  } else {
    const double bound = to_double(report.analytic_bound);
    report.ci_halfwidth = binomial_halfwidth(bound, trials);
    const double ci12 = gap_halfwidth(to_double(rates[1]), to_double(rates[2]), trials);
    report.add_note("ci_halfwidth_w1w2", std::to_string(ci12));
    report.within_bound = structural && to_double(rates[4]) <= bound + report.ci_halfwidth &&
                          to_double(gap01) <= bound + report.ci_halfwidth && to_double(gap12) <= ci12 &&
                          rates[2] == rates[3];
  }
  return report;
}

ExperimentReport sweep_fixed_substitutions(const SchemeParams& params, const Database& db, std::size_t alpha,
                                           const Coalition& coalition, std::uint64_t cap) {
  if (coalition.members().empty()) throw UsageError("sweep needs a non-empty coalition");
  const std::uint64_t p = params.modulus();
  const std::size_t digits = 2 * params.w;
  std::uint64_t per_kind = 1;
  for (std::size_t d = 0; d < digits; ++d) {
    if (per_kind > cap / p) throw UsageError("substitution space exceeds the exhaustive cap");
    per_kind *= p;
  }
  if (per_kind * 2 * coalition.members().size() > cap) throw UsageError("substitution space exceeds the exhaustive cap");

  RunOptions opts;
  opts.exhaustive = true;
  opts.cap = cap;
  Rational best_offset = 0;
  Rational best_constant = 0;
  std::string argmax;
  std::uint64_t tapes = 0;
  for (std::size_t member : coalition.members()) {
    for (auto kind : {FixedSubstitution::Kind::offset, FixedSubstitution::Kind::constant}) {
      for (std::uint64_t code = 0; code < per_kind; ++code) {
        Answer value;
        std::uint64_t rest = code;
        for (std::size_t d = 0; d < digits; ++d) {
          (d < params.w ? value.a : value.b).push_back(params.field.element(rest % p));
          rest /= p;
        }
        const FixedSubstitution adversary(kind, member, value);
        const auto report = run_integrity_game(params, db, alpha, adversary, coalition, opts);
        tapes += report.trials;
        const Rational& v = report.rate("violation");
        Rational& best = kind == FixedSubstitution::Kind::offset ? best_offset : best_constant;
        if (v > best) {
          best = v;
          argmax = adversary.name() + "@" + std::to_string(member) + "#" + std::to_string(code);
        }
      }
    }
  }
  ExperimentReport report = base_report("substitution_sweep", params, opts);
  report.add_note("coalition", members_text(coalition));
  report.add_note("alpha", std::to_string(alpha));
  report.add_note("argmax", argmax.empty() ? "none" : argmax);
  report.trials = tapes;
  report.set_rate("best_offset", best_offset);
  report.set_rate("best_constant", best_constant);
  const Rational best = std::max(best_offset, best_constant);
  report.set_rate("best", best);
  report.analytic_bound = integrity_bound(params);
  report.within_bound = best <= report.analytic_bound;
  return report;
}

DistanceEstimate empirical_distribution_distance(const Sampler& a, const Sampler& b, const RunOptions& opts) {
  DistanceEstimate out;
  if (opts.exhaustive) {
    const auto da = enumerate_outcomes(a, opts.cap);
    const auto db = enumerate_outcomes(b, opts.cap);
    out.exact = total_variation(da, db);
    out.value = to_double(*out.exact);
    return out;
  }
  if (opts.trials == 0) throw UsageError("need at least one draw");
  std::map<Outcome, std::array<std::uint64_t, 2>> counts;
  std::set<std::size_t> arities;
  for (std::uint64_t i = 0; i < opts.trials; ++i) {
    SeededRandom ra(derive_seed(opts.seed, i, 0));
    SeededRandom rb(derive_seed(opts.seed, i, 2));
    const Outcome oa = a(ra);
    const Outcome ob = b(rb);
    arities.insert(oa.size());
    arities.insert(ob.size());
    ++counts[oa][0];
    ++counts[ob][1];
  }
  if (arities.size() > 1) throw UsageError("samplers produce different outcome spaces");
  const double n = static_cast<double>(opts.trials);
  double tv = 0.0;
  double ci = 0.0;
  for (const auto& [outcome, c] : counts) {
    const double qa = static_cast<double>(c[0]) / n;
    const double qb = static_cast<double>(c[1]) / n;
    tv += std::abs(qa - qb);
    ci += gap_halfwidth(qa, qb, opts.trials);
  }
  out.value = tv / 2;
  out.ci_halfwidth = ci / 2;
  return out;
}

namespace {

Outcome encode_view(const std::map<std::size_t, Query>& view) {
  Outcome out;
  for (const auto& [j, q] : view) {
    out.push_back(j);
    for (const auto& e : q.f_shares) out.push_back(e.value());
    for (const auto& e : q.h_shares) out.push_back(e.value());
  }
  return out;
}

}  // namespace

Sampler query_view_sampler(const SchemeParams& params, std::size_t alpha, const std::vector<std::size_t>& coalition) {
  return [params, alpha, coalition](RandomSource& rng) {
    const QueryBundle bundle = que(params, alpha, rng);
    std::map<std::size_t, Query> view;
    for (std::size_t j : coalition) view.emplace(j, bundle.queries.at(j - 1));
    return encode_view(view);
  };
}

Sampler simulated_view_sampler(const SchemeParams& params, const std::vector<std::size_t>& coalition) {
  return [params, coalition](RandomSource& rng) { return encode_view(sim_queries(params, coalition, rng)); };
}

}  // namespace apir
