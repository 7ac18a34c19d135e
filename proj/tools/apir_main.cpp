// apir: database generation, servers, retrieval and the security experiments.
#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "apir/errors.hpp"
#include "apir/games.hpp"
#include "apir/net.hpp"
#include "apir/storage.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct ParamFlags {
  std::uint64_t p = 257;
  std::size_t ell = 3;
  std::size_t t = 1;
  std::size_t n = 16;
  std::size_t w = 1;
  std::optional<unsigned> kappa;
};

struct RunFlags {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  bool exhaustive = false;
  unsigned threads = 0;
  std::string out;
  std::string db;
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
  cmd->add_option("--p", f.p, "field modulus (prime)")->capture_default_str();
  cmd->add_option("--ell", f.ell, "number of servers")->capture_default_str();
  cmd->add_option("--t", f.t, "privacy threshold")->capture_default_str();
  cmd->add_option("--n", f.n, "number of records")->capture_default_str();
  cmd->add_option("--w", f.w, "field elements per record")->capture_default_str();
  cmd->add_option("--kappa", f.kappa, "security parameter in bits (default floor(log2 p))");
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--trials", f.trials, "Monte Carlo trials")->capture_default_str();
  cmd->add_option("--seed", f.seed, "master seed")->capture_default_str();
  cmd->add_flag("--exhaustive", f.exhaustive, "enumerate every random tape instead of sampling");
  cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores")->capture_default_str();
  cmd->add_option("--out", f.out, "also write the report to this file");
  cmd->add_option("--db", f.db, "database file (default: random database from --seed)");
}

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw apir::UsageError("bad list entry '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<std::size_t> range_list(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t j = first; j <= last; ++j) out.push_back(j);
  return out;
}

apir::SchemeParams params_of(const ParamFlags& f) {
  auto params = apir::SchemeParams::make(f.p, f.ell, f.t, f.n, f.w, f.kappa);
  params.validate();
  return params;
}

// Loads --db (its p, n, w override the flags) or builds a seeded random one.
apir::Database load_database(ParamFlags& pf, const RunFlags& rf) {
  if (!rf.db.empty()) {
    apir::Database db = apir::read_database(rf.db);
    pf.p = db.field().modulus();
    pf.n = db.n();
    pf.w = db.w();
    return db;
  }
  const apir::PrimeField field(pf.p);
  apir::SeededRandom rng(apir::derive_seed(rf.seed, 0, 3));
  return apir::Database::random(field, pf.n, pf.w, rng);
}

apir::RunOptions options_of(const RunFlags& f) {
  apir::RunOptions opts;
  opts.trials = f.trials;
  opts.seed = f.seed;
  opts.exhaustive = f.exhaustive;
  opts.threads = f.threads;
  return opts;
}

int emit(const apir::ExperimentReport& report, const RunFlags& f) {
  const std::string text = report.to_text();
  std::cout << text;
  if (!f.out.empty()) {
    std::ofstream file(f.out);
    file << text;
    if (!file) throw std::runtime_error("cannot write " + f.out);
  }
  return report.within_bound ? kExitOk : kExitFailed;
}

std::string hex_u64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string hex_bytes(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  char buf[3];
  for (auto b : bytes) {
    std::snprintf(buf, sizeof(buf), "%02x", b);
    out += buf;
  }
  return out;
}

// Blocks SIGINT/SIGTERM in every thread started afterwards and shuts
// `target` down when one arrives.
template <typename Stoppable>
void install_stop_on_signal(Stoppable& target) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::thread waiter([set, &target] {
    int sig = 0;
    sigwait(&set, &sig);
    target.shutdown();
  });
  waiter.detach();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-server authenticated PIR toolkit"};
  app.require_subcommand(1);

  ParamFlags pf;
  RunFlags rf;

  auto* gen = app.add_subcommand("gen-db", "write a random database file");
  add_param_flags(gen, pf);
  std::optional<std::size_t> bits;
  gen->add_option("--m", bits, "record size in bits; derives --w and fills records with random m-bit strings");
  gen->add_option("--seed", rf.seed, "seed")->capture_default_str();
  gen->add_option("--out,--db", rf.out, "output path")->required();

  auto* serve = app.add_subcommand("serve", "answer QUERY frames over TCP");
  std::string listen = "127.0.0.1:0";
  serve->add_option("--db", rf.db, "database file")->required();
  serve->add_option("--listen", listen, "HOST:PORT, port 0 picks one")->capture_default_str();

  auto* get = app.add_subcommand("get", "retrieve one record from ell servers");
  add_param_flags(get, pf);
  std::string servers;
  std::size_t alpha = 1;
  int timeout_ms = 5000;
  get->add_option("--servers", servers, "comma-separated HOST:PORT list, server 1 first")->required();
  get->add_option("--alpha", alpha, "record index, 1-based")->capture_default_str();
  get->add_option("--seed", rf.seed, "client seed")->capture_default_str();
  get->add_option("--timeout-ms", timeout_ms, "per-server timeout")->capture_default_str();
  get->add_option("--m", bits, "decode the record as an m-bit string");

  auto* proxy = app.add_subcommand("proxy", "tampering proxy in front of one server");
  std::string upstream;
  std::string strategy = "passthrough";
  std::string coalition_text;
  proxy->add_option("--listen", listen, "HOST:PORT")->capture_default_str();
  proxy->add_option("--upstream", upstream, "server HOST:PORT")->required();
  proxy->add_option("--strategy", strategy, "passthrough | flip_data | flip_tag | tag_guess")->capture_default_str();
  proxy->add_option("--seed", rf.seed, "seed for the key guesses")->capture_default_str();
  proxy->add_option("--coalition", coalition_text, "tag_guess: corrupted servers, e.g. 1,2");
  proxy->add_option("--ell", pf.ell, "tag_guess: number of servers")->capture_default_str();
  proxy->add_option("--t", pf.t, "tag_guess: privacy threshold")->capture_default_str();
  proxy->add_option("--timeout-ms", timeout_ms, "upstream timeout")->capture_default_str();

  auto* correctness = app.add_subcommand("game-correctness", "honest retrievals, counts failures");
  add_param_flags(correctness, pf);
  add_run_flags(correctness, rf);

  std::string adversary_name;
  auto* integrity = app.add_subcommand("game-integrity", "integrity game against a built-in adversary");
  add_param_flags(integrity, pf);
  add_run_flags(integrity, rf);
  bool sweep = false;
  integrity->add_option("--adversary", adversary_name, "adversary name (default tag_guess)");
  integrity->add_option("--coalition", coalition_text, "corrupted servers (default 1..ell-1)");
  integrity->add_option("--alpha", alpha, "record index")->capture_default_str();
  integrity->add_flag("--sweep", sweep, "exhaustive sweep over every fixed substitution instead");

  auto* privacy = app.add_subcommand("game-privacy", "REAL_alpha against IDEAL for several alpha");
  add_param_flags(privacy, pf);
  add_run_flags(privacy, rf);
  std::string alphas_text;
  privacy->add_option("--adversary", adversary_name, "adversary name (default probe)");
  privacy->add_option("--coalition", coalition_text, "corrupted servers (default 1..t)");
  privacy->add_option("--alphas", alphas_text, "indices to compare (default 1,2)");

  auto* hybrids = app.add_subcommand("hybrids", "coupled run of the REAL-to-IDEAL hybrid chain");
  add_param_flags(hybrids, pf);
  add_run_flags(hybrids, rf);
  hybrids->add_option("--adversary", adversary_name, "adversary name (default tag_guess)");
  hybrids->add_option("--coalition", coalition_text, "corrupted servers (default 1..t)");
  hybrids->add_option("--alpha", alpha, "record index")->capture_default_str();

  auto* bench = app.add_subcommand("bench-comm", "bytes per retrieval, optionally measured on the wire");
  add_param_flags(bench, pf);
  bench->add_option("--servers", servers, "measure against these servers too");
  bench->add_option("--alpha", alpha, "record index")->capture_default_str();
  bench->add_option("--seed", rf.seed, "client seed")->capture_default_str();
  bench->add_option("--timeout-ms", timeout_ms, "per-server timeout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      const apir::PrimeField field(pf.p);
      apir::SeededRandom rng(rf.seed);
      if (bits) {
        const apir::BlockCodec codec(field, *bits);
        std::vector<std::vector<apir::FieldElement>> blocks;
        const std::size_t bytes = (*bits + 7) / 8;
        for (std::size_t i = 0; i < pf.n; ++i) {
          std::vector<std::uint8_t> block(bytes);
          for (std::size_t k = 0; k < bytes; ++k) {
            const std::size_t live = std::min<std::size_t>(8, *bits - 8 * k);
            block[k] = static_cast<std::uint8_t>(rng.below(std::uint64_t{1} << live));
          }
          blocks.push_back(codec.encode(block));
        }
        apir::write_database(rf.out, apir::Database::from_blocks(field, blocks));
      } else {
        apir::write_database(rf.out, apir::Database::random(field, pf.n, pf.w, rng));
      }
      return kExitOk;
    }

    if (*serve) {
      apir::net::Server server(apir::read_database(rf.db), apir::net::Endpoint::parse(listen));
      install_stop_on_signal(server);
      std::cout << "listening " << apir::net::Endpoint::parse(listen).host << ':' << server.port() << std::endl;
      server.serve_forever();
      return kExitOk;
    }

    if (*proxy) {
      apir::net::ProxyConfig config;
      config.listen = apir::net::Endpoint::parse(listen);
      config.upstream = apir::net::Endpoint::parse(upstream);
      config.strategy = apir::net::parse_strategy(strategy);
      config.seed = rf.seed;
      config.coalition = parse_list(coalition_text);
      config.ell = pf.ell;
      config.t = pf.t;
      config.timeout_ms = timeout_ms;
      apir::net::TamperProxy tamper(std::move(config));
      install_stop_on_signal(tamper);
      std::cout << "listening " << apir::net::Endpoint::parse(listen).host << ':' << tamper.port() << std::endl;
      tamper.serve_forever();
      return kExitOk;
    }

    if (*get || *bench) {
      const auto params = params_of(pf);
      std::vector<apir::net::Endpoint> endpoints;
      std::stringstream in(servers);
      for (std::string item; std::getline(in, item, ',');) endpoints.push_back(apir::net::Endpoint::parse(item));
      const apir::CommCost cost = apir::comm_cost(params);
      if (*bench) {
        std::cout << "upload_payload=" << cost.upload_payload << '\n'
                  << "download_payload=" << cost.download_payload << '\n'
                  << "upload_total=" << cost.upload_total << '\n'
                  << "download_total=" << cost.download_total << '\n';
        if (endpoints.empty()) return kExitOk;
      }
      apir::net::Client client(params, endpoints, timeout_ms);
      apir::SeededRandom rng(rf.seed);
      const auto got = client.retrieve(alpha, rng);
      if (*bench) {
        std::cout << "measured_upload=" << got.bytes_up << '\n' << "measured_download=" << got.bytes_down << '\n';
        const bool match = got.bytes_up == cost.upload_total && got.bytes_down == cost.download_total;
        std::cout << "match=" << (match ? 1 : 0) << '\n';
        return match ? kExitOk : kExitFailed;
      }
      std::cerr << "bytes_up=" << got.bytes_up << " bytes_down=" << got.bytes_down << '\n';
      if (got.result.is_bot()) {
        std::cout << "BOT\n";
      } else if (bits) {
        std::cout << hex_bytes(apir::BlockCodec(params.field, *bits).decode(got.result.block())) << '\n';
      } else {
        std::string line;
        for (const auto& e : got.result.block()) line += (line.empty() ? "" : " ") + hex_u64(e.value());
        std::cout << line << '\n';
      }
      return kExitOk;
    }

    const apir::Database db = load_database(pf, rf);
    const auto params = params_of(pf);
    const auto opts = options_of(rf);

    if (*correctness) return emit(apir::run_correctness(params, db, opts), rf);

    if (*integrity) {
      const auto members = coalition_text.empty() ? range_list(1, params.ell - 1) : parse_list(coalition_text);
      const auto coalition = apir::Coalition::integrity(params, members);
      if (sweep) {
        if (!adversary_name.empty()) throw apir::UsageError("--sweep and --adversary are exclusive");
        return emit(apir::sweep_fixed_substitutions(params, db, alpha, coalition), rf);
      }
      const auto adversary = apir::make_adversary(adversary_name.empty() ? "tag_guess" : adversary_name);
      return emit(apir::run_integrity_game(params, db, alpha, *adversary, coalition, opts), rf);
    }

    if (*privacy) {
      const auto members = coalition_text.empty() ? range_list(1, params.t) : parse_list(coalition_text);
      const auto coalition = apir::Coalition::privacy(params, members);
      auto alphas = alphas_text.empty() ? range_list(1, std::min<std::size_t>(2, params.n)) : parse_list(alphas_text);
      const auto adversary = apir::make_adversary(adversary_name.empty() ? "probe" : adversary_name);
      auto report = apir::run_privacy_comparison(params, db, alphas, *adversary, coalition, opts);
      if (opts.exhaustive) {
        // Query views must coincide exactly, pairwise against the simulator.
        apir::Rational worst = 0;
        for (std::size_t a : alphas) {
          const auto d = apir::empirical_distribution_distance(apir::query_view_sampler(params, a, members),
                                                               apir::simulated_view_sampler(params, members), opts);
          worst = std::max(worst, *d.exact);
        }
        report.set_rate("view_distance", worst);
        report.within_bound = report.within_bound && worst == 0;
      }
      return emit(report, rf);
    }

    if (*hybrids) {
      const auto members = coalition_text.empty() ? range_list(1, params.t) : parse_list(coalition_text);
      const auto coalition = apir::Coalition::privacy(params, members);
      const auto adversary = apir::make_adversary(adversary_name.empty() ? "tag_guess" : adversary_name);
      return emit(apir::run_hybrids(params, db, alpha, *adversary, coalition, opts), rf);
    }
  } catch (const apir::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const apir::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const apir::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const apir::TransportError& e) {
    std::cerr << "transport error: " << e.what() << '\n';
    return kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
