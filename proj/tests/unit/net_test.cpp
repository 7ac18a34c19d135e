#include <gtest/gtest.h>

#include <chrono>
#include <memory>
#include <thread>

#include "apir/errors.hpp"
#include "apir/net.hpp"

namespace apir::net {
namespace {

const Endpoint kAnyPort{"127.0.0.1", 0};

// Runs a server or proxy on its own thread for the lifetime of the object.
template <typename T>
class Running {
 public:
  template <typename... Args>
  explicit Running(Args&&... args) : service_(std::forward<Args>(args)...), thread_([this] { service_.serve_forever(); }) {}
  ~Running() {
    service_.shutdown();
    thread_.join();
  }
  Endpoint endpoint() const { return Endpoint{"127.0.0.1", service_.port()}; }

 private:
  T service_;
  std::thread thread_;
};

struct Fleet {
  SchemeParams params;
  Database db;
  std::vector<std::unique_ptr<Running<Server>>> servers;

  Fleet(std::uint64_t p, std::size_t ell, std::size_t t, std::size_t n, std::size_t w)
      : params(SchemeParams::make(p, ell, t, n, w)), db([&] {
          SeededRandom rng(99);
          return Database::random(params.field, n, w, rng);
        }()) {
    for (std::size_t j = 0; j < ell; ++j) servers.push_back(std::make_unique<Running<Server>>(db, kAnyPort));
  }
  std::vector<Endpoint> endpoints() const {
    std::vector<Endpoint> out;
    for (const auto& s : servers) out.push_back(s->endpoint());
    return out;
  }
};

std::vector<std::uint8_t> roundtrip(Socket& s, const std::vector<std::uint8_t>& frame) {
  s.send_all(frame);
  auto reply = read_frame(s);
  if (!reply) return {};
  return wire::encode_frame(reply->type, reply->body);
}

TEST(Endpoint, Parse) {
  const auto e = Endpoint::parse("localhost:8080");
  EXPECT_EQ(e.host, "localhost");
  EXPECT_EQ(e.port, 8080);
  EXPECT_EQ(e.to_string(), "localhost:8080");
  EXPECT_THROW(Endpoint::parse("localhost"), UsageError);
  EXPECT_THROW(Endpoint::parse(":80"), UsageError);
  EXPECT_THROW(Endpoint::parse("h:70000"), UsageError);
  EXPECT_THROW(Endpoint::parse("h:8x"), UsageError);
}

TEST(Respond, AnswersAndErrors) {
  const auto params = SchemeParams::make(7, 3, 1, 2, 1);
  const PrimeField& f = params.field;
  const Database db(f, 2, 1, {f.element(3), f.element(4)});
  SeededRandom rng(1);
  const auto bundle = que(params, 2, rng);
  const auto query = wire::decode_frame(wire::encode_query_frame(params, bundle.queries[0]));

  const ServerReply ok = respond(db, query);
  EXPECT_FALSE(ok.close_after);
  EXPECT_EQ(ok.frame, wire::encode_answer_frame(ans(db, bundle.queries[0])));

  const Database wider(f, 2, 2, {f.element(3), f.element(4), f.element(5), f.element(6)});
  const ServerReply mismatch = respond(wider, query);
  EXPECT_EQ(mismatch.frame, wire::encode_error_frame(wire::ErrorCode::parameter_mismatch));
  EXPECT_FALSE(mismatch.close_after);

  const ServerReply junk = respond(db, wire::Frame{wire::FrameType::answer, {}});
  EXPECT_EQ(junk.frame, wire::encode_error_frame(wire::ErrorCode::malformed));
  EXPECT_TRUE(junk.close_after);
}

TEST(Server, WrongRecordCountIsErrorOne) {
  Fleet fleet(257, 3, 1, 4, 2);
  Socket s = Socket::connect(fleet.servers[0]->endpoint(), 2000);
  const auto other = SchemeParams::make(257, 3, 1, 5, 2);
  SeededRandom rng(2);
  const auto reply = roundtrip(s, wire::encode_query_frame(other, que(other, 1, rng).queries[0]));
  EXPECT_EQ(reply, wire::encode_error_frame(wire::ErrorCode::parameter_mismatch));
  // The connection stays usable after a mismatch.
  const auto good = roundtrip(s, wire::encode_query_frame(fleet.params, que(fleet.params, 1, rng).queries[0]));
  EXPECT_EQ(wire::decode_frame(good).type, wire::FrameType::answer);
}

TEST(Server, MalformedFrameIsErrorTwoThenClose) {
  Fleet fleet(257, 3, 1, 4, 2);
  Socket s = Socket::connect(fleet.servers[0]->endpoint(), 2000);
  const std::vector<std::uint8_t> bogus{0, 0, 0, 0, 9};
  EXPECT_EQ(roundtrip(s, bogus), wire::encode_error_frame(wire::ErrorCode::malformed));
  EXPECT_FALSE(read_frame(s).has_value());
}

TEST(Server, IdenticalQueriesGetIdenticalAnswers) {
  Fleet fleet(257, 3, 1, 8, 3);
  SeededRandom rng(3);
  const auto frame = wire::encode_query_frame(fleet.params, que(fleet.params, 5, rng).queries[1]);
  Socket a = Socket::connect(fleet.servers[1]->endpoint(), 2000);
  Socket b = Socket::connect(fleet.servers[1]->endpoint(), 2000);
  const auto first = roundtrip(a, frame);
  EXPECT_EQ(first, roundtrip(a, frame));
  EXPECT_EQ(first, roundtrip(b, frame));
}

TEST(Client, MatchesInProcessRetrievalAndCost) {
  Fleet fleet(257, 3, 1, 16, 4);
  Client client(fleet.params, fleet.endpoints(), 2000);
  const CommCost cost = comm_cost(fleet.params);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t alpha = 1 + seed % 16;
    SeededRandom wire_rng(seed);
    SeededRandom local_rng(seed);
    const auto got = client.retrieve(alpha, wire_rng);
    const auto bundle = que(fleet.params, alpha, local_rng);
    std::vector<Answer> local;
    for (const auto& q : bundle.queries) local.push_back(ans(fleet.db, q));
    EXPECT_EQ(got.answers, local);
    EXPECT_EQ(got.result, rec(local, bundle.aux));
    ASSERT_FALSE(got.result.is_bot());
    EXPECT_EQ(got.result.block(), fleet.db.block_copy(alpha));
    EXPECT_EQ(got.bytes_up, cost.upload_total);
    EXPECT_EQ(got.bytes_down, cost.download_total);
  }
}

TEST(Client, TransportErrorsAreNotBot) {
  Fleet fleet(257, 3, 1, 4, 1);
  auto endpoints = fleet.endpoints();
  SeededRandom rng(4);

  const auto mismatched = SchemeParams::make(257, 3, 1, 3, 1);
  Client wrong_shape(mismatched, endpoints, 2000);
  EXPECT_THROW(wrong_shape.retrieve(1, rng), TransportError);

  Listener silent(kAnyPort);
  endpoints[2] = Endpoint{"127.0.0.1", silent.port()};
  Client stalled(fleet.params, endpoints, 200);
  EXPECT_THROW(stalled.retrieve(1, rng), TransportError);

  const std::uint16_t closed_port = [] {
    Listener l(kAnyPort);
    return l.port();
  }();
  endpoints[2] = Endpoint{"127.0.0.1", closed_port};
  Client refused(fleet.params, endpoints, 500);
  EXPECT_THROW(refused.retrieve(1, rng), TransportError);
  EXPECT_THROW(Client(fleet.params, {endpoints[0]}, 500), UsageError);
}

TEST(Client, RecoversAfterServerRestart) {
  Fleet fleet(257, 3, 1, 4, 1);
  Client client(fleet.params, fleet.endpoints(), 2000);
  SeededRandom rng(5);
  EXPECT_FALSE(client.retrieve(2, rng).result.is_bot());
  const Endpoint first = fleet.servers[0]->endpoint();
  fleet.servers[0].reset();
  EXPECT_THROW(client.retrieve(2, rng), TransportError);
  fleet.servers[0] = std::make_unique<Running<Server>>(fleet.db, first);
  EXPECT_FALSE(client.retrieve(2, rng).result.is_bot());
}

ProxyConfig proxy_for(const Endpoint& upstream, ProxyStrategy strategy) {
  ProxyConfig c;
  c.listen = kAnyPort;
  c.upstream = upstream;
  c.strategy = strategy;
  return c;
}

TEST(Proxy, PassthroughIsTransparent) {
  Fleet fleet(257, 3, 1, 8, 2);
  Running<TamperProxy> proxy(proxy_for(fleet.servers[1]->endpoint(), ProxyStrategy::passthrough));
  auto endpoints = fleet.endpoints();
  Client direct(fleet.params, endpoints, 2000);
  endpoints[1] = proxy.endpoint();
  Client proxied(fleet.params, endpoints, 2000);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeededRandom a(seed);
    SeededRandom b(seed);
    const auto x = direct.retrieve(3, a);
    const auto y = proxied.retrieve(3, b);
    EXPECT_EQ(x.answers, y.answers);
    EXPECT_EQ(x.result, y.result);
    EXPECT_EQ(y.bytes_up, x.bytes_up);
  }
}

TEST(Proxy, FlipsDriveClientToBot) {
  Fleet fleet(257, 3, 1, 8, 2);
  for (auto strategy : {ProxyStrategy::flip_data, ProxyStrategy::flip_tag}) {
    Running<TamperProxy> proxy(proxy_for(fleet.servers[0]->endpoint(), strategy));
    auto endpoints = fleet.endpoints();
    endpoints[0] = proxy.endpoint();
    Client client(fleet.params, endpoints, 2000);
    SeededRandom rng(6);
    for (int i = 0; i < 50; ++i) {
      EXPECT_TRUE(client.retrieve(1 + i % 8, rng).result.is_bot()) << strategy_name(strategy);
    }
  }
}

TEST(Proxy, UnreachableUpstreamIsErrorThree) {
  const std::uint16_t closed_port = [] {
    Listener l(kAnyPort);
    return l.port();
  }();
  auto config = proxy_for(Endpoint{"127.0.0.1", closed_port}, ProxyStrategy::passthrough);
  config.timeout_ms = 300;
  Running<TamperProxy> proxy(config);
  Socket s = Socket::connect(proxy.endpoint(), 2000);
  const auto params = SchemeParams::make(257, 3, 1, 2, 1);
  SeededRandom rng(7);
  EXPECT_EQ(roundtrip(s, wire::encode_query_frame(params, que(params, 1, rng).queries[0])),
            wire::encode_error_frame(wire::ErrorCode::upstream_unavailable));
}

TEST(Proxy, TagGuessConfigValidation) {
  auto config = proxy_for(kAnyPort, ProxyStrategy::tag_guess);
  EXPECT_THROW(TamperProxy{config}, UsageError);
  config.coalition = {1, 2};
  config.ell = 3;
  config.t = 1;
  EXPECT_NO_THROW(TamperProxy{config});
  config.coalition = {1, 2, 3};
  EXPECT_THROW(TamperProxy{config}, UsageError);
  EXPECT_THROW(parse_strategy("explode"), UsageError);
  EXPECT_EQ(parse_strategy("flip_tag"), ProxyStrategy::flip_tag);
}

TEST(Proxy, TagGuessPairForgesOnlyOnCorrectKey) {
  Fleet fleet(7, 3, 1, 2, 1);
  auto make = [&](std::size_t j, std::uint64_t seed) {
    auto config = proxy_for(fleet.servers[j - 1]->endpoint(), ProxyStrategy::tag_guess);
    config.coalition = {1, 2};
    config.ell = 3;
    config.t = 1;
    config.seed = seed;
    return std::make_unique<Running<TamperProxy>>(config);
  };
  auto p1 = make(1, 11);
  auto p2 = make(2, 12);
  auto endpoints = fleet.endpoints();
  endpoints[0] = p1->endpoint();
  endpoints[1] = p2->endpoint();
  Client client(fleet.params, endpoints, 2000);
  SeededRandom rng(8);
  int wrong = 0;
  int bot = 0;
  constexpr int kTrials = 3000;
  for (int i = 0; i < kTrials; ++i) {
    const auto got = client.retrieve(1, rng);
    if (got.result.is_bot()) {
      ++bot;
    } else {
      ASSERT_NE(got.result.block(), fleet.db.block_copy(1));
      ++wrong;
    }
  }
  EXPECT_EQ(wrong + bot, kTrials);
  const double q = 1.0 / 6;
  EXPECT_NEAR(static_cast<double>(wrong) / kTrials, q, 4 * std::sqrt(q * (1 - q) / kTrials));
}

}  // namespace
}  // namespace apir::net
