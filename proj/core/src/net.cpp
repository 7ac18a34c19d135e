#include "apir/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <utility>

#include "apir/adversary.hpp"
#include "apir/errors.hpp"

namespace apir::net {
namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

sockaddr_in resolve(const Endpoint& at) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const int rc = ::getaddrinfo(at.host.c_str(), nullptr, &hints, &found);
  if (rc != 0 || found == nullptr) throw TransportError("cannot resolve " + at.host + ": " + ::gai_strerror(rc));
  sockaddr_in addr{};
  std::memcpy(&addr, found->ai_addr, sizeof(addr));
  ::freeaddrinfo(found);
  addr.sin_port = htons(at.port);
  return addr;
}

timeval to_timeval(int timeout_ms) {
  timeval tv{};
  tv.tv_sec = timeout_ms / 1000;
  tv.tv_usec = (timeout_ms % 1000) * 1000;
  return tv;
}

constexpr int kAcceptPollMs = 100;

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw UsageError("endpoint must look like HOST:PORT, got '" + std::string(text) + "'");
  }
  unsigned port = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port > 65535) {
    throw UsageError("bad port in endpoint '" + std::string(text) + "'");
  }
  return Endpoint{std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

Socket::Socket(Socket&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), sent_(other.sent_), received_(other.received_) {}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    sent_ = other.sent_;
    received_ = other.received_;
  }
  return *this;
}

Socket::~Socket() { close(); }

void Socket::close() noexcept {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

Socket Socket::connect(const Endpoint& to, int timeout_ms) {
  const sockaddr_in addr = resolve(to);
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!s.is_open()) throw TransportError(errno_text("socket"));
  const int flags = ::fcntl(s.fd_, F_GETFL);
  ::fcntl(s.fd_, F_SETFL, flags | O_NONBLOCK);
  if (::connect(s.fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    if (errno != EINPROGRESS) throw TransportError(errno_text(("connect " + to.to_string()).c_str()));
    pollfd pfd{s.fd_, POLLOUT, 0};
    const int ready = ::poll(&pfd, 1, timeout_ms);
    if (ready == 0) throw TransportError("connect " + to.to_string() + ": timed out");
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(s.fd_, SOL_SOCKET, SO_ERROR, &err, &len);
    if (ready < 0 || err != 0) {
      errno = ready < 0 ? errno : err;
      throw TransportError(errno_text(("connect " + to.to_string()).c_str()));
    }
  }
  ::fcntl(s.fd_, F_SETFL, flags);
  const int one = 1;
  ::setsockopt(s.fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  s.set_timeout(timeout_ms);
  return s;
}

void Socket::set_timeout(int timeout_ms) {
  const timeval tv = to_timeval(timeout_ms);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

void Socket::send_all(std::span<const std::uint8_t> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno == EAGAIN ? "send timed out" : errno_text("send"));
    }
    done += static_cast<std::size_t>(n);
    sent_ += static_cast<std::uint64_t>(n);
  }
}

bool Socket::recv_exact(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    const ssize_t n = ::recv(fd_, out.data() + done, out.size() - done, 0);
    if (n == 0) {
      if (done == 0) return false;
      throw TransportError("connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno == EAGAIN ? "receive timed out" : errno_text("recv"));
    }
    done += static_cast<std::size_t>(n);
    received_ += static_cast<std::uint64_t>(n);
  }
  return true;
}

std::optional<wire::Frame> read_frame(Socket& socket) {
  std::array<std::uint8_t, wire::kFrameHeaderBytes> header{};
  if (!socket.recv_exact(header)) return std::nullopt;
  const std::uint32_t length = wire::get_u32(header, 0);
  const std::uint8_t type = header[4];
  if (type < 1 || type > 3) throw FormatError("unknown frame type " + std::to_string(type));
  if (length > wire::kMaxBodyBytes) throw FormatError("frame body too large");
  wire::Frame frame{static_cast<wire::FrameType>(type), std::vector<std::uint8_t>(length)};
  if (length > 0 && !socket.recv_exact(frame.body)) throw TransportError("connection closed mid-frame");
  return frame;
}

Listener::Listener(const Endpoint& at) {
  const sockaddr_in addr = [&] {
    try {
      return resolve(at);
    } catch (const TransportError& e) {
      throw UsageError(e.what());
    }
  }();
  socket_ = Socket(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!socket_.is_open()) throw TransportError(errno_text("socket"));
  const int one = 1;
  ::setsockopt(socket_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(socket_.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw TransportError(errno_text(("bind " + at.to_string()).c_str()));
  }
  if (::listen(socket_.fd(), 64) != 0) throw TransportError(errno_text("listen"));
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(socket_.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

Socket Listener::accept(int timeout_ms) {
  pollfd pfd{socket_.fd(), POLLIN, 0};
  const int ready = ::poll(&pfd, 1, timeout_ms);
  if (ready <= 0) return Socket();
  Socket s(::accept4(socket_.fd(), nullptr, nullptr, SOCK_CLOEXEC));
  if (s.is_open()) {
    const int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  return s;
}

ConnectionLoop::ConnectionLoop(const Endpoint& listen, Handler handle)
    : listener_(listen), handle_(std::move(handle)) {}

ConnectionLoop::~ConnectionLoop() {
  stop();
  reap(true);
}

void ConnectionLoop::run() {
  while (!stopping_) {
    Socket conn = listener_.accept(kAcceptPollMs);
    reap(false);
    if (!conn.is_open()) continue;
    auto done = std::make_shared<std::atomic<bool>>(false);
    {
      std::lock_guard lock(mu_);
      live_fds_.insert(conn.fd());
      if (stopping_) ::shutdown(conn.fd(), SHUT_RDWR);
    }
    std::thread worker([this, done, s = std::move(conn)]() mutable {
      try {
        handle_(s);
      } catch (const std::exception&) {
        // A broken connection only ends its own session.
      }
      {
        std::lock_guard lock(mu_);
        live_fds_.erase(s.fd());
        s.close();
      }
      done->store(true);
    });
    std::lock_guard lock(mu_);
    workers_.push_back(Worker{std::move(worker), std::move(done)});
  }
  listener_.close();
  reap(true);
}

void ConnectionLoop::stop() {
  stopping_ = true;
  std::lock_guard lock(mu_);
  for (int fd : live_fds_) ::shutdown(fd, SHUT_RDWR);
}

void ConnectionLoop::reap(bool all) {
  std::list<Worker> finished;
  {
    std::lock_guard lock(mu_);
    for (auto it = workers_.begin(); it != workers_.end();) {
      if (all || it->done->load()) {
        finished.splice(finished.end(), workers_, it++);
      } else {
        ++it;
      }
    }
  }
  for (auto& w : finished) w.thread.join();
}

ServerReply respond(const Database& db, const wire::Frame& request) {
  if (request.type != wire::FrameType::query) return {wire::encode_error_frame(wire::ErrorCode::malformed), true};
  std::optional<wire::QueryFrame> parsed;
  try {
    parsed = wire::decode_query_body(request.body);
  } catch (const FormatError&) {
    return {wire::encode_error_frame(wire::ErrorCode::malformed), true};
  }
  const wire::QueryFrame& query = *parsed;
  if (query.p != db.field().modulus() || query.n != db.n() || query.w != db.w()) {
    return {wire::encode_error_frame(wire::ErrorCode::parameter_mismatch), false};
  }
  return {wire::encode_answer_frame(ans(db, query.query)), false};
}

Server::Server(Database db, const Endpoint& listen)
    : db_(std::move(db)), loop_(listen, [this](Socket& s) { session(s); }) {}

void Server::session(Socket& socket) const {
  while (true) {
    std::optional<wire::Frame> frame;
    try {
      frame = read_frame(socket);
    } catch (const FormatError&) {
      socket.send_all(wire::encode_error_frame(wire::ErrorCode::malformed));
      return;
    }
    if (!frame) return;
    const ServerReply reply = respond(db_, *frame);
    socket.send_all(reply.frame);
    if (reply.close_after) return;
  }
}

Client::Client(SchemeParams params, std::vector<Endpoint> servers, int timeout_ms)
    : params_(std::move(params)), servers_(std::move(servers)), timeout_ms_(timeout_ms) {
  params_.validate();
  if (servers_.size() != params_.ell) throw UsageError("need exactly ell server endpoints");
  sockets_.resize(servers_.size());
}

Socket& Client::connection(std::size_t index) {
  Socket& s = sockets_[index];
  if (!s.is_open()) s = Socket::connect(servers_[index], timeout_ms_);
  return s;
}

WireRetrieval Client::retrieve(std::size_t alpha, RandomSource& rng) {
  return retrieve(que(params_, alpha, rng));
}

WireRetrieval Client::retrieve(const QueryBundle& bundle) {
  WireRetrieval out;
  try {
    std::vector<std::uint64_t> sent_before(servers_.size());
    std::vector<std::uint64_t> received_before(servers_.size());
    for (std::size_t j = 0; j < servers_.size(); ++j) {
      Socket& s = connection(j);
      sent_before[j] = s.bytes_sent();
      received_before[j] = s.bytes_received();
      s.send_all(wire::encode_query_frame(params_, bundle.queries.at(j)));
    }
    for (std::size_t j = 0; j < servers_.size(); ++j) {
      Socket& s = sockets_[j];
      const std::string who = "server " + std::to_string(j + 1) + " (" + servers_[j].to_string() + ")";
      std::optional<wire::Frame> frame;
      try {
        frame = read_frame(s);
      } catch (const FormatError& e) {
        throw TransportError(who + " sent a malformed frame: " + e.what());
      }
      if (!frame) throw TransportError(who + " closed the connection");
      if (frame->type == wire::FrameType::error) {
        const auto code = static_cast<unsigned>(wire::decode_error_body(frame->body));
        throw TransportError(who + " replied ERROR " + std::to_string(code));
      }
      if (frame->type != wire::FrameType::answer) throw TransportError(who + " sent an unexpected frame");
      try {
        out.answers.push_back(wire::decode_answer_body(frame->body, params_.field, params_.w));
      } catch (const FormatError& e) {
        throw TransportError(who + " sent a malformed answer: " + e.what());
      }
      out.bytes_up += s.bytes_sent() - sent_before[j];
      out.bytes_down += s.bytes_received() - received_before[j];
    }
  } catch (...) {
    // Stream positions are unknown after a failure; reconnect next time.
    for (auto& s : sockets_) s.close();
    throw;
  }
  out.result = rec(out.answers, bundle.aux);
  return out;
}

ProxyStrategy parse_strategy(std::string_view name) {
  if (name == "passthrough") return ProxyStrategy::passthrough;
  if (name == "flip_data") return ProxyStrategy::flip_data;
  if (name == "flip_tag") return ProxyStrategy::flip_tag;
  if (name == "tag_guess") return ProxyStrategy::tag_guess;
  throw UsageError("unknown proxy strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(ProxyStrategy strategy) {
  switch (strategy) {
    case ProxyStrategy::passthrough: return "passthrough";
    case ProxyStrategy::flip_data: return "flip_data";
    case ProxyStrategy::flip_tag: return "flip_tag";
    case ProxyStrategy::tag_guess: return "tag_guess";
  }
  return "unknown";
}

TamperProxy::TamperProxy(ProxyConfig config)
    : config_(std::move(config)), loop_(config_.listen, [this](Socket& s) { session(s); }) {
  std::sort(config_.coalition.begin(), config_.coalition.end());
  if (config_.strategy == ProxyStrategy::tag_guess) {
    if (config_.coalition.empty()) throw UsageError("tag_guess needs a coalition");
    if (config_.t < 1 || config_.ell <= config_.t) throw UsageError("tag_guess needs 1 <= t < ell");
    if (config_.coalition.size() > config_.ell - 1 || config_.coalition.front() < 1 ||
        config_.coalition.back() > config_.ell) {
      throw UsageError("tag_guess coalition must be at most ell-1 servers within [1, ell]");
    }
  }
}

Answer TamperProxy::rewrite(const wire::QueryFrame& query, Answer answer, RandomSource& rng) const {
  const PrimeField field(query.p);
  switch (config_.strategy) {
    case ProxyStrategy::passthrough:
      break;
    case ProxyStrategy::flip_data:
      answer.a.at(0) += field.one();
      break;
    case ProxyStrategy::flip_tag:
      answer.b.at(0) += field.one();
      break;
    case ProxyStrategy::tag_guess: {
      const std::size_t me = query.query.server_point.value();
      if (!std::binary_search(config_.coalition.begin(), config_.coalition.end(), me)) break;
      const SchemeParams params = SchemeParams::make(query.p, config_.ell, config_.t, query.n, query.w);
      const FieldElement guess = sample_uniform(field, true, rng);
      const ForgeryPlan plan = plan_forgery(params, config_.coalition, field.one(), guess);
      if (auto it = plan.data_offsets.find(me); it != plan.data_offsets.end()) answer.a.at(0) += it->second;
      if (auto it = plan.tag_offsets.find(me); it != plan.tag_offsets.end()) answer.b.at(0) += it->second;
      break;
    }
  }
  return answer;
}

void TamperProxy::session(Socket& client) {
  SeededRandom rng(derive_seed(config_.seed, sessions_++, 1));
  Socket upstream;
  const auto unavailable = wire::encode_error_frame(wire::ErrorCode::upstream_unavailable);
  while (true) {
    std::optional<wire::Frame> frame;
    try {
      frame = read_frame(client);
    } catch (const FormatError&) {
      client.send_all(wire::encode_error_frame(wire::ErrorCode::malformed));
      return;
    }
    if (!frame) return;

    std::optional<wire::QueryFrame> query;
    if (frame->type == wire::FrameType::query) {
      try {
        query = wire::decode_query_body(frame->body);
      } catch (const FormatError&) {
        // Let the server judge it.
      }
    }

    std::optional<wire::Frame> reply;
    try {
      if (!upstream.is_open()) upstream = Socket::connect(config_.upstream, config_.timeout_ms);
      upstream.send_all(wire::encode_frame(frame->type, frame->body));
      reply = read_frame(upstream);
    } catch (const std::runtime_error&) {
      reply.reset();
    }
    if (!reply) {
      upstream.close();
      client.send_all(unavailable);
      continue;
    }

    if (reply->type == wire::FrameType::answer && query && config_.strategy != ProxyStrategy::passthrough) {
      const PrimeField field(query->p);
      Answer answer = wire::decode_answer_body(reply->body, field, query->w);
      client.send_all(wire::encode_answer_frame(rewrite(*query, std::move(answer), rng)));
    } else {
      client.send_all(wire::encode_frame(reply->type, reply->body));
    }
  }
}

}  // namespace apir::net
