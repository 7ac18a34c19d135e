#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "apir/scheme.hpp"
#include "apir/wire.hpp"

// Loopback-grade TCP runtime: answer servers, the retrieval client and the
// tampering proxy. POSIX sockets, blocking I/O, one thread per connection.
namespace apir::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// "host:port"; throws UsageError on anything else.
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
};

/// Owning TCP socket that counts the bytes it moves.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  /// Throws TransportError when the peer cannot be reached within timeout_ms.
  static Socket connect(const Endpoint& to, int timeout_ms);

  bool is_open() const noexcept { return fd_ >= 0; }
  int fd() const noexcept { return fd_; }
  void set_timeout(int timeout_ms);
  void send_all(std::span<const std::uint8_t> bytes);
  /// False on a clean EOF before the first byte; TransportError on a short read.
  bool recv_exact(std::span<std::uint8_t> out);
  void close() noexcept;

  std::uint64_t bytes_sent() const noexcept { return sent_; }
  std::uint64_t bytes_received() const noexcept { return received_; }

 private:
  int fd_ = -1;
  std::uint64_t sent_ = 0;
  std::uint64_t received_ = 0;
};

/// Reads one frame. nullopt on EOF between frames, FormatError for a bad
/// header (unknown type, oversized body), TransportError for I/O failures.
std::optional<wire::Frame> read_frame(Socket& socket);

/// Bound, listening socket. Port 0 picks a free port.
class Listener {
 public:
  explicit Listener(const Endpoint& at);
  std::uint16_t port() const noexcept { return port_; }
  /// Waits up to timeout_ms; an empty Socket means nothing arrived.
  Socket accept(int timeout_ms);
  void close() noexcept { socket_.close(); }

 private:
  Socket socket_;
  std::uint16_t port_ = 0;
};

/// Runs `handle` on a thread per accepted connection until stop().
class ConnectionLoop {
 public:
  using Handler = std::function<void(Socket&)>;

  ConnectionLoop(const Endpoint& listen, Handler handle);
  ~ConnectionLoop();

  std::uint16_t port() const noexcept { return listener_.port(); }
  /// Blocks until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };
  void reap(bool all);

  Listener listener_;
  Handler handle_;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::set<int> live_fds_;
  std::list<Worker> workers_;
};

/// Reply of a server to one request frame.
struct ServerReply {
  std::vector<std::uint8_t> frame;
  bool close_after = false;
};

/// Stateless request handling: QUERY -> ANSWER, (p, n, w) mismatch -> ERROR 1,
/// anything else -> ERROR 2 plus close.
ServerReply respond(const Database& db, const wire::Frame& request);

/// Answer server over an immutable database.
class Server {
 public:
  Server(Database db, const Endpoint& listen);
  std::uint16_t port() const noexcept { return loop_.port(); }
  void serve_forever() { loop_.run(); }
  void shutdown() { loop_.stop(); }

 private:
  void session(Socket& socket) const;
  Database db_;
  ConnectionLoop loop_;
};

struct WireRetrieval {
  RetrievalResult result = RetrievalResult::bot();
  std::vector<Answer> answers;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
};

/// Retrieval client keeping one persistent connection per server.
class Client {
 public:
  /// servers[j-1] is server j; there must be exactly ell of them.
  Client(SchemeParams params, std::vector<Endpoint> servers, int timeout_ms = 5000);

  /// que, one QUERY per server (all sent before any answer is read), rec.
  /// Transport failures and ERROR frames throw TransportError.
  WireRetrieval retrieve(std::size_t alpha, RandomSource& rng);
  WireRetrieval retrieve(const QueryBundle& bundle);

 private:
  Socket& connection(std::size_t index);

  SchemeParams params_;
  std::vector<Endpoint> servers_;
  int timeout_ms_;
  std::vector<Socket> sockets_;
};

enum class ProxyStrategy { passthrough, flip_data, flip_tag, tag_guess };

/// Throws UsageError for unknown names.
ProxyStrategy parse_strategy(std::string_view name);
std::string_view strategy_name(ProxyStrategy strategy);

struct ProxyConfig {
  Endpoint listen;
  Endpoint upstream;
  ProxyStrategy strategy = ProxyStrategy::passthrough;
  std::uint64_t seed = 1;
  // tag_guess only: the corrupted servers acting together and the scheme
  // shape they assume. Each proxy forges its own server's share of the plan.
  std::vector<std::size_t> coalition;
  std::size_t ell = 0;
  std::size_t t = 0;
  int timeout_ms = 5000;
};

/// Man-in-the-middle in front of one server. Forwards QUERY frames upstream
/// and rewrites the ANSWER:
///   flip_data / flip_tag  add 1 to component 0 of the data / tag channel
///   tag_guess             this server's part of plan_forgery with delta = 1
///                         and a freshly guessed tag key
/// An unreachable upstream yields ERROR code 3.
class TamperProxy {
 public:
  explicit TamperProxy(ProxyConfig config);
  std::uint16_t port() const noexcept { return loop_.port(); }
  void serve_forever() { loop_.run(); }
  void shutdown() { loop_.stop(); }

 private:
  void session(Socket& client);
  Answer rewrite(const wire::QueryFrame& query, Answer answer, RandomSource& rng) const;

  ProxyConfig config_;
  std::atomic<std::uint64_t> sessions_{0};
  ConnectionLoop loop_;
};

}  // namespace apir::net
