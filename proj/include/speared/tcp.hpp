#pragma once

// Newline-framed TCP transport for MessageService (POSIX sockets).
//
// One reader and one writer thread per connection plus a ticker thread that
// steps the simulation while a program runs. Every access to the service
// happens under a single mutex, so all clients observe one total order.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "speared/service.hpp"

namespace speared {

inline constexpr std::uint16_t kDefaultPort = 9870;
inline constexpr const char* kPortEnvVar = "SPEARED_PORT";
/// Inbound frames longer than this are rejected.
inline constexpr std::size_t kMaxFrameBytes = 1 << 20;

class BindError : public Error {
 public:
  using Error::Error;
};

struct ServerOptions {
  std::uint16_t port = kDefaultPort;  ///< 0 picks an ephemeral port
  double tick_dt = 0.01;              ///< simulated seconds per tick
  std::chrono::milliseconds tick_period{10};
  std::size_t queue_capacity = 4096;  ///< events buffered per client
};

namespace tcp_detail {

inline bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace tcp_detail

class Server {
 public:
  Server(MessageService& service, ServerOptions options) : service_(service), options_(options) {}
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() { stop(); }

  /// Binds and starts serving. Throws BindError.
  void start() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw BindError(std::string("socket: ") + std::strerror(errno));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(options_.port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 64) < 0) {
      const std::string msg = "cannot bind port " + std::to_string(options_.port) + ": " + std::strerror(errno);
      ::close(listen_fd_);
      listen_fd_ = -1;
      throw BindError(msg);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);

    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
    ticker_ = std::thread([this] { tick_loop(); });
  }

  std::uint16_t port() const { return port_; }

  void stop() {
    if (!running_.exchange(false)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (acceptor_.joinable()) acceptor_.join();
    if (ticker_.joinable()) ticker_.join();
    std::list<std::shared_ptr<Connection>> conns;
    {
      std::lock_guard lock(conns_mu_);
      conns.swap(connections_);
    }
    for (auto& c : conns) {
      ::shutdown(c->fd, SHUT_RDWR);
      c->outbox->close();
    }
    for (auto& c : conns) {
      if (c->reader.joinable()) c->reader.join();
      if (c->writer.joinable()) c->writer.join();
      ::close(c->fd);
    }
  }

  /// Runs `fn(service)` under the service lock.
  template <typename Fn>
  auto with_service(Fn&& fn) {
    std::lock_guard lock(service_mu_);
    return fn(service_);
  }

 private:
  struct Connection {
    int fd = -1;
    MessageService::ClientId id = 0;
    std::shared_ptr<Outbox> outbox;
    std::thread reader;
    std::thread writer;
  };

  void accept_loop() {
    while (running_) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        return;
      }
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

      auto conn = std::make_shared<Connection>();
      conn->fd = fd;
      conn->outbox = std::make_shared<Outbox>(options_.queue_capacity);
      {
        std::lock_guard lock(service_mu_);
        conn->id = service_.connect(conn->outbox);
      }
      conn->writer = std::thread([this, c = conn.get()] { write_loop(*c); });
      conn->reader = std::thread([this, c = conn.get()] { read_loop(*c); });
      std::lock_guard lock(conns_mu_);
      connections_.push_back(std::move(conn));
    }
  }

  void read_loop(Connection& c) {
    std::string buffer;
    char chunk[4096];
    bool oversized = false;
    while (true) {
      const ssize_t n = ::recv(c.fd, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
        std::string_view frame(buffer.data() + start, nl - start);
        if (!frame.empty() && frame.back() == '\r') frame.remove_suffix(1);
        if (oversized) {
          oversized = false;
          continue;
        }
        if (frame.empty()) continue;
        std::lock_guard lock(service_mu_);
        service_.receive(c.id, frame);
      }
      buffer.erase(0, start);
      if (buffer.size() > kMaxFrameBytes) {
        buffer.clear();
        oversized = true;
        c.outbox->push_control(to_frame(
            make_error("", "", ProtocolError("bad_payload", "frame exceeds " + std::to_string(kMaxFrameBytes) + " bytes"))));
      }
    }
    {
      std::lock_guard lock(service_mu_);
      service_.disconnect(c.id);
    }
    c.outbox->close();
  }

  void write_loop(Connection& c) {
    while (true) {
      auto frame = c.outbox->pop(std::chrono::milliseconds(200));
      if (!frame) {
        if (c.outbox->closed()) return;
        continue;
      }
      frame->push_back('\n');
      if (!tcp_detail::send_all(c.fd, *frame)) {
        ::shutdown(c.fd, SHUT_RDWR);
        return;
      }
    }
  }

  void tick_loop() {
    auto next = std::chrono::steady_clock::now();
    while (running_) {
      next += options_.tick_period;
      std::this_thread::sleep_until(next);
      std::lock_guard lock(service_mu_);
      if (service_.busy()) service_.tick(options_.tick_dt);
    }
  }

  MessageService& service_;
  ServerOptions options_;
  std::mutex service_mu_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::thread ticker_;
  std::mutex conns_mu_;
  std::list<std::shared_ptr<Connection>> connections_;
};

/// Blocking line-oriented client.
class LineClient {
 public:
  LineClient() = default;
  LineClient(const LineClient&) = delete;
  LineClient& operator=(const LineClient&) = delete;
  ~LineClient() { close(); }

  void connect(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw Error("bad host address " + host);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
      throw Error("connect to " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }

  /// Sends raw bytes followed by a newline.
  void send_frame(std::string_view frame) {
    std::string data(frame);
    data.push_back('\n');
    if (!tcp_detail::send_all(fd_, data)) throw Error("send failed");
  }

  void send(const Envelope& e) { send_frame(to_frame(e)); }

  /// Next frame, or nullopt on timeout / closed connection.
  std::optional<std::string> recv_frame(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string frame = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return frame;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd p{fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(left.count()));
      if (r < 0 && errno == EINTR) continue;
      if (r <= 0) return std::nullopt;
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) return std::nullopt;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace speared
