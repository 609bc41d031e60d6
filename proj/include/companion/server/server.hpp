#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "companion/supervisor/supervisor.hpp"

namespace companion::server {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8790;          // 0 picks a free port
  std::size_t client_queue = 1024;    // messages buffered per client before it is dropped
  int sniff_timeout_ms = 250;         // a silent client is treated as raw TCP after this
};

// One port, two framings: a client whose first bytes are an HTTP GET is
// upgraded to WebSocket on /ws (one message per text frame); anything else is
// newline-delimited raw TCP. Every client gets its own gap-free seq numbering
// and starts with a hello. I/O runs on a private thread.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the I/O thread. Throws std::runtime_error on bind failure.
  void start();
  void stop();

  std::uint16_t port() const { return bound_port_; }
  std::size_t client_count() const { return clients_.load(); }

  /// Thread-safe. Fans out to every client, or to one when only_client is set.
  void publish(const supervisor::Outbound& out);
  /// Thread-safe. Commands received since the last call, FIFO across clients.
  std::vector<supervisor::InboundCommand> drain();

  /// What new clients are told in their hello.
  void set_mode(protocol::Mode m) { mode_.store(m); }

  struct Impl;

 private:
  ServerOptions options_;
  std::unique_ptr<Impl> impl_;
  std::thread io_thread_;
  std::uint16_t bound_port_ = 0;
  std::atomic<std::size_t> clients_{0};
  std::atomic<protocol::Mode> mode_{protocol::Mode::Manual};
  std::atomic<double> clock_{0.0};
  std::mutex inbound_mutex_;
  std::deque<supervisor::InboundCommand> inbound_;

  friend struct Session;
};

}  // namespace companion::server
