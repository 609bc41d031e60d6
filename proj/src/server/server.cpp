#include "companion/server/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <map>
#include <optional>

#include "companion/protocol/codec.hpp"

namespace companion::server {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using protocol::Message;

struct Session;

struct Server::Impl {
  net::io_context io;
  tcp::acceptor acceptor{io};
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions;  // touched on the I/O thread only
  std::uint64_t next_client = 1;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
};

struct Session : std::enable_shared_from_this<Session> {
  Session(Server& owner, tcp::socket socket, std::uint64_t id)
      : owner(owner), impl(*owner.impl_), socket(std::move(socket)), timer(impl.io), id(id) {}

  void start() {
    auto self = shared_from_this();
    timer.expires_after(std::chrono::milliseconds(owner.options_.sniff_timeout_ms));
    timer.async_wait([self](beast::error_code ec) {
      if (!ec && !self->sniffed) {
        self->sniffed = true;
        beast::error_code ignore;
        self->socket.cancel(ignore);
      }
    });
    socket.async_read_some(sniff.prepare(1024), [self](beast::error_code ec, std::size_t n) {
      self->timer.cancel();
      self->sniffed = true;
      if (ec && ec != net::error::operation_aborted) return self->close();
      self->sniff.commit(n);
      const std::string_view head(static_cast<const char*>(self->sniff.data().data()), self->sniff.size());
      if (head.starts_with("GET ")) {
        self->start_websocket();
      } else {
        self->start_raw();
      }
    });
  }

  // ---- WebSocket ----

  void start_websocket() {
    auto self = shared_from_this();
    http::async_read(socket, sniff, request, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      if (self->request.target() != "/ws" || !websocket::is_upgrade(self->request)) {
        return self->reject_http();
      }
      self->ws.emplace(std::move(self->socket));
      self->ws->read_message_max(protocol::kMaxLineBytes + 2);
      self->ws->text(true);
      self->ws->async_accept(self->request, [self](beast::error_code ec2) {
        if (ec2) return self->close();
        self->join();
        self->read_ws();
      });
    });
  }

  void reject_http() {
    auto self = shared_from_this();
    auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, request.version());
    res->set(http::field::content_type, "text/plain");
    res->body() = "WebSocket endpoint is /ws\n";
    res->keep_alive(false);
    res->prepare_payload();
    http::async_write(socket, *res, [self, res](beast::error_code, std::size_t) { self->close(); });
  }

  void read_ws() {
    auto self = shared_from_this();
    ws->async_read(ws_buffer, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      const std::string text = beast::buffers_to_string(self->ws_buffer.data());
      self->ws_buffer.consume(self->ws_buffer.size());
      self->handle_line(text);
      if (!self->closed) self->read_ws();
    });
  }

  // ---- raw TCP ----

  void start_raw() {
    raw.assign(static_cast<const char*>(sniff.data().data()), sniff.size());
    sniff.consume(sniff.size());
    join();
    read_raw();
  }

  void read_raw() {
    auto self = shared_from_this();
    net::async_read_until(
        socket, net::dynamic_buffer(raw, protocol::kMaxLineBytes + 2), '\n',
        [self](beast::error_code ec, std::size_t n) {
          if (ec == net::error::not_found) {
            // No newline within the size limit: the stream cannot be resynchronised.
            self->nack("", "FRAME_TOO_LARGE", "line exceeds 1 MiB");
            self->close_after_flush = true;
            return self->maybe_finish();
          }
          if (ec) return self->close();
          const std::string line = self->raw.substr(0, n);
          self->raw.erase(0, n);
          self->handle_line(line);
          if (!self->closed) self->read_raw();
        });
  }

  // ---- shared ----

  void join() {
    impl.sessions[id] = shared_from_this();
    ++owner.clients_;
    Message hello;
    hello.ts = owner.clock_.load();
    hello.payload = protocol::Hello{protocol::kProtocolVersion, owner.mode_.load()};
    send(std::move(hello));
  }

  void nack(std::string ref, std::string code, std::string detail) {
    Message m;
    m.ts = owner.clock_.load();
    m.payload = protocol::Ack{std::move(ref), false, std::move(code), std::move(detail)};
    send(std::move(m));
  }

  void handle_line(std::string_view line) {
    if (line.find_first_not_of(" \t\r\n") == std::string_view::npos) return;
    auto decoded = protocol::decode_message(line);
    if (auto* err = std::get_if<protocol::DecodeError>(&decoded)) {
      std::string detail = err->field.empty() ? err->detail : err->field + ": " + err->detail;
      return nack("", std::string(protocol::to_string(err->code)), std::move(detail));
    }
    Message& m = std::get<Message>(decoded);
    if (const auto* h = std::get_if<protocol::Hello>(&m.payload)) {
      if (h->v != protocol::kProtocolVersion) {
        nack(m.id.value_or(""), "VERSION_UNSUPPORTED",
             "server speaks v" + std::to_string(protocol::kProtocolVersion));
        close_after_flush = true;
        return maybe_finish();
      }
      Message ack;
      ack.ts = owner.clock_.load();
      ack.payload = protocol::Ack{m.id.value_or(""), true, std::nullopt, std::nullopt};
      return send(std::move(ack));
    }
    if (!m.id) {
      return nack("", "UNSUPPORTED_COMMAND",
                  std::string(protocol::type_name(m.payload)) + " is not a client command");
    }
    std::lock_guard lock(owner.inbound_mutex_);
    owner.inbound_.push_back({id, std::move(m)});
  }

  void send(Message m) {
    if (closed || close_after_flush) return;
    if (queue.size() >= owner.options_.client_queue) return close();  // slow consumer
    m.seq = next_seq++;
    std::string line = protocol::encode_message(m);
    if (ws) line.pop_back();
    queue.push_back(std::move(line));
    if (!writing) write_next();
  }

  void write_next() {
    writing = true;
    auto self = shared_from_this();
    auto done = [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->queue.pop_front();
      if (self->queue.empty()) {
        self->writing = false;
        return self->maybe_finish();
      }
      self->write_next();
    };
    if (ws) {
      ws->async_write(net::buffer(queue.front()), done);
    } else {
      net::async_write(socket, net::buffer(queue.front()), done);
    }
  }

  void maybe_finish() {
    if (close_after_flush && !writing) close();
  }

  void close() {
    if (closed) return;
    closed = true;
    timer.cancel();
    if (impl.sessions.erase(id) != 0) --owner.clients_;
    beast::error_code ignore;
    if (ws) {
      beast::get_lowest_layer(*ws).shutdown(tcp::socket::shutdown_both, ignore);
      beast::get_lowest_layer(*ws).close(ignore);
    } else {
      socket.shutdown(tcp::socket::shutdown_both, ignore);
      socket.close(ignore);
    }
  }

  Server& owner;
  Server::Impl& impl;
  tcp::socket socket;
  net::steady_timer timer;
  std::uint64_t id;
  beast::flat_buffer sniff;
  http::request<http::string_body> request;
  std::optional<websocket::stream<tcp::socket>> ws;
  beast::flat_buffer ws_buffer;
  std::string raw;
  std::deque<std::string> queue;
  std::uint64_t next_seq = 0;
  bool sniffed = false;
  bool writing = false;
  bool closed = false;
  bool close_after_flush = false;
};

namespace {

void accept_loop(Server& owner, Server::Impl& impl) {
  impl.acceptor.async_accept([&owner, &impl](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted || !impl.acceptor.is_open()) return;
    if (!ec) {
      beast::error_code ignore;
      socket.set_option(tcp::no_delay(true), ignore);
      std::make_shared<Session>(owner, std::move(socket), impl.next_client++)->start();
    }
    accept_loop(owner, impl);
  });
}

}  // namespace

Server::Server(ServerOptions options) : options_(std::move(options)), impl_(std::make_unique<Impl>()) {}

Server::~Server() { stop(); }

void Server::start() {
  beast::error_code ec;
  const auto address = net::ip::make_address(options_.address, ec);
  if (ec) throw std::runtime_error("bad bind address '" + options_.address + "': " + ec.message());
  const tcp::endpoint endpoint(address, options_.port);
  impl_->acceptor.open(endpoint.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(endpoint, ec);
  if (!ec) impl_->acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw std::runtime_error("cannot listen on " + options_.address + ":" + std::to_string(options_.port) +
                             ": " + ec.message());
  }
  bound_port_ = impl_->acceptor.local_endpoint().port();
  impl_->work.emplace(impl_->io.get_executor());
  accept_loop(*this, *impl_);
  io_thread_ = std::thread([this] { impl_->io.run(); });
}

void Server::stop() {
  if (!io_thread_.joinable()) return;
  net::post(impl_->io, [this] {
    beast::error_code ignore;
    impl_->acceptor.close(ignore);
    auto sessions = impl_->sessions;
    for (auto& [_, s] : sessions) s->close();
    // Handshakes still in flight are abandoned along with their handlers.
    impl_->io.stop();
  });
  impl_->work.reset();
  io_thread_.join();
}

void Server::publish(const supervisor::Outbound& out) {
  clock_.store(out.message.ts);
  net::post(impl_->io, [this, out] {
    if (out.only_client) {
      auto it = impl_->sessions.find(*out.only_client);
      if (it != impl_->sessions.end()) it->second->send(out.message);
      return;
    }
    auto sessions = impl_->sessions;  // send() may drop a session
    for (auto& [_, s] : sessions) s->send(out.message);
  });
}

std::vector<supervisor::InboundCommand> Server::drain() {
  std::lock_guard lock(inbound_mutex_);
  std::vector<supervisor::InboundCommand> out(std::make_move_iterator(inbound_.begin()),
                                              std::make_move_iterator(inbound_.end()));
  inbound_.clear();
  return out;
}

}  // namespace companion::server
