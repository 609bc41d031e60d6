#include <doctest.h>

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "companion/protocol/codec.hpp"
#include "companion/server/server.hpp"
#include "companion/sim/scenario.hpp"

using namespace companion;
using namespace companion::protocol;
namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using namespace std::chrono_literals;

namespace {

// Supervisor loop on its own thread, paced at 5 ms per tick.
class Harness {
 public:
  explicit Harness(server::ServerOptions opts = {})
      : sup_(sim::load_scenario_file(std::string(COMPANION_SOURCE_DIR) + "/scenarios/open_room_20x20.map"),
             sim::RobotModel::make_default(), {}, {}),
        srv_(with_free_port(opts)) {
    srv_.start();
    for (const auto& o : sup_.take_outbox()) srv_.publish(o);
    loop_ = std::thread([this] {
      while (!stop_) {
        for (auto& c : srv_.drain()) sup_.submit(std::move(c));
        sup_.tick();
        for (const auto& o : sup_.take_outbox()) srv_.publish(o);
        srv_.set_mode(sup_.mode());
        std::this_thread::sleep_for(5ms);
      }
    });
  }
  ~Harness() {
    stop_ = true;
    loop_.join();
    srv_.stop();
  }
  server::Server& server() { return srv_; }
  std::uint16_t port() const { return srv_.port(); }

 private:
  static server::ServerOptions with_free_port(server::ServerOptions o) {
    o.port = 0;
    return o;
  }
  supervisor::Supervisor sup_;
  server::Server srv_;
  std::atomic<bool> stop_{false};
  std::thread loop_;
};

// Blocking-style clients built on async reads bounded by run_for.
class RawClient {
 public:
  explicit RawClient(std::uint16_t port) { socket_.connect({net::ip::make_address("127.0.0.1"), port}); }

  void send(const std::string& text) { net::write(socket_, net::buffer(text)); }

  std::optional<Message> next(std::chrono::milliseconds timeout = 2000ms) {
    const auto line = next_line(timeout);
    if (!line) return std::nullopt;
    auto decoded = decode_message(*line);
    REQUIRE(std::holds_alternative<Message>(decoded));
    return std::get<Message>(decoded);
  }

  std::optional<std::string> next_line(std::chrono::milliseconds timeout) {
    bool done = false;
    beast::error_code result;
    std::size_t n = 0;
    net::async_read_until(socket_, net::dynamic_buffer(buffer_), '\n', [&](beast::error_code ec, std::size_t k) {
      done = true;
      result = ec;
      n = k;
    });
    io_.restart();
    io_.run_for(timeout);
    if (!done) {
      socket_.cancel();
      io_.restart();
      io_.run();
      eof_ = false;
      return std::nullopt;
    }
    if (result) {
      eof_ = true;
      return std::nullopt;
    }
    std::string line = buffer_.substr(0, n);
    buffer_.erase(0, n);
    return line;
  }

  bool eof() const { return eof_; }
  void close() { socket_.close(); }

 private:
  net::io_context io_;
  tcp::socket socket_{io_};
  std::string buffer_;
  bool eof_ = false;
};

class WsClient {
 public:
  explicit WsClient(std::uint16_t port, const std::string& target = "/ws") {
    beast::get_lowest_layer(ws_).connect({net::ip::make_address("127.0.0.1"), port});
    ws_.handshake("127.0.0.1", target);
  }

  void send(const std::string& text) { ws_.write(net::buffer(text)); }

  std::optional<Message> next(std::chrono::milliseconds timeout = 2000ms) {
    bool done = false;
    beast::error_code result;
    ws_.async_read(buffer_, [&](beast::error_code ec, std::size_t) {
      done = true;
      result = ec;
    });
    io_.restart();
    io_.run_for(timeout);
    if (!done) {
      beast::get_lowest_layer(ws_).cancel();
      io_.restart();
      io_.run();
      return std::nullopt;
    }
    if (result) return std::nullopt;
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    CHECK(text.find('\n') == std::string::npos);
    auto decoded = decode_message(text);
    REQUIRE(std::holds_alternative<Message>(decoded));
    return std::get<Message>(decoded);
  }

  void close() { ws_.close(websocket::close_code::normal); }

 private:
  net::io_context io_;
  websocket::stream<tcp::socket> ws_{io_};
  beast::flat_buffer buffer_;
};

std::string command_line(const std::string& id, const Payload& p) {
  Message m;
  m.id = id;
  m.payload = p;
  return encode_message(m);
}

// Reads until `want` messages of type T arrived, checking seq stays gap-free.
template <typename T, typename Client>
std::vector<Message> collect(Client& c, std::size_t want, std::uint64_t& expected_seq,
                             std::chrono::milliseconds budget = 5000ms) {
  std::vector<Message> got;
  const auto deadline = std::chrono::steady_clock::now() + budget;
  while (got.size() < want && std::chrono::steady_clock::now() < deadline) {
    auto m = c.next();
    if (!m) break;
    REQUIRE(m->seq.has_value());
    CHECK(*m->seq == expected_seq);
    expected_seq = *m->seq + 1;
    if (std::holds_alternative<T>(m->payload)) got.push_back(*m);
  }
  return got;
}

template <typename Client>
Hello expect_hello(Client& c) {
  auto m = c.next();
  REQUIRE(m.has_value());
  CHECK(m->seq == 0u);
  REQUIRE(std::holds_alternative<Hello>(m->payload));
  return std::get<Hello>(m->payload);
}

bool wait_for(const std::function<bool()>& pred, std::chrono::milliseconds budget = 5000ms) {
  const auto deadline = std::chrono::steady_clock::now() + budget;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(10ms);
  }
  return pred();
}

}  // namespace

TEST_SUITE("server") {

TEST_CASE("raw client: hello then acks in command order") {
  Harness h;
  RawClient c(h.port());
  const Hello hello = expect_hello(c);
  CHECK(hello.v == kProtocolVersion);
  CHECK(hello.mode == Mode::Manual);
  c.send(command_line("p1", CameraPan{sim::PanDirection::Left}) + command_line("p2", CameraPan{sim::PanDirection::Right}) +
         command_line("p3", EmergencyPress{}));
  std::uint64_t seq = 1;
  const auto acks = collect<Ack>(c, 3, seq);
  REQUIRE(acks.size() == 3);
  const char* refs[] = {"p1", "p2", "p3"};
  for (int i = 0; i < 3; ++i) {
    const auto& a = std::get<Ack>(acks[i].payload);
    CHECK(a.ref == refs[i]);
    CHECK(a.ok);
  }
}

TEST_CASE("websocket client on /ws drives mode changes") {
  Harness h;
  WsClient c(h.port());
  expect_hello(c);
  c.send(command_line("m", ModeSet{Mode::Autonomous}));
  std::uint64_t seq = 1;
  const auto acks = collect<Ack>(c, 1, seq);
  REQUIRE(acks.size() == 1);
  CHECK(std::get<Ack>(acks[0].payload).ok);
  const auto telemetry = collect<Telemetry>(c, 5, seq);
  REQUIRE(telemetry.size() == 5);
  CHECK(std::get<Telemetry>(telemetry.back().payload).mode == Mode::Autonomous);
  CHECK(collect<Frame>(c, 2, seq).size() == 2);

  // A later client hears the current mode in its hello.
  RawClient late(h.port());
  CHECK(expect_hello(late).mode == Mode::Autonomous);
}

TEST_CASE("both framings see the same frames") {
  Harness h;
  RawClient raw(h.port());
  WsClient ws(h.port());
  expect_hello(raw);
  expect_hello(ws);
  std::uint64_t raw_seq = 1, ws_seq = 1;
  const auto a = collect<Frame>(raw, 30, raw_seq);
  const auto b = collect<Frame>(ws, 30, ws_seq);
  REQUIRE(a.size() == 30);
  REQUIRE(b.size() == 30);
  std::map<std::uint64_t, Frame> by_seq;
  for (const auto& m : a) by_seq[std::get<Frame>(m.payload).frame_seq] = std::get<Frame>(m.payload);
  int common = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& f = std::get<Frame>(b[i].payload);
    if (i > 0) CHECK(f.frame_seq == std::get<Frame>(b[i - 1].payload).frame_seq + 1);
    if (auto it = by_seq.find(f.frame_seq); it != by_seq.end()) {
      ++common;
      CHECK(it->second == f);
    }
  }
  CHECK(common >= 6);
}

TEST_CASE("a client leaving does not disturb the others") {
  Harness h;
  RawClient a(h.port());
  WsClient b(h.port());
  RawClient c(h.port());
  expect_hello(a);
  expect_hello(b);
  expect_hello(c);
  CHECK(wait_for([&] { return h.server().client_count() == 3; }));
  std::uint64_t sa = 1, sb = 1;
  collect<Telemetry>(a, 10, sa);
  collect<Telemetry>(b, 10, sb);
  c.close();
  CHECK(wait_for([&] { return h.server().client_count() == 2; }));
  CHECK(collect<Telemetry>(a, 40, sa).size() == 40);
  CHECK(collect<Telemetry>(b, 40, sb).size() == 40);
}

TEST_CASE("undecodable lines are nacked and the connection stays up") {
  Harness h;
  RawClient c(h.port());
  expect_hello(c);
  c.send("not json\n{\"type\":\"warp\",\"id\":\"w\",\"ts\":0,\"payload\":{}}\n" +
         command_line("ok", CameraPan{sim::PanDirection::Up}));
  std::uint64_t seq = 1;
  const auto acks = collect<Ack>(c, 3, seq);
  REQUIRE(acks.size() == 3);
  const auto& a0 = std::get<Ack>(acks[0].payload);
  const auto& a1 = std::get<Ack>(acks[1].payload);
  const auto& a2 = std::get<Ack>(acks[2].payload);
  CHECK_FALSE(a0.ok);
  CHECK(a0.code == "PARSE_ERROR");
  CHECK_FALSE(a1.ok);
  CHECK(a1.code == "UNKNOWN_TYPE");
  CHECK(a2.ref == "ok");
  CHECK(a2.ok);
}

TEST_CASE("a hello with another version is refused and closed") {
  Harness h;
  RawClient c(h.port());
  expect_hello(c);
  c.send("{\"type\":\"hello\",\"id\":\"h\",\"ts\":0,\"payload\":{\"v\":2}}\n");
  std::optional<Message> nack;
  while (auto m = c.next()) {
    if (std::holds_alternative<Ack>(m->payload)) {
      nack = m;
      break;
    }
  }
  REQUIRE(nack.has_value());
  const auto& a = std::get<Ack>(nack->payload);
  CHECK_FALSE(a.ok);
  CHECK(a.code == "VERSION_UNSUPPORTED");
  CHECK(a.ref == "h");
  while (c.next(2000ms)) {
  }
  CHECK(c.eof());
}

TEST_CASE("an oversized line ends the raw connection") {
  Harness h;
  RawClient c(h.port());
  expect_hello(c);
  c.send(std::string(kMaxLineBytes + 16, 'x'));
  bool saw = false;
  while (auto m = c.next()) {
    if (auto* a = std::get_if<Ack>(&m->payload)) saw = a->code == "FRAME_TOO_LARGE";
  }
  CHECK(saw);
  CHECK(c.eof());
}

TEST_CASE("other HTTP paths get 404") {
  Harness h;
  RawClient c(h.port());
  c.send("GET /index.html HTTP/1.1\r\nHost: x\r\n\r\n");
  const auto status = c.next_line(2000ms);
  REQUIRE(status.has_value());
  CHECK(status->starts_with("HTTP/1.1 404"));
  CHECK_THROWS(WsClient(h.port(), "/other"));
}

TEST_CASE("a client that never reads is dropped") {
  server::ServerOptions opts;
  opts.port = 0;
  opts.client_queue = 8;
  server::Server srv(opts);
  srv.start();
  net::io_context io;
  tcp::socket silent(io);
  silent.connect({net::ip::make_address("127.0.0.1"), srv.port()});
  silent.send(net::buffer(std::string("\n")));
  REQUIRE(wait_for([&] { return srv.client_count() == 1; }));
  supervisor::Outbound big;
  big.message.payload = Log{LogLevel::Info, std::string(256 * 1024, 'z')};
  for (int i = 0; i < 400 && srv.client_count() > 0; ++i) {
    srv.publish(big);
    std::this_thread::sleep_for(1ms);
  }
  CHECK(wait_for([&] { return srv.client_count() == 0; }));
  srv.stop();
}

TEST_CASE("binding a taken port fails") {
  server::ServerOptions opts;
  opts.port = 0;
  server::Server first(opts);
  first.start();
  opts.port = first.port();
  server::Server second(opts);
  CHECK_THROWS_AS(second.start(), std::runtime_error);
  opts.address = "not-an-address";
  server::Server third(opts);
  CHECK_THROWS_AS(third.start(), std::runtime_error);
}

}
