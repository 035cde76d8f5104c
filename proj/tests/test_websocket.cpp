#include "mindsculpt/error.hpp"
#include "mindsculpt/websocket.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <doctest.h>
#include <json.hpp>

#include <mutex>
#include <thread>

using namespace mindsculpt;
using nlohmann::json;
namespace net = boost::asio;
namespace beast = boost::beast;
using tcp = net::ip::tcp;

namespace {

class Client {
 public:
  explicit Client(std::uint16_t port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }

  json read() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }

  // Skips frames until one satisfies pred.
  template <typename Pred>
  json read_until(Pred pred) {
    for (int i = 0; i < 100; ++i) {
      json j = read();
      if (pred(j)) return j;
    }
    FAIL("expected frame never arrived");
    return {};
  }

  void send(const std::string& text) { ws_.write(net::buffer(text)); }

  void close() { ws_.close(beast::websocket::close_code::normal); }

 private:
  net::io_context ioc_;
  beast::websocket::stream<tcp::socket> ws_;
};

struct Recorder {
  std::mutex mutex;
  std::vector<ControlCommand> seen;

  WebSocketServer::ControlHandler handler() {
    return [this](const ControlCommand& cmd, WebSocketServer::AckFn done) {
      {
        std::lock_guard lock(mutex);
        seen.push_back(cmd);
      }
      ControlAck ack{cmd.kind, true, "", ""};
      if (cmd.kind == ControlKind::Save) ack.path = "designs/design_001.obj";
      done(ack);
    };
  }
};

bool is_event(const json& j, const std::string& event) {
  return j.value("type", "") == "status" && j.value("event", "") == event;
}

void wait_for_clients(const WebSocketServer& server, std::size_t n) {
  for (int i = 0; i < 200 && server.client_count() != n; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
}

}  // namespace

TEST_CASE("first client controls, later clients are read-only") {
  Recorder rec;
  WebSocketServer server("127.0.0.1", 0, rec.handler());
  REQUIRE(server.port() != 0);

  Client first(server.port());
  const json hello = first.read();
  CHECK(is_event(hello, "connected"));
  CHECK(hello.at("message") == "controller");

  Client second(server.port());
  const json hello2 = second.read();
  CHECK(is_event(hello2, "connected"));
  CHECK(hello2.at("message") == "read-only");
  wait_for_clients(server, 2);
  CHECK(server.client_count() == 2);

  first.send(R"({"type":"control","cmd":"save"})");
  const json ack = first.read_until([](const json& j) { return is_event(j, "ack"); });
  CHECK(ack.at("cmd") == "save");
  CHECK(ack.at("ok") == true);
  CHECK(ack.at("path") == "designs/design_001.obj");

  second.send(R"({"type":"control","cmd":"pause"})");
  const json refused = second.read_until([](const json& j) { return is_event(j, "ack"); });
  CHECK(refused.at("ok") == false);
  CHECK(refused.at("cmd") == "pause");
  {
    std::lock_guard lock(rec.mutex);
    REQUIRE(rec.seen.size() == 1);
    CHECK(rec.seen[0].kind == ControlKind::Save);
  }

  first.close();
  wait_for_clients(server, 1);
  CHECK(server.client_count() == 1);
  server.stop();
}

TEST_CASE("malformed control messages get an error status") {
  Recorder rec;
  WebSocketServer server("127.0.0.1", 0, rec.handler());
  Client c(server.port());
  c.read();
  c.send(R"({"type":"control","cmd":"explode"})");
  const json err = c.read_until([](const json& j) { return j.value("type", "") == "status"; });
  CHECK(is_event(err, "error"));
  CHECK(!err.at("message").get<std::string>().empty());
  c.send("not json at all");
  CHECK(is_event(c.read(), "error"));
  c.send(R"({"type":"control","cmd":"imagine","class_id":3})");
  CHECK(is_event(c.read_until([](const json& j) { return j.value("type", "") == "status"; }), "ack"));
  std::lock_guard lock(rec.mutex);
  REQUIRE(rec.seen.size() == 1);
  CHECK(rec.seen[0].class_id == 3);
}

TEST_CASE("frames are broadcast and late joiners receive the current geometry") {
  Recorder rec;
  WebSocketServer server("127.0.0.1", 0, rec.handler());
  Client a(server.port());
  a.read();
  PosteriorFrame f;
  f.seq = 11;
  f.timestamp_ms = 7500;
  f.probs = {0.6, 0.4};
  f.smoothed = {0.55, 0.45};
  server.on_posterior(f);
  const json p = a.read();
  CHECK(p.at("type") == "posterior");
  CHECK(p.at("seq") == 11);
  server.on_geometry(GeometryFrame{11, 8, {0, 3}});
  CHECK(a.read().at("type") == "geometry");

  Client b(server.port());
  CHECK(is_event(b.read(), "connected"));
  const json g = b.read();
  CHECK(g.at("type") == "geometry");
  CHECK(g.at("occupied") == json::array({0, 3}));
  server.on_status(StatusFrame{"stalled", "", false, "", "x"});
  CHECK(is_event(a.read(), "stalled"));
  CHECK(is_event(b.read(), "stalled"));
}

TEST_CASE("binding a port already in use is an IO error") {
  Recorder rec;
  WebSocketServer server("127.0.0.1", 0, rec.handler());
  boost::asio::io_context ioc;
  tcp::acceptor blocker(ioc);
  blocker.open(tcp::v4());
  blocker.bind(tcp::endpoint(net::ip::make_address("127.0.0.1"), 0));
  blocker.listen();
  CHECK_THROWS_AS(WebSocketServer("127.0.0.1", blocker.local_endpoint().port(), rec.handler()), IoError);
  CHECK_THROWS_AS(WebSocketServer("999.1.1.1", 0, rec.handler()), IoError);
}
