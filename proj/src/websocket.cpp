#include "mindsculpt/websocket.hpp"

#include "mindsculpt/error.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <deque>
#include <map>
#include <thread>

namespace mindsculpt {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {
constexpr std::size_t kOutboxLimit = 256;
}

std::string ack_json(const ControlAck& ack) {
  return status_json(StatusFrame{"ack", control_name(ack.kind), ack.ok, ack.path, ack.message});
}

struct WebSocketServer::Impl : std::enable_shared_from_this<WebSocketServer::Impl> {
  struct Session : std::enable_shared_from_this<Session> {
    Session(tcp::socket socket, std::weak_ptr<Impl> owner, std::uint64_t id)
        : ws(std::move(socket)), owner(std::move(owner)), id(id) {}

    websocket::stream<tcp::socket> ws;
    std::weak_ptr<Impl> owner;
    std::uint64_t id;
    beast::flat_buffer buffer;
    std::deque<std::string> outbox;
    bool closed{false};

    void start() {
      ws.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) return;
        if (auto o = self->owner.lock()) o->opened(self);
        self->read();
      });
    }

    void read() {
      ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        auto o = self->owner.lock();
        if (ec) {
          if (o) o->closed(self);
          return;
        }
        std::string text = beast::buffers_to_string(self->buffer.data());
        self->buffer.consume(self->buffer.size());
        if (o) o->message(self, text);
        self->read();
      });
    }

    // Runs on the io thread.
    void send(std::string text) {
      if (closed) return;
      if (outbox.size() >= kOutboxLimit) outbox.erase(outbox.begin() + 1);  // front is in flight
      outbox.push_back(std::move(text));
      if (outbox.size() == 1) write();
    }

    void write() {
      ws.text(true);
      ws.async_write(net::buffer(outbox.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
          if (auto o = self->owner.lock()) o->closed(self);
          return;
        }
        self->outbox.pop_front();
        if (!self->outbox.empty()) self->write();
      });
    }
  };

  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  ControlHandler handler;
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions;  // io thread only
  std::string last_geometry;                                   // io thread only
  std::uint64_t next_id{0};
  std::atomic<std::size_t> clients{0};
  std::thread thread;
  std::uint16_t bound_port{0};

  void accept() {
    acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::make_shared<Session>(std::move(socket), self, self->next_id++)->start();
      self->accept();
    });
  }

  bool is_controller(const Session& s) const { return !sessions.empty() && sessions.begin()->first == s.id; }

  void opened(const std::shared_ptr<Session>& s) {
    sessions[s->id] = s;
    clients = sessions.size();
    s->send(status_json(StatusFrame{"connected", "", true, "", is_controller(*s) ? "controller" : "read-only"}));
    if (!last_geometry.empty()) s->send(last_geometry);
  }

  void closed(const std::shared_ptr<Session>& s) {
    s->closed = true;
    sessions.erase(s->id);
    clients = sessions.size();
  }

  void message(const std::shared_ptr<Session>& s, const std::string& text) {
    ControlCommand cmd;
    try {
      cmd = parse_control_json(text);
    } catch (const InvalidData& e) {
      s->send(status_json(StatusFrame{"error", "", false, "", e.what()}));
      return;
    }
    if (!is_controller(*s)) {
      s->send(ack_json(ControlAck{cmd.kind, false, "", "read-only client"}));
      return;
    }
    std::weak_ptr<Session> weak = s;
    std::weak_ptr<Impl> self = shared_from_this();
    handler(cmd, [weak, self](const ControlAck& ack) {
      auto impl = self.lock();
      if (!impl) return;
      net::post(impl->ioc, [weak, text = ack_json(ack)]() mutable {
        if (auto session = weak.lock()) session->send(std::move(text));
      });
    });
  }

  void broadcast(std::string text, bool geometry) {
    net::post(ioc, [self = shared_from_this(), text = std::move(text), geometry]() {
      if (geometry) self->last_geometry = text;
      for (auto& [id, s] : self->sessions) s->send(text);
    });
  }
};

WebSocketServer::WebSocketServer(const std::string& address, std::uint16_t port, ControlHandler handler)
    : impl_(std::make_shared<Impl>()) {
  impl_->handler = std::move(handler);
  try {
    const auto ip = address.empty() ? net::ip::address_v4::any() : net::ip::make_address(address);
    const tcp::endpoint endpoint(ip, port);
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen();
    impl_->bound_port = impl_->acceptor.local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    throw IoError("cannot listen for WebSocket clients on " + (address.empty() ? std::string("*") : address) + ":" +
                  std::to_string(port) + ": " + e.code().message());
  }
  impl_->accept();
  impl_->thread = std::thread([impl = impl_] { impl->ioc.run(); });
}

WebSocketServer::~WebSocketServer() { stop(); }

void WebSocketServer::stop() {
  if (!impl_->thread.joinable()) return;
  net::post(impl_->ioc, [impl = impl_] {
    beast::error_code ec;
    impl->acceptor.close(ec);
    for (auto& [id, s] : impl->sessions) {
      s->closed = true;
      s->ws.next_layer().close(ec);
    }
    impl->sessions.clear();
    impl->clients = 0;
  });
  net::post(impl_->ioc, [impl = impl_] { impl->ioc.stop(); });
  impl_->thread.join();
  // Let aborted handlers run so they release their references.
  impl_->ioc.restart();
  impl_->ioc.poll();
}

std::uint16_t WebSocketServer::port() const { return impl_->bound_port; }

std::size_t WebSocketServer::client_count() const { return impl_->clients.load(); }

void WebSocketServer::on_posterior(const PosteriorFrame& frame) { impl_->broadcast(posterior_json(frame), false); }

void WebSocketServer::on_geometry(const GeometryFrame& frame) { impl_->broadcast(geometry_json(frame), true); }

void WebSocketServer::on_status(const StatusFrame& frame) { impl_->broadcast(status_json(frame), false); }

}  // namespace mindsculpt
