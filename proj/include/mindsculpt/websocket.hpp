#pragma once

#include "mindsculpt/stream.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace mindsculpt {

// WebSocket endpoint for the operator console. Posterior, geometry and status
// frames are broadcast as JSON text; control messages from the first
// connected client are forwarded to the handler and acknowledged with a
// status frame. Later clients are read-only.
class WebSocketServer final : public FrameSink {
 public:
  using AckFn = std::function<void(const ControlAck&)>;
  using ControlHandler = std::function<void(const ControlCommand&, AckFn)>;

  // Binds immediately; port 0 picks a free port. Throws IoError when the
  // address cannot be bound.
  WebSocketServer(const std::string& address, std::uint16_t port, ControlHandler handler);
  ~WebSocketServer() override;
  WebSocketServer(const WebSocketServer&) = delete;
  WebSocketServer& operator=(const WebSocketServer&) = delete;

  std::uint16_t port() const;
  std::size_t client_count() const;
  void stop();

  std::string name() const override { return "websocket"; }
  void on_posterior(const PosteriorFrame& frame) override;
  void on_geometry(const GeometryFrame& frame) override;
  void on_status(const StatusFrame& frame) override;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

std::string ack_json(const ControlAck& ack);

}  // namespace mindsculpt
