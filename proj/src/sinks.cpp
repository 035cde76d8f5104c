#include "mindsculpt/error.hpp"
#include "mindsculpt/stream.hpp"

#include <spdlog/spdlog.h>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace mindsculpt {

SinkWorker::SinkWorker(std::shared_ptr<FrameSink> sink, std::size_t capacity)
    : sink_(std::move(sink)), capacity_(capacity) {
  if (!sink_) throw InvalidArgument("sink worker needs a sink");
  if (capacity_ == 0) throw InvalidArgument("sink queue capacity must be positive");
  thread_ = std::thread([this] { loop(); });
}

SinkWorker::~SinkWorker() { close(); }

void SinkWorker::publish(SinkMessage message) {
  {
    std::lock_guard lock(mutex_);
    if (closing_) return;
    if (queue_.size() >= capacity_) {
      queue_.pop_front();
      ++dropped_;
    }
    queue_.push_back(std::move(message));
  }
  cv_.notify_one();
}

void SinkWorker::close() {
  {
    std::lock_guard lock(mutex_);
    closing_ = true;
  }
  cv_.notify_one();
  if (thread_.joinable()) thread_.join();
}

void SinkWorker::loop() {
  for (;;) {
    SinkMessage message;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return closing_ || !queue_.empty(); });
      if (queue_.empty()) return;
      message = std::move(queue_.front());
      queue_.pop_front();
    }
    try {
      std::visit(
          [this](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PosteriorFrame>) {
              sink_->on_posterior(m);
            } else if constexpr (std::is_same_v<T, GeometryFrame>) {
              sink_->on_geometry(m);
            } else {
              sink_->on_status(m);
            }
          },
          message);
      ++delivered_;
    } catch (const std::exception& e) {
      if (failures_++ == 0) spdlog::warn("sink '{}' failed: {}", sink_->name(), e.what());
    }
  }
}

// ---------------------------------------------------------------------------

UdpSink::UdpSink(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* found = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &found); rc != 0 || !found) {
    throw IoError("cannot resolve UDP host '" + host + "': " + ::gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, found->ai_addr, sizeof(addr));
  ::freeaddrinfo(found);
  addr.sin_port = htons(port);
  address_.resize(sizeof(addr));
  std::memcpy(address_.data(), &addr, sizeof(addr));

  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw IoError(std::string("cannot open UDP socket: ") + std::strerror(errno));
}

UdpSink::~UdpSink() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpSink::on_posterior(const PosteriorFrame& frame) {
  const auto bytes = encode_mscp(frame);
  const ssize_t n = ::sendto(fd_, bytes.data(), bytes.size(), MSG_DONTWAIT,
                             reinterpret_cast<const sockaddr*>(address_.data()), static_cast<socklen_t>(address_.size()));
  if (n != static_cast<ssize_t>(bytes.size())) throw IoError(std::string("UDP send failed: ") + std::strerror(errno));
  ++sent_;
}

// ---------------------------------------------------------------------------

void CollectingSink::on_posterior(const PosteriorFrame& frame) {
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
  std::lock_guard lock(mutex_);
  posteriors_.push_back(frame);
}

void CollectingSink::on_geometry(const GeometryFrame& frame) {
  std::lock_guard lock(mutex_);
  geometries_.push_back(frame);
}

void CollectingSink::on_status(const StatusFrame& frame) {
  std::lock_guard lock(mutex_);
  statuses_.push_back(frame);
}

std::vector<PosteriorFrame> CollectingSink::posteriors() const {
  std::lock_guard lock(mutex_);
  return posteriors_;
}

std::vector<GeometryFrame> CollectingSink::geometries() const {
  std::lock_guard lock(mutex_);
  return geometries_;
}

std::vector<StatusFrame> CollectingSink::statuses() const {
  std::lock_guard lock(mutex_);
  return statuses_;
}

}  // namespace mindsculpt
