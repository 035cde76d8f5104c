#pragma once

#include "mindsculpt/classifier.hpp"
#include "mindsculpt/geometry.hpp"
#include "mindsculpt/signal.hpp"
#include "mindsculpt/synth.hpp"
#include "mindsculpt/wire.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace mindsculpt {

// alpha * next + (1 - alpha) * prev, renormalized.
std::vector<double> smooth(const std::vector<double>& prev, const std::vector<double>& next, double alpha = 0.3);

// Posterior frames produced by n_samples with the given window and hop.
std::size_t expected_frame_count(std::size_t n_samples, std::size_t window_samples, std::size_t step_samples);

// ---------------------------------------------------------------------------
// Sources

enum class Pacing { Realtime, Fast };

class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual double fs() const = 0;
  virtual std::size_t n_channels() const = 0;
  // Next channels x samples block, or nothing once the stream has ended.
  virtual std::optional<SignalMatrix> next_block() = 0;
  virtual bool supports_imagine() const { return false; }
  // Thread-safe; takes effect at the next block. Throws InvalidArgument when
  // the source cannot switch classes.
  virtual void set_active_class(int class_id);
  virtual std::string kind() const = 0;
};

// Endless (or duration-limited) synthetic subject. Background noise is made
// in 30 s segments; the active class's signature is added on top.
class SynthLiveSource final : public SampleSource {
 public:
  SynthLiveSource(SubjectProfile profile, std::size_t block_samples, double duration_s = 0.0, int initial_class = -1);

  double fs() const override { return profile_.fs; }
  std::size_t n_channels() const override { return profile_.n_channels; }
  std::optional<SignalMatrix> next_block() override;
  bool supports_imagine() const override { return true; }
  void set_active_class(int class_id) override;
  std::string kind() const override { return "synth-live"; }
  int active_class() const { return active_.load(); }

  static constexpr double kSegmentS = 30.0;

 private:
  void make_segment();

  SubjectProfile profile_;
  std::size_t block_samples_;
  std::size_t limit_samples_;  // 0 = unlimited
  std::size_t emitted_{0};
  std::atomic<int> active_;
  std::size_t segment_index_{0};
  std::size_t segment_pos_{0};
  SignalMatrix segment_;
  std::map<int, std::vector<std::pair<std::size_t, std::vector<double>>>> deltas_;
};

// Plays back a recording block by block.
class ReplaySource final : public SampleSource {
 public:
  ReplaySource(EegRecording recording, std::size_t block_samples);

  double fs() const override { return recording_.fs(); }
  std::size_t n_channels() const override { return recording_.n_channels(); }
  std::optional<SignalMatrix> next_block() override;
  std::string kind() const override { return "file-replay"; }

 private:
  EegRecording recording_;
  std::size_t block_samples_;
  std::size_t pos_{0};
};

// ---------------------------------------------------------------------------
// Sinks

class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual std::string name() const = 0;
  virtual void on_posterior(const PosteriorFrame& frame) = 0;
  virtual void on_geometry(const GeometryFrame&) {}
  virtual void on_status(const StatusFrame&) {}
};

using SinkMessage = std::variant<PosteriorFrame, GeometryFrame, StatusFrame>;

// Feeds one sink from its own thread through a bounded queue. When full, the
// oldest message is discarded, so a slow sink never blocks the producer.
class SinkWorker {
 public:
  SinkWorker(std::shared_ptr<FrameSink> sink, std::size_t capacity);
  ~SinkWorker();
  SinkWorker(const SinkWorker&) = delete;
  SinkWorker& operator=(const SinkWorker&) = delete;

  void publish(SinkMessage message);
  // Delivers what is queued, then joins the thread.
  void close();

  std::string name() const { return sink_->name(); }
  std::uint64_t dropped() const { return dropped_.load(); }
  std::uint64_t delivered() const { return delivered_.load(); }
  std::uint64_t failures() const { return failures_.load(); }

 private:
  void loop();

  std::shared_ptr<FrameSink> sink_;
  std::size_t capacity_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<SinkMessage> queue_;
  bool closing_{false};
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> delivered_{0};
  std::atomic<std::uint64_t> failures_{0};
  std::thread thread_;
};

// Sends each posterior frame as one MSCP datagram.
class UdpSink final : public FrameSink {
 public:
  UdpSink(const std::string& host, std::uint16_t port);
  ~UdpSink() override;
  UdpSink(const UdpSink&) = delete;
  UdpSink& operator=(const UdpSink&) = delete;

  std::string name() const override { return "udp"; }
  void on_posterior(const PosteriorFrame& frame) override;
  std::uint64_t sent() const { return sent_.load(); }

 private:
  int fd_{-1};
  std::vector<std::uint8_t> address_;  // sockaddr_in bytes
  std::atomic<std::uint64_t> sent_{0};
};

// Records everything it receives; optional per-message delay simulates a
// stalled consumer.
class CollectingSink final : public FrameSink {
 public:
  explicit CollectingSink(std::chrono::milliseconds delay = std::chrono::milliseconds(0)) : delay_(delay) {}

  std::string name() const override { return "collect"; }
  void on_posterior(const PosteriorFrame& frame) override;
  void on_geometry(const GeometryFrame& frame) override;
  void on_status(const StatusFrame& frame) override;

  std::vector<PosteriorFrame> posteriors() const;
  std::vector<GeometryFrame> geometries() const;
  std::vector<StatusFrame> statuses() const;

 private:
  std::chrono::milliseconds delay_;
  mutable std::mutex mutex_;
  std::vector<PosteriorFrame> posteriors_;
  std::vector<GeometryFrame> geometries_;
  std::vector<StatusFrame> statuses_;
};

// ---------------------------------------------------------------------------
// Pipeline

struct ControlAck {
  ControlKind kind{ControlKind::Pause};
  bool ok{true};
  std::string path;
  std::string message;
};

struct PipelineOptions {
  double bandpass_low_hz{1.0};
  double bandpass_high_hz{40.0};
  WindowSpec window{};  // window_s = ring length, step_s = tick
  std::array<BandDefinition, 3> bands = default_bands();
  double smoothing_alpha{0.3};
  std::size_t grid_n{24};
  double tau{0.5};
  Pacing pacing{Pacing::Fast};
  std::string save_dir{"."};
  std::size_t sample_queue_blocks{64};
  std::size_t sink_queue_capacity{256};
  double stall_timeout_s{2.0};
};

struct SinkReport {
  std::string name;
  std::uint64_t delivered{0};
  std::uint64_t dropped{0};
  std::uint64_t failures{0};
};

struct SessionLog {
  std::uint64_t samples{0};
  std::uint64_t frames{0};
  std::uint64_t geometry_frames{0};
  std::uint64_t dropped_sample_blocks{0};
  std::uint64_t stalls{0};
  std::uint64_t slow_ticks{0};  // ticks of 100 ms or more
  double max_tick_ms{0.0};
  double mean_tick_ms{0.0};
  std::vector<std::string> saves;
  std::vector<SinkReport> sinks;
  std::vector<int> argmax_counts;  // per model class, from smoothed vectors
};

std::string session_log_json(const SessionLog& log);

// Source producer -> bounded sample queue -> pipeline thread -> sink workers.
// The pipeline thread owns the filter, ring buffer, model and smoothing state.
class StreamPipeline {
 public:
  using AckCallback = std::function<void(const ControlAck&)>;

  StreamPipeline(TrainedModel model, std::unique_ptr<SampleSource> source, PipelineOptions options);
  ~StreamPipeline();
  StreamPipeline(const StreamPipeline&) = delete;
  StreamPipeline& operator=(const StreamPipeline&) = delete;

  void add_sink(std::shared_ptr<FrameSink> sink);

  // Queued for the pipeline thread, which applies it before the next block.
  std::future<ControlAck> control(ControlCommand cmd);
  void control_async(ControlCommand cmd, AckCallback done);

  void request_stop();
  // Runs until the source ends or stop is requested.
  SessionLog run();

  const TrainedModel& model() const { return model_; }

 private:
  struct Pending {
    ControlCommand cmd;
    AckCallback done;
  };
  struct Block {
    std::optional<SignalMatrix> data;  // nothing marks end of stream
  };

  void produce();
  void drain_controls();
  ControlAck apply(const ControlCommand& cmd);
  void consume(SignalMatrix& block);
  void tick();
  void broadcast(const SinkMessage& message);

  TrainedModel model_;
  std::unique_ptr<SampleSource> source_;
  PipelineOptions options_;
  std::vector<std::unique_ptr<SinkWorker>> workers_;
  std::atomic<bool> stop_{false};

  // Sample queue between producer and pipeline.
  std::mutex sample_mutex_;
  std::condition_variable sample_cv_;
  std::deque<Block> samples_;
  std::atomic<std::uint64_t> dropped_blocks_{0};

  std::mutex control_mutex_;
  std::vector<Pending> controls_;

  // Pipeline-thread state.
  std::unique_ptr<CausalBandpass> filter_;
  SignalMatrix ring_;
  std::size_t ring_pos_{0};
  std::size_t window_{0};
  std::size_t step_{0};
  std::uint64_t total_samples_{0};
  std::uint64_t seq_{0};
  bool paused_{false};
  std::vector<double> smoothed_;
  std::optional<VoxelGrid> geometry_;
  std::vector<std::size_t> last_occupied_;
  std::vector<VoxelGrid> bases_;  // base rasterizations at grid_n
  std::size_t save_counter_{0};
  SessionLog log_;
  double tick_ms_sum_{0.0};
};

}  // namespace mindsculpt
