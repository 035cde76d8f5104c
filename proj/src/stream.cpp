#include "mindsculpt/stream.hpp"

#include "mindsculpt/error.hpp"
#include "mindsculpt/features.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

namespace mindsculpt {

std::vector<double> smooth(const std::vector<double>& prev, const std::vector<double>& next, double alpha) {
  if (prev.size() != next.size()) throw InvalidArgument("smoothing needs vectors of equal length");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("smoothing alpha must lie in [0, 1]");
  std::vector<double> out(next.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = alpha * next[i] + (1.0 - alpha) * prev[i];
    sum += out[i];
  }
  if (sum > 0.0) {
    for (double& v : out) v /= sum;
  }
  return out;
}

std::size_t expected_frame_count(std::size_t n_samples, std::size_t window_samples, std::size_t step_samples) {
  if (step_samples == 0) throw InvalidArgument("step must be positive");
  if (n_samples < window_samples) return 0;
  return (n_samples - window_samples) / step_samples + 1;
}

std::string session_log_json(const SessionLog& log) {
  nlohmann::json sinks = nlohmann::json::array();
  for (const auto& s : log.sinks) {
    sinks.push_back({{"name", s.name}, {"delivered", s.delivered}, {"dropped", s.dropped}, {"failures", s.failures}});
  }
  return nlohmann::json{{"samples", log.samples},
                        {"frames", log.frames},
                        {"geometry_frames", log.geometry_frames},
                        {"dropped_sample_blocks", log.dropped_sample_blocks},
                        {"stalls", log.stalls},
                        {"slow_ticks", log.slow_ticks},
                        {"max_tick_ms", log.max_tick_ms},
                        {"mean_tick_ms", log.mean_tick_ms},
                        {"saves", log.saves},
                        {"sinks", sinks},
                        {"argmax_counts", log.argmax_counts}}
      .dump(2);
}

// ---------------------------------------------------------------------------

StreamPipeline::StreamPipeline(TrainedModel model, std::unique_ptr<SampleSource> source, PipelineOptions options)
    : model_(std::move(model)), source_(std::move(source)), options_(std::move(options)) {
  if (!source_) throw InvalidArgument("pipeline needs a source");
  const std::size_t n_ch = source_->n_channels();
  const std::size_t width = n_ch * options_.bands.size();
  if (model_.n_features_total != width) {
    throw InvalidData("model expects " + std::to_string(model_.n_features_total) + " features but the source gives " +
                      std::to_string(width) + " (" + std::to_string(n_ch) + " channels)");
  }
  if (!model_.bad_channels.empty() && model_.bad_channels.size() != n_ch) {
    throw InvalidData("model bad-channel mask does not match the source channel count");
  }
  for (const auto& b : options_.bands) validate_band(b, source_->fs());
  if (!(options_.tau >= 0.0 && options_.tau < 1.0)) throw InvalidArgument("tau must lie in [0, 1)");
  window_ = window_samples(options_.window, source_->fs());
  step_ = step_samples(options_.window, source_->fs());
  filter_ = std::make_unique<CausalBandpass>(n_ch, source_->fs(), options_.bandpass_low_hz, options_.bandpass_high_hz);
  ring_ = SignalMatrix::Zero(static_cast<Eigen::Index>(n_ch), static_cast<Eigen::Index>(window_));
  for (std::size_t s = 0; s < kNumBaseShapes; ++s) {
    bases_.push_back(rasterize(static_cast<BaseShape>(s), options_.grid_n));
  }
  log_.argmax_counts.assign(model_.n_classes(), 0);
}

StreamPipeline::~StreamPipeline() { request_stop(); }

void StreamPipeline::add_sink(std::shared_ptr<FrameSink> sink) {
  workers_.push_back(std::make_unique<SinkWorker>(std::move(sink), options_.sink_queue_capacity));
}

std::future<ControlAck> StreamPipeline::control(ControlCommand cmd) {
  auto promise = std::make_shared<std::promise<ControlAck>>();
  auto future = promise->get_future();
  control_async(cmd, [promise](const ControlAck& ack) { promise->set_value(ack); });
  return future;
}

void StreamPipeline::control_async(ControlCommand cmd, AckCallback done) {
  std::lock_guard lock(control_mutex_);
  controls_.push_back(Pending{cmd, std::move(done)});
}

void StreamPipeline::request_stop() {
  stop_.store(true);
  sample_cv_.notify_all();
}

void StreamPipeline::produce() {
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t emitted = 0;
  const double fs = source_->fs();
  while (!stop_.load()) {
    std::optional<SignalMatrix> block;
    try {
      block = source_->next_block();
    } catch (const std::exception& e) {
      spdlog::error("source failed: {}", e.what());
      block.reset();
    }
    if (block && options_.pacing == Pacing::Realtime) {
      emitted += static_cast<std::uint64_t>(block->cols());
      const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(static_cast<double>(emitted) / fs));
      std::this_thread::sleep_until(due);
    }
    std::unique_lock lock(sample_mutex_);
    if (options_.pacing == Pacing::Fast || !block) {
      sample_cv_.wait(lock, [&] { return stop_.load() || samples_.size() < options_.sample_queue_blocks; });
      if (stop_.load()) return;
    } else if (samples_.size() >= options_.sample_queue_blocks) {
      ++dropped_blocks_;
      continue;
    }
    const bool end = !block;
    samples_.push_back(Block{std::move(block)});
    lock.unlock();
    sample_cv_.notify_all();
    if (end) return;
  }
}

void StreamPipeline::broadcast(const SinkMessage& message) {
  for (auto& w : workers_) w->publish(message);
}

ControlAck StreamPipeline::apply(const ControlCommand& cmd) {
  ControlAck ack;
  ack.kind = cmd.kind;
  switch (cmd.kind) {
    case ControlKind::Pause:
      paused_ = true;
      break;
    case ControlKind::Resume:
      paused_ = false;
      break;
    case ControlKind::Save: {
      if (!geometry_) {
        ack.ok = false;
        ack.message = "no geometry yet";
        break;
      }
      char name[32];
      std::snprintf(name, sizeof(name), "design_%03zu.obj", ++save_counter_);
      const auto path = std::filesystem::path(options_.save_dir) / name;
      try {
        std::filesystem::create_directories(options_.save_dir);
        export_mesh(*geometry_, path);
        ack.path = path.string();
        log_.saves.push_back(ack.path);
      } catch (const std::exception& e) {
        ack.ok = false;
        ack.message = e.what();
      }
      break;
    }
    case ControlKind::Imagine:
      try {
        source_->set_active_class(cmd.class_id);
      } catch (const InvalidArgument& e) {
        ack.ok = false;
        ack.message = e.what();
      }
      break;
  }
  return ack;
}

void StreamPipeline::drain_controls() {
  std::vector<Pending> pending;
  {
    std::lock_guard lock(control_mutex_);
    pending.swap(controls_);
  }
  for (auto& p : pending) {
    const ControlAck ack = apply(p.cmd);
    if (p.done) p.done(ack);
  }
}

void StreamPipeline::consume(SignalMatrix& block) {
  if (static_cast<std::size_t>(block.rows()) != source_->n_channels()) {
    throw InvalidData("source block has the wrong channel count");
  }
  for (std::size_t c = 0; c < model_.bad_channels.size(); ++c) {
    if (model_.bad_channels[c]) block.row(static_cast<Eigen::Index>(c)).setZero();
  }
  filter_->process(block);
  const auto n = static_cast<std::size_t>(block.cols());
  std::size_t i = 0;
  while (i < n) {
    // Copy up to the next tick boundary or the end of the ring, whichever is first.
    const std::uint64_t next_tick =
        total_samples_ < window_ ? window_ : total_samples_ + step_ - (total_samples_ - window_) % step_;
    const std::size_t until_tick = std::min<std::size_t>(n - i, static_cast<std::size_t>(next_tick - total_samples_));
    const std::size_t chunk = std::min(until_tick, window_ - ring_pos_);
    ring_.middleCols(static_cast<Eigen::Index>(ring_pos_), static_cast<Eigen::Index>(chunk)) =
        block.middleCols(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(chunk));
    ring_pos_ = (ring_pos_ + chunk) % window_;
    total_samples_ += chunk;
    i += chunk;
    if (total_samples_ >= window_ && (total_samples_ - window_) % step_ == 0) tick();
  }
  log_.samples = total_samples_;
}

void StreamPipeline::tick() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto w = static_cast<Eigen::Index>(window_);
  const auto head = static_cast<Eigen::Index>(ring_pos_);
  SignalMatrix window(ring_.rows(), w);
  window.leftCols(w - head) = ring_.rightCols(w - head);
  window.rightCols(head) = ring_.leftCols(head);

  const Eigen::VectorXd row = feature_row(window, source_->fs(), options_.bands);
  const Eigen::VectorXd posterior = predict_posterior(model_, row);
  std::vector<double> probs(posterior.data(), posterior.data() + posterior.size());

  bool geometry_changed = false;
  if (!paused_ || smoothed_.empty()) {
    smoothed_ = smoothed_.empty() ? probs : smooth(smoothed_, probs, options_.smoothing_alpha);
    std::vector<double> weights(kNumBaseShapes, 0.0);
    for (std::size_t i = 0; i < model_.classes.size(); ++i) {
      const int id = model_.classes[i];
      if (id >= 0 && static_cast<std::size_t>(id) < kNumBaseShapes) weights[static_cast<std::size_t>(id)] = smoothed_[i];
    }
    VoxelGrid grid = blend_rasters(bases_, weights, options_.tau);
    auto occupied = grid.occupied_indices();
    geometry_changed = !geometry_ || occupied != last_occupied_;
    geometry_ = std::move(grid);
    if (geometry_changed) last_occupied_ = std::move(occupied);
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  PosteriorFrame frame;
  frame.seq = seq_++;
  frame.timestamp_ms = static_cast<std::uint64_t>(std::llround(1000.0 * static_cast<double>(total_samples_) / source_->fs()));
  frame.probs = std::move(probs);
  frame.smoothed = smoothed_;
  frame.paused = paused_;
  const auto best = std::max_element(frame.smoothed.begin(), frame.smoothed.end()) - frame.smoothed.begin();
  ++log_.argmax_counts[static_cast<std::size_t>(best)];
  broadcast(frame);
  if (geometry_changed) {
    broadcast(GeometryFrame{frame.seq, options_.grid_n, last_occupied_});
    ++log_.geometry_frames;
  }

  ++log_.frames;
  tick_ms_sum_ += ms;
  log_.max_tick_ms = std::max(log_.max_tick_ms, ms);
  if (ms >= 100.0) ++log_.slow_ticks;
}

SessionLog StreamPipeline::run() {
  if (options_.pacing == Pacing::Realtime) spdlog::info("streaming from {} at real-time pacing", source_->kind());
  std::thread producer([this] { produce(); });
  const auto stall_after = std::chrono::duration<double>(options_.stall_timeout_s);
  auto last_block = std::chrono::steady_clock::now();
  bool stalled = false;
  try {
    while (!stop_.load()) {
      std::optional<Block> next;
      {
        std::unique_lock lock(sample_mutex_);
        sample_cv_.wait_for(lock, std::chrono::milliseconds(50), [&] { return stop_.load() || !samples_.empty(); });
        if (!samples_.empty()) {
          next = std::move(samples_.front());
          samples_.pop_front();
        }
      }
      sample_cv_.notify_all();
      drain_controls();
      if (!next) {
        if (!stalled && std::chrono::steady_clock::now() - last_block > stall_after) {
          stalled = true;
          ++log_.stalls;
          spdlog::warn("source underrun longer than {} s", options_.stall_timeout_s);
          broadcast(StatusFrame{"stalled", "", false, "", "no samples for over " + std::to_string(options_.stall_timeout_s) + " s"});
        }
        continue;
      }
      if (!next->data) break;
      last_block = std::chrono::steady_clock::now();
      if (stalled) {
        stalled = false;
        broadcast(StatusFrame{"recovered", "", true, "", ""});
      }
      consume(*next->data);
    }
  } catch (...) {
    request_stop();
    producer.join();
    for (auto& w : workers_) w->close();
    throw;
  }
  request_stop();
  producer.join();
  drain_controls();
  {
    // Anything submitted after the final drain is refused.
    std::lock_guard lock(control_mutex_);
    for (auto& p : controls_) {
      if (p.done) p.done(ControlAck{p.cmd.kind, false, "", "pipeline stopped"});
    }
    controls_.clear();
  }
  broadcast(StatusFrame{"finished", "", true, "", std::to_string(log_.frames) + " frames"});
  for (auto& w : workers_) w->close();

  log_.dropped_sample_blocks = dropped_blocks_.load();
  log_.mean_tick_ms = log_.frames > 0 ? tick_ms_sum_ / static_cast<double>(log_.frames) : 0.0;
  log_.sinks.clear();
  for (const auto& w : workers_) log_.sinks.push_back(SinkReport{w->name(), w->delivered(), w->dropped(), w->failures()});
  return log_;
}

}  // namespace mindsculpt
