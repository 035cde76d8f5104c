#include "mindsculpt/error.hpp"
#include "mindsculpt/stream.hpp"
#include "support/helpers.hpp"
#include "support/models.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace mindsculpt;
using testing_support::TempDir;

namespace {

const testing_support::TrainedSubject& four_class() {
  static const auto subject = testing_support::train_subject(1, {0, 1, 2, 3});
  return subject;
}

const testing_support::TrainedSubject& two_class() {
  static const auto subject = testing_support::train_subject(2, {0, 1});
  return subject;
}

PipelineOptions fast_options(const std::string& save_dir = ".") {
  PipelineOptions o = four_class().config.pipeline_options();
  o.pacing = Pacing::Fast;
  o.save_dir = save_dir;
  return o;
}

std::unique_ptr<SampleSource> replay(const EegRecording& rec, std::size_t block = 32) {
  return std::make_unique<ReplaySource>(rec, block);
}

std::unique_ptr<SampleSource> live(double duration_s, int initial_class = -1) {
  return std::make_unique<SynthLiveSource>(four_class().config.subject_profile(), 32, duration_s, initial_class);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Issues a control command when a given posterior seq arrives.
class ScriptedSink final : public FrameSink {
 public:
  struct Step {
    std::uint64_t at_seq;
    ControlCommand cmd;
  };

  ScriptedSink(StreamPipeline& pipeline, std::vector<Step> steps) : pipeline_(pipeline), steps_(std::move(steps)) {}
  std::string name() const override { return "script"; }
  void on_posterior(const PosteriorFrame& frame) override {
    for (const auto& s : steps_) {
      if (s.at_seq == frame.seq) {
        pipeline_.control_async(s.cmd, [this](const ControlAck& ack) {
          std::lock_guard lock(mutex_);
          acks_.push_back(ack);
        });
      }
    }
  }
  std::vector<ControlAck> acks() const {
    std::lock_guard lock(mutex_);
    return acks_;
  }

 private:
  StreamPipeline& pipeline_;
  std::vector<Step> steps_;
  mutable std::mutex mutex_;
  std::vector<ControlAck> acks_;
};

// Emits silence, with one long pause between blocks.
class HesitantSource final : public SampleSource {
 public:
  HesitantSource(std::size_t channels, std::size_t blocks, std::size_t pause_after, std::chrono::milliseconds pause)
      : channels_(channels), blocks_(blocks), pause_after_(pause_after), pause_(pause) {}
  double fs() const override { return 256.0; }
  std::size_t n_channels() const override { return channels_; }
  std::optional<SignalMatrix> next_block() override {
    if (emitted_ == blocks_) return std::nullopt;
    if (emitted_ == pause_after_) std::this_thread::sleep_for(pause_);
    ++emitted_;
    return SignalMatrix::Zero(static_cast<Eigen::Index>(channels_), 64);
  }
  std::string kind() const override { return "hesitant"; }

 private:
  std::size_t channels_, blocks_, pause_after_;
  std::chrono::milliseconds pause_;
  std::size_t emitted_{0};
};

}  // namespace

TEST_CASE("smoothing follows the exponential update") {
  const auto s = smooth({0.5, 0.5}, {1.0, 0.0}, 0.3);
  CHECK(s[0] == doctest::Approx(0.65));
  CHECK(s[1] == doctest::Approx(0.35));
  const auto keep = smooth({0.2, 0.8}, {0.9, 0.1}, 0.0);
  CHECK(keep[0] == doctest::Approx(0.2));
  const auto jump = smooth({0.2, 0.8}, {0.9, 0.1}, 1.0);
  CHECK(jump[0] == doctest::Approx(0.9));
  CHECK_THROWS_AS(smooth({0.5, 0.5}, {1.0}, 0.3), InvalidArgument);
  CHECK_THROWS_AS(smooth({0.5, 0.5}, {1.0, 0.0}, 1.5), InvalidArgument);
}

TEST_CASE("frame count for a window and hop") {
  CHECK(expected_frame_count(30 * 256, 512, 128) == 57);
  CHECK(expected_frame_count(511, 512, 128) == 0);
  CHECK(expected_frame_count(512, 512, 128) == 1);
  CHECK(expected_frame_count(639, 512, 128) == 1);
  CHECK(expected_frame_count(640, 512, 128) == 2);
  CHECK_THROWS_AS(expected_frame_count(100, 512, 0), InvalidArgument);
}

TEST_CASE("30 s replay yields 57 frames with continuous seq and sample-clock timestamps") {
  const auto& subj = four_class();
  const EegRecording rec = subj.session.recording.slice(0, 30 * 256);
  StreamPipeline p(subj.model, replay(rec, 37), fast_options());
  auto sink = std::make_shared<CollectingSink>();
  p.add_sink(sink);
  const SessionLog log = p.run();
  const auto frames = sink->posteriors();
  CHECK(log.frames >= 56);
  CHECK(log.frames <= 58);
  REQUIRE(frames.size() == log.frames);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(frames[i].seq == i);
    CHECK(frames[i].timestamp_ms == 2000 + 500 * i);
    CHECK(frames[i].probs.size() == 4);
    double sum = 0.0;
    for (double v : frames[i].smoothed) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(log.samples == 30 * 256);
  CHECK(log.geometry_frames >= 1);
  CHECK(!sink->geometries().empty());
  CHECK(sink->statuses().back().event == "finished");
}

TEST_CASE("replaying a training trial of class 0 ends on class 0") {
  const auto& subj = two_class();
  const TrialMarker* trial = nullptr;
  for (const auto& m : subj.session.markers) {
    if (m.class_id == 0) {
      trial = &m;
      break;
    }
  }
  REQUIRE(trial != nullptr);
  const EegRecording rec = subj.session.recording.slice(trial->onset_sample, trial->duration_samples);
  PipelineOptions o = fast_options();
  StreamPipeline p(subj.model, replay(rec), o);
  auto sink = std::make_shared<CollectingSink>();
  p.add_sink(sink);
  const SessionLog log = p.run();
  const auto frames = sink->posteriors();
  REQUIRE(!frames.empty());
  CHECK(frames.back().smoothed[0] > frames.back().smoothed[1]);
  CHECK(log.argmax_counts[0] > log.argmax_counts[1]);
}

TEST_CASE("pausing freezes the smoothed posterior while frames keep flowing") {
  TempDir dir("stream");
  std::unique_ptr<StreamPipeline> p =
      std::make_unique<StreamPipeline>(four_class().model, live(60.0, 1), fast_options(dir.str("designs")));
  auto collect = std::make_shared<CollectingSink>();
  using K = ControlKind;
  auto script = std::make_shared<ScriptedSink>(
      *p, std::vector<ScriptedSink::Step>{{20, {K::Pause, -1}}, {32, {K::Save, -1}}, {36, {K::Save, -1}},
                                          {45, {K::Resume, -1}}});
  p->add_sink(collect);
  p->add_sink(script);
  const SessionLog log = p->run();
  const auto frames = collect->posteriors();
  REQUIRE(frames.size() == log.frames);

  std::size_t first_paused = frames.size(), n_paused = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(frames[i].seq == i);
    if (frames[i].paused) {
      if (first_paused == frames.size()) first_paused = i;
      ++n_paused;
    }
  }
  CHECK(n_paused >= 10);
  REQUIRE(first_paused > 0);
  REQUIRE(first_paused < frames.size());
  const auto frozen = frames[first_paused - 1].smoothed;
  for (std::size_t i = first_paused; i < first_paused + n_paused; ++i) {
    REQUIRE(frames[i].paused);
    CHECK(frames[i].smoothed == frozen);
  }
  // Raw posteriors keep changing, and smoothing picks up again after resume.
  bool raw_moved = false;
  for (std::size_t i = first_paused + 1; i < first_paused + n_paused; ++i) raw_moved |= frames[i].probs != frames[i - 1].probs;
  CHECK(raw_moved);
  REQUIRE(first_paused + n_paused < frames.size());
  CHECK(frames[first_paused + n_paused].smoothed != frozen);

  const auto acks = script->acks();
  REQUIRE(acks.size() == 4);
  std::vector<std::string> paths;
  for (const auto& a : acks) {
    CHECK(a.ok);
    if (a.kind == K::Save) paths.push_back(a.path);
  }
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] != paths[1]);
  CHECK(std::filesystem::path(paths[0]).filename() == "design_001.obj");
  const std::string a = slurp(paths[0]);
  CHECK(!a.empty());
  CHECK(a == slurp(paths[1]));
  CHECK(log.saves == paths);
}

TEST_CASE("save before the first frame reports that no geometry exists") {
  TempDir dir("stream");
  StreamPipeline p(four_class().model, live(3.0), fast_options(dir.str("designs")));
  auto early = p.control({ControlKind::Save, -1});
  p.run();
  const ControlAck ack = early.get();
  CHECK(!ack.ok);
  CHECK(ack.message == "no geometry yet");
  CHECK(!std::filesystem::exists(dir.path() / "designs"));
}

TEST_CASE("imagine is refused by a replay source") {
  const EegRecording rec = four_class().session.recording.slice(0, 5 * 256);
  StreamPipeline p(four_class().model, replay(rec), fast_options());
  auto ack = p.control({ControlKind::Imagine, 2});
  p.run();
  const ControlAck a = ack.get();
  CHECK(!a.ok);
  CHECK(a.message.find("synth-live") != std::string::npos);
}

TEST_CASE("imagine(2) drives the live posterior to class 2") {
  StreamPipeline p(four_class().model, live(60.0), fast_options());
  auto ack = p.control({ControlKind::Imagine, 2});
  auto sink = std::make_shared<CollectingSink>();
  p.add_sink(sink);
  const SessionLog log = p.run();
  CHECK(ack.get().ok);
  std::size_t late = 0, hits = 0;
  for (const auto& f : sink->posteriors()) {
    if (f.timestamp_ms <= 20000) continue;
    ++late;
    const auto best = std::max_element(f.smoothed.begin(), f.smoothed.end()) - f.smoothed.begin();
    if (best == 2) ++hits;
  }
  REQUIRE(late > 0);
  const double share = static_cast<double>(hits) / static_cast<double>(late);
  MESSAGE("class-2 share after 20 s: " << share);
  CHECK(share >= 0.70);
  CHECK(log.max_tick_ms < 100.0);
  CHECK(log.slow_ticks == 0);
}

TEST_CASE("imagine rejects classes the synthetic subject lacks") {
  StreamPipeline p(four_class().model, live(3.0), fast_options());
  auto bad = p.control({ControlKind::Imagine, 9});
  p.run();
  CHECK(!bad.get().ok);
}

TEST_CASE("a slow sink drops frames without holding up the others") {
  const auto& subj = four_class();
  const EegRecording rec = subj.session.recording.slice(0, 30 * 256);
  PipelineOptions o = fast_options();
  o.sink_queue_capacity = 4;
  StreamPipeline p(subj.model, replay(rec), o);
  auto slow = std::make_shared<CollectingSink>(std::chrono::milliseconds(40));
  auto fast = std::make_shared<CollectingSink>();
  p.add_sink(slow);
  p.add_sink(fast);
  const auto t0 = std::chrono::steady_clock::now();
  const SessionLog log = p.run();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(fast->posteriors().size() == log.frames);
  REQUIRE(log.sinks.size() == 2);
  CHECK(log.sinks[0].dropped > 0);
  CHECK(log.sinks[1].dropped == 0);
  CHECK(slow->posteriors().size() < log.frames);
  // Blocking on the slow sink would take at least frames x 40 ms.
  CHECK(elapsed < 0.04 * static_cast<double>(log.frames));
}

TEST_CASE("a source underrun raises stalled and then recovered") {
  TrainedModel model = four_class().model;
  PipelineOptions o = fast_options();
  o.stall_timeout_s = 0.2;
  StreamPipeline p(model, std::make_unique<HesitantSource>(128, 40, 20, std::chrono::milliseconds(700)), o);
  auto sink = std::make_shared<CollectingSink>();
  p.add_sink(sink);
  const SessionLog log = p.run();
  CHECK(log.stalls == 1);
  std::vector<std::string> events;
  for (const auto& s : sink->statuses()) events.push_back(s.event);
  REQUIRE(events.size() == 3);
  CHECK(events[0] == "stalled");
  CHECK(events[1] == "recovered");
  CHECK(events[2] == "finished");
  CHECK(log.frames == expected_frame_count(40 * 64, 512, 128));
}

TEST_CASE("pipeline construction checks the model against the source") {
  const auto& subj = four_class();
  CHECK_THROWS_AS(StreamPipeline(subj.model, std::make_unique<HesitantSource>(64, 1, 9, std::chrono::milliseconds(0)),
                                 fast_options()),
                  InvalidData);
  PipelineOptions bad_tau = fast_options();
  bad_tau.tau = 1.0;
  CHECK_THROWS_AS(StreamPipeline(subj.model, live(1.0), bad_tau), InvalidArgument);
  CHECK_THROWS_AS(StreamPipeline(subj.model, nullptr, fast_options()), InvalidArgument);
}

TEST_CASE("session log serializes to JSON") {
  SessionLog log;
  log.frames = 3;
  log.argmax_counts = {1, 2};
  log.sinks.push_back({"udp", 3, 0, 0});
  const std::string s = session_log_json(log);
  CHECK(s.find("\"frames\"") != std::string::npos);
  CHECK(s.find("\"udp\"") != std::string::npos);
}
