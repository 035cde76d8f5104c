#pragma once

#include "mindsculpt/classifier.hpp"
#include "mindsculpt/pipeline.hpp"
#include "mindsculpt/stream.hpp"
#include "mindsculpt/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mindsculpt {

struct SynthConfig {
  std::uint64_t seed{1};
  double snr{1.0};
  std::size_t n_channels{128};
  double fs{256.0};
  std::size_t reps{5};
  double trial_s{10.0};
  double inter_trial_s{2.0};
  bool randomize{true};
  double artifact_rate_per_min{2.0};
  double noise_slope{-1.0};
  double trial_jitter{-1.0};         // negative: calibrated default
  double disengaged_fraction{-1.0};  // negative: calibrated default
};

struct GeometryConfig {
  std::size_t grid_n{24};
  double tau{0.5};
};

struct StreamConfig {
  std::string source{"synth"};  // synth | replay
  std::string pacing{"realtime"};
  std::string udp{"127.0.0.1:9000"};
  std::string ws;  // empty: no WebSocket server
  double smoothing_alpha{0.3};
  double block_s{0.125};
  std::string save_dir{"designs"};
  std::size_t sample_queue_blocks{64};
  std::size_t sink_queue_capacity{256};
  double stall_timeout_s{2.0};
};

struct Config {
  static constexpr int kSchemaVersion = 1;

  PreprocessOptions signal{};
  FeatureOptions features{};
  std::size_t k{23};
  std::vector<int> classes{0, 1};
  SvmOptions svm{};
  std::size_t calibration_folds{5};
  SynthConfig synth{};
  GeometryConfig geometry{};
  StreamConfig stream{};

  TrainOptions train_options() const;
  SubjectProfile subject_profile() const;
  SessionProtocol protocol() const;
  PipelineOptions pipeline_options() const;
};

// Absent keys keep their defaults; unknown keys and type mismatches throw
// InvalidData naming the offending key path.
Config parse_config(const std::string& json_text);
Config load_config(const std::filesystem::path& path);
std::string config_to_json(const Config& config);

struct Endpoint {
  std::string host;
  std::uint16_t port{0};
};

// "host:port" or ":port" (host empty). Throws InvalidArgument.
Endpoint parse_endpoint(const std::string& text);

}  // namespace mindsculpt
