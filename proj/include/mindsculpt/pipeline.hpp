#pragma once

#include "mindsculpt/classifier.hpp"
#include "mindsculpt/features.hpp"
#include "mindsculpt/signal.hpp"
#include "mindsculpt/synth.hpp"

#include <array>
#include <vector>

namespace mindsculpt {

// Offline preprocessing and feature extraction shared by train and validate.
struct PreprocessOptions {
  double bandpass_low_hz{1.0};
  double bandpass_high_hz{40.0};
  double asr_sd_threshold{15.0};
  double asr_window_s{0.5};
  double asr_calibration_s{30.0};  // leading segment used to calibrate ASR
  bool asr_enabled{true};
  double amplitude_guard_uv{500.0};
};

struct PreprocessResult {
  EegRecording cleaned;
  std::vector<bool> bad_channels;
  AsrStats asr_stats;
};

// Bandpass, flag and zero bad channels, then ASR-clean the good ones.
PreprocessResult preprocess(const EegRecording& raw, const PreprocessOptions& options);

struct FeatureOptions {
  WindowSpec window{};
  std::array<BandDefinition, 3> bands = default_bands();
};

struct SessionFeatures {
  FeatureMatrix features;
  std::vector<bool> bad_channels;
  AsrStats asr_stats;
};

SessionFeatures session_features(const Session& session, const PreprocessOptions& pre, const FeatureOptions& feat);

}  // namespace mindsculpt
