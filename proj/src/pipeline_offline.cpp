#include "mindsculpt/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace mindsculpt {

PreprocessResult preprocess(const EegRecording& raw, const PreprocessOptions& options) {
  const EegRecording filtered = bandpass_filter(raw, options.bandpass_low_hz, options.bandpass_high_hz);
  std::vector<bool> bad = detect_bad_channels(filtered);

  std::vector<std::size_t> good;
  for (std::size_t c = 0; c < bad.size(); ++c) {
    if (!bad[c]) good.push_back(c);
  }
  if (good.size() < bad.size()) spdlog::info("{} bad channel(s) zeroed", bad.size() - good.size());

  SignalMatrix out = SignalMatrix::Zero(filtered.data().rows(), filtered.data().cols());
  AsrStats stats;
  if (!good.empty()) {
    EegRecording usable = filtered.select_channels(good);
    const auto cal_samples = std::min(usable.n_samples(),
                                      static_cast<std::size_t>(std::lround(options.asr_calibration_s * usable.fs())));
    if (options.asr_enabled && static_cast<double>(cal_samples) >= 10.0 * usable.fs()) {
      const AsrCalibration cal =
          asr_calibrate(usable.slice(0, cal_samples), options.asr_sd_threshold, options.asr_window_s);
      usable = asr_clean(usable, cal, &stats);
    } else if (options.asr_enabled) {
      spdlog::warn("recording shorter than 10 s; ASR skipped");
    }
    for (std::size_t i = 0; i < good.size(); ++i) {
      out.row(static_cast<Eigen::Index>(good[i])) = usable.data().row(static_cast<Eigen::Index>(i));
    }
  }
  return PreprocessResult{filtered.with_data(std::move(out)), std::move(bad), stats};
}

SessionFeatures session_features(const Session& session, const PreprocessOptions& pre, const FeatureOptions& feat) {
  PreprocessResult cleaned = preprocess(session.recording, pre);
  const auto epochs = extract_epochs(cleaned.cleaned, session.markers);
  FeatureBuildOptions build;
  build.n_channels_hint = session.recording.n_channels();
  build.amplitude_guard_uv = pre.amplitude_guard_uv;
  SessionFeatures out;
  out.features = build_feature_matrix(epochs, feat.window, feat.bands, build);
  out.bad_channels = std::move(cleaned.bad_channels);
  out.asr_stats = cleaned.asr_stats;
  return out;
}

}  // namespace mindsculpt
