#pragma once

#include "mindsculpt/features.hpp"
#include "mindsculpt/signal.hpp"
#include "mindsculpt/synth.hpp"

#include <filesystem>
#include <string>

namespace mindsculpt {

// Session pair: <stem>.json describing fs, labels, markers and the raw file,
// plus <stem>.f32 holding little-endian float32 samples, channel-major.
struct SessionFiles {
  std::filesystem::path json;
  std::filesystem::path raw;
};

SessionFiles write_session(const Session& session, const std::filesystem::path& dir, const std::string& stem);
Session read_session(const std::filesystem::path& json_path);

// Feature cache: one JSON header line, a newline, then rows x cols float32 LE, row-major.
void write_feature_matrix(const FeatureMatrix& fm, const std::filesystem::path& path);
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mindsculpt
