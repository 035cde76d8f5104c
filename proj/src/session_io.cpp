#include "mindsculpt/error.hpp"
#include "mindsculpt/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mindsculpt {

using nlohmann::json;
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "raw sample files are written in native little-endian order");

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

SessionFiles write_session(const Session& session, const fs::path& dir, const std::string& stem) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  SessionFiles files{dir / (stem + ".json"), dir / (stem + ".f32")};

  const EegRecording& rec = session.recording;
  {
    std::ofstream raw(files.raw, std::ios::binary | std::ios::trunc);
    if (!raw) throw IoError("cannot write " + files.raw.string());
    std::vector<float> row(rec.n_samples());
    for (std::size_t c = 0; c < rec.n_channels(); ++c) {
      const auto src = rec.channel(c);
      for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<float>(src[i]);
      raw.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!raw) throw IoError("failed writing " + files.raw.string());
  }

  json j;
  j["fs"] = rec.fs();
  j["channel_labels"] = rec.channel_labels();
  j["data_file"] = files.raw.filename().string();
  json markers = json::array();
  for (const auto& m : session.markers) {
    markers.push_back({{"class_id", m.class_id}, {"onset_sample", m.onset_sample}, {"duration_samples", m.duration_samples}});
  }
  j["markers"] = std::move(markers);
  write_text_file(files.json, j.dump(2) + "\n");
  return files;
}

Session read_session(const fs::path& json_path) {
  const std::string text = read_text_file(json_path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidData("session file " + json_path.string() + " is not valid JSON: " + e.what());
  }
  double fs_hz = 0.0;
  std::vector<std::string> labels;
  fs::path data_file;
  std::vector<TrialMarker> markers;
  try {
    fs_hz = j.at("fs").get<double>();
    labels = j.at("channel_labels").get<std::vector<std::string>>();
    data_file = j.at("data_file").get<std::string>();
    for (const auto& m : j.at("markers")) {
      const auto onset = m.at("onset_sample").get<std::int64_t>();
      const auto duration = m.at("duration_samples").get<std::int64_t>();
      if (onset < 0 || duration < 0) throw InvalidData("negative marker fields");
      markers.push_back(TrialMarker{m.at("class_id").get<int>(), static_cast<std::size_t>(onset),
                                    static_cast<std::size_t>(duration)});
    }
  } catch (const json::exception& e) {
    throw InvalidData("malformed session file " + json_path.string() + ": " + e.what());
  }
  if (labels.empty()) throw InvalidData("session has no channels");
  if (data_file.is_relative()) data_file = json_path.parent_path() / data_file;

  std::ifstream raw(data_file, std::ios::binary);
  if (!raw) throw IoError("cannot open raw data file " + data_file.string());
  raw.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(raw.tellg());
  raw.seekg(0);
  const std::size_t per_sample = labels.size() * sizeof(float);
  if (bytes == 0 || bytes % per_sample != 0) {
    throw InvalidData("raw data size " + std::to_string(bytes) + " is not a multiple of " +
                      std::to_string(labels.size()) + " float32 channels");
  }
  const std::size_t n_samples = bytes / per_sample;
  SignalMatrix data(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(n_samples));
  std::vector<float> row(n_samples);
  for (std::size_t c = 0; c < labels.size(); ++c) {
    raw.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(n_samples * sizeof(float)));
    if (!raw) throw IoError("short read from " + data_file.string());
    for (std::size_t i = 0; i < n_samples; ++i) data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = row[i];
  }

  std::vector<Point3> positions;
  if (labels.size() <= default_layout().size() && labels == default_labels(labels.size())) {
    positions = default_positions(labels.size());
  }
  EegRecording rec(std::move(data), fs_hz, std::move(labels), std::move(positions));
  validate_markers(markers, rec.n_samples());
  return Session{std::move(rec), std::move(markers)};
}

}  // namespace mindsculpt
