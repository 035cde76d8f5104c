#include "mindsculpt/wire.hpp"

#include "mindsculpt/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>

namespace mindsculpt {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "MSCP encoding assumes a little-endian host");

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_mscp(const PosteriorFrame& frame) {
  if (frame.smoothed.empty() || frame.smoothed.size() > 255) {
    throw InvalidArgument("MSCP frames carry between 1 and 255 classes");
  }
  std::vector<std::uint8_t> out;
  out.reserve(mscp_size(frame.smoothed.size()));
  out.insert(out.end(), kMscpMagic.begin(), kMscpMagic.end());
  out.push_back(kMscpVersion);
  out.push_back(static_cast<std::uint8_t>(frame.smoothed.size()));
  out.push_back(frame.paused ? 1 : 0);
  out.push_back(0);
  put(out, static_cast<std::uint32_t>(frame.seq));
  put(out, static_cast<std::uint32_t>(frame.timestamp_ms));
  for (double p : frame.smoothed) put(out, static_cast<float>(p));
  return out;
}

std::optional<MscpDatagram> decode_mscp(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMscpHeaderBytes) return std::nullopt;
  if (!std::equal(kMscpMagic.begin(), kMscpMagic.end(), bytes.begin())) return std::nullopt;
  if (bytes[4] != kMscpVersion || bytes[7] != 0) return std::nullopt;
  const std::size_t n = bytes[5];
  if (n == 0 || bytes.size() != mscp_size(n)) return std::nullopt;
  MscpDatagram d;
  d.version = bytes[4];
  d.flags = bytes[6];
  d.seq = get<std::uint32_t>(bytes, 8);
  d.timestamp_ms = get<std::uint32_t>(bytes, 12);
  d.smoothed.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.smoothed[i] = get<float>(bytes, kMscpHeaderBytes + 4 * i);
  return d;
}

// ---------------------------------------------------------------------------

std::string posterior_json(const PosteriorFrame& frame) {
  return json{{"type", "posterior"},
              {"seq", frame.seq},
              {"timestamp_ms", frame.timestamp_ms},
              {"probs", frame.probs},
              {"smoothed", frame.smoothed},
              {"paused", frame.paused}}
      .dump();
}

std::string geometry_json(const GeometryFrame& frame) {
  return json{{"type", "geometry"}, {"seq", frame.seq}, {"grid_n", frame.grid_n}, {"occupied", frame.occupied}}.dump();
}

std::string status_json(const StatusFrame& frame) {
  json j{{"type", "status"}, {"event", frame.event}};
  if (!frame.cmd.empty()) j["cmd"] = frame.cmd;
  if (frame.event == "ack") j["ok"] = frame.ok;
  if (!frame.path.empty()) j["path"] = frame.path;
  if (!frame.message.empty()) j["message"] = frame.message;
  return j.dump();
}

const char* control_name(ControlKind kind) {
  switch (kind) {
    case ControlKind::Pause: return "pause";
    case ControlKind::Resume: return "resume";
    case ControlKind::Save: return "save";
    case ControlKind::Imagine: return "imagine";
  }
  return "?";
}

ControlCommand parse_control_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidData(std::string("control message is not JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("type", "") != "control") throw InvalidData("expected a control message");
  const auto cmd_it = j.find("cmd");
  if (cmd_it == j.end() || !cmd_it->is_string()) throw InvalidData("control message lacks a cmd string");
  const std::string cmd = *cmd_it;
  ControlCommand out;
  if (cmd == "pause") {
    out.kind = ControlKind::Pause;
  } else if (cmd == "resume") {
    out.kind = ControlKind::Resume;
  } else if (cmd == "save") {
    out.kind = ControlKind::Save;
  } else if (cmd == "imagine") {
    out.kind = ControlKind::Imagine;
    const auto id = j.find("class_id");
    if (id == j.end() || !id->is_number_integer()) throw InvalidData("imagine needs an integer class_id");
    out.class_id = id->get<int>();
  } else {
    throw InvalidData("unknown control command '" + cmd + "'");
  }
  return out;
}

std::string control_json(const ControlCommand& cmd) {
  json j{{"type", "control"}, {"cmd", control_name(cmd.kind)}};
  if (cmd.kind == ControlKind::Imagine) j["class_id"] = cmd.class_id;
  return j.dump();
}

}  // namespace mindsculpt
