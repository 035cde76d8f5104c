#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mindsculpt {

struct PosteriorFrame {
  std::uint64_t seq{0};
  std::uint64_t timestamp_ms{0};  // stream time of the window's last sample
  std::vector<double> probs;
  std::vector<double> smoothed;
  bool paused{false};
};

struct GeometryFrame {
  std::uint64_t seq{0};  // posterior frame that produced this occupancy
  std::size_t grid_n{0};
  std::vector<std::size_t> occupied;
};

struct StatusFrame {
  std::string event;  // "connected", "ack", "stalled", "recovered", "finished", ...
  std::string cmd;    // for acks
  bool ok{true};
  std::string path;   // saved mesh, for save acks
  std::string message;
};

// ---------------------------------------------------------------------------
// MSCP datagram, little-endian:
//   0  "MSCP"            4 bytes
//   4  version u8 = 1
//   5  n_classes u8
//   6  flags u8          bit0 = paused
//   7  pad u8 = 0
//   8  seq u32           low 32 bits of the frame counter
//  12  timestamp_ms u32  milliseconds since stream start, wrapping
//  16  n_classes x float32 smoothed probabilities

inline constexpr std::array<std::uint8_t, 4> kMscpMagic{0x4D, 0x53, 0x43, 0x50};
inline constexpr std::uint8_t kMscpVersion = 1;
inline constexpr std::size_t kMscpHeaderBytes = 16;

constexpr std::size_t mscp_size(std::size_t n_classes) { return kMscpHeaderBytes + 4 * n_classes; }

std::vector<std::uint8_t> encode_mscp(const PosteriorFrame& frame);

struct MscpDatagram {
  std::uint8_t version{0};
  std::uint8_t flags{0};
  std::uint32_t seq{0};
  std::uint32_t timestamp_ms{0};
  std::vector<float> smoothed;

  bool paused() const { return (flags & 1u) != 0; }
};

// Returns nothing for a datagram that is truncated, oversized, or has a bad
// magic, version or pad byte.
std::optional<MscpDatagram> decode_mscp(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// WebSocket JSON text frames.

std::string posterior_json(const PosteriorFrame& frame);
std::string geometry_json(const GeometryFrame& frame);
std::string status_json(const StatusFrame& frame);

enum class ControlKind { Pause, Resume, Save, Imagine };

struct ControlCommand {
  ControlKind kind{ControlKind::Pause};
  int class_id{-1};  // imagine only
};

const char* control_name(ControlKind kind);

// Parses {"type":"control","cmd":...}; throws InvalidData on anything else.
ControlCommand parse_control_json(const std::string& text);
std::string control_json(const ControlCommand& cmd);

}  // namespace mindsculpt
