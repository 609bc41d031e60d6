#include "companion/protocol/messages.hpp"

#include <array>

namespace companion::protocol {

namespace {

template <class E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 2> kModes{"MANUAL", "AUTONOMOUS"};
constexpr std::array<std::string_view, 4> kLevels{"DEBUG", "INFO", "WARN", "ERROR"};
constexpr std::array<std::string_view, 4> kPan{"LEFT", "RIGHT", "UP", "DOWN"};

}  // namespace

std::string_view to_string(Mode m) { return kModes[static_cast<int>(m)]; }
std::optional<Mode> mode_from_string(std::string_view s) { return lookup<Mode>(kModes, s); }

std::string_view to_string(LogLevel l) { return kLevels[static_cast<int>(l)]; }
std::optional<LogLevel> log_level_from_string(std::string_view s) { return lookup<LogLevel>(kLevels, s); }

std::string_view to_string(sim::PanDirection d) { return kPan[static_cast<int>(d)]; }
std::optional<sim::PanDirection> pan_direction_from_string(std::string_view s) {
  return lookup<sim::PanDirection>(kPan, s);
}

const std::vector<std::string_view>& type_names() {
  static const std::vector<std::string_view> names{
      "hello", "mode_set", "drive", "camera_pan", "med_schedule_set", "emergency_press",
      "ack",   "telemetry", "alert", "frame",     "log"};
  return names;
}

std::string_view type_name(const Payload& p) { return type_names()[p.index()]; }

Frame frame_message(const sim::CameraFrame& f) {
  return {f.seq, f.width(), f.height(), f.camera, sim::encode_runs(f.pixels)};
}

sim::CameraFrame camera_frame(const Frame& f, double timestamp) {
  sim::CameraFrame out;
  out.seq = f.frame_seq;
  out.timestamp = timestamp;
  out.camera = f.camera;
  out.pixels = sim::decode_runs(f.runs, f.width, f.height);
  return out;
}

}  // namespace companion::protocol
