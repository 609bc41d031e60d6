#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "companion/care/schedule.hpp"
#include "companion/care/vitals.hpp"
#include "companion/nav/nav.hpp"
#include "companion/sim/camera.hpp"

namespace companion::protocol {

inline constexpr std::uint32_t kProtocolVersion = 1;

enum class Mode { Manual, Autonomous };
std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

enum class LogLevel { Debug, Info, Warn, Error };
std::string_view to_string(LogLevel l);
std::optional<LogLevel> log_level_from_string(std::string_view s);

std::string_view to_string(sim::PanDirection d);
std::optional<sim::PanDirection> pan_direction_from_string(std::string_view s);

// ---- payloads -------------------------------------------------------------

struct Hello {
  std::uint32_t v = kProtocolVersion;
  std::optional<Mode> mode;  // always set by the server

  bool operator==(const Hello&) const = default;
};

struct ModeSet {
  Mode mode = Mode::Manual;
  bool operator==(const ModeSet&) const = default;
};

// Normalized wheel velocities, each in [-1, 1].
struct Drive {
  double left = 0.0;
  double right = 0.0;
  bool operator==(const Drive&) const = default;
};

struct CameraPan {
  sim::PanDirection direction = sim::PanDirection::Left;
  bool operator==(const CameraPan&) const = default;
};

struct MedScheduleSet {
  care::MedSchedule schedule;
  bool operator==(const MedScheduleSet&) const = default;
};

struct EmergencyPress {
  bool operator==(const EmergencyPress&) const = default;
};

// Positive or negative acknowledgement of one command.
struct Ack {
  std::string ref;  // id of the command being answered
  bool ok = true;
  std::optional<std::string> code;  // required when !ok
  std::optional<std::string> detail;

  bool operator==(const Ack&) const = default;
};

struct PoseMsg {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  bool operator==(const PoseMsg&) const = default;
};

struct ReadingMsg {
  int sensor = 0;
  std::optional<double> distance_m;  // null means no echo
  std::optional<double> tof_s;
  bool operator==(const ReadingMsg&) const = default;
};

struct VitalsMsg {
  double t = 0.0;
  double pulse_bpm = 0.0;
  double temp_c = 0.0;
  bool operator==(const VitalsMsg&) const = default;
};

struct VisitStatsMsg {
  std::uint32_t covered = 0;  // FREE cells with at least one visit
  std::uint32_t free = 0;
  std::uint32_t max = 0;
  bool operator==(const VisitStatsMsg&) const = default;
};

// Run-length encoded visit counts, row-major from the first map row.
struct VisitGridMsg {
  int width = 0;
  int height = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> runs;  // (count value, run length)
  bool operator==(const VisitGridMsg&) const = default;
};

struct Telemetry {
  std::uint64_t tick = 0;
  Mode mode = Mode::Manual;
  PoseMsg pose;      // ground truth
  PoseMsg est_pose;  // dead reckoned
  double wheel_left = 0.0;  // applied rad/s
  double wheel_right = 0.0;
  std::int64_t encoder_left = 0;  // cumulative ticks
  std::int64_t encoder_right = 0;
  std::vector<ReadingMsg> readings;  // one per sensor, index order
  std::optional<VitalsMsg> vitals;   // latest accepted sample
  VisitStatsMsg visits;
  nav::MotionDecision intent;
  bool collided = false;  // contact during this tick
  sim::CameraState camera;
  std::optional<VisitGridMsg> visit_grid;

  bool operator==(const Telemetry&) const = default;
};

// The alert's timestamp travels as the envelope ts.
struct AlertMsg {
  care::AlertKind kind = care::AlertKind::Emergency;
  std::optional<double> value;
  std::optional<std::string> entry_id;
  std::optional<std::string> label;

  static AlertMsg from(const care::Alert& a) { return {a.kind, a.value, a.entry_id, a.label}; }
  care::Alert alert(double timestamp) const { return {kind, timestamp, value, entry_id, label}; }
  bool operator==(const AlertMsg&) const = default;
};

struct Frame {
  std::uint64_t frame_seq = 0;
  int width = 0;
  int height = 0;
  sim::CameraState camera;
  std::vector<sim::PixelRun> runs;
  bool operator==(const Frame&) const = default;
};

struct Log {
  LogLevel level = LogLevel::Info;
  std::string text;
  bool operator==(const Log&) const = default;
};

using Payload = std::variant<Hello, ModeSet, Drive, CameraPan, MedScheduleSet, EmergencyPress, Ack,
                             Telemetry, AlertMsg, Frame, Log>;

/// Wire name of the payload alternative, e.g. "mode_set".
std::string_view type_name(const Payload& p);
/// All eleven wire names in variant order.
const std::vector<std::string_view>& type_names();

// Inbound messages carry the client's id, outbound ones the server's seq.
struct Message {
  std::optional<std::string> id;
  std::optional<std::uint64_t> seq;
  double ts = 0.0;
  Payload payload;

  bool operator==(const Message&) const = default;
};

Frame frame_message(const sim::CameraFrame& f);
/// Throws std::invalid_argument when the runs do not fill the frame.
sim::CameraFrame camera_frame(const Frame& f, double timestamp);

}  // namespace companion::protocol
