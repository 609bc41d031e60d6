#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "companion/care/care_state.hpp"
#include "companion/control/driver.hpp"
#include "companion/nav/nav.hpp"
#include "companion/protocol/messages.hpp"
#include "companion/sim/camera.hpp"
#include "companion/sim/world.hpp"

namespace companion::supervisor {

using protocol::Message;
using protocol::Mode;

struct SupervisorConfig {
  double dt = 0.05;
  int frame_every = 4;  // camera frame (and visit grid) every Nth tick
  double clear_threshold = 0.30;
  control::DriverParams driver;
  care::CareParams care;
  double encoder_noise_ticks = 0.0;  // std dev added to odometry input; 0 disables
  std::optional<std::string> schedule_file;  // accepted schedules are written here
};

/// Client id used for commands that did not arrive over the network.
inline constexpr std::uint64_t kLocalClient = 0;

struct InboundCommand {
  std::uint64_t client = kLocalClient;
  Message message;
};

struct Outbound {
  Message message;
  std::optional<std::uint64_t> only_client;  // acks go back to the sender only
};

// Single writer for the whole simulation. Not thread-safe; the server side
// hands commands over through its own queue.
class Supervisor {
 public:
  /// Emits the tick-0 telemetry snapshot into the outbox.
  Supervisor(sim::World world, sim::RobotModel model, SupervisorConfig config,
             care::MedSchedule schedule = {});

  void submit(InboundCommand cmd) { pending_.push_back(std::move(cmd)); }

  /// One control period in fixed phase order; the messages it emitted are
  /// appended to the outbox.
  void tick();

  /// Hands over everything emitted since the last call.
  std::vector<Outbound> take_outbox();

  /// Canonical lines of every message emitted so far, in seq order.
  const std::vector<std::string>& message_log() const { return log_; }

  Mode mode() const { return mode_; }
  const sim::World& world() const { return world_; }
  const sim::RobotModel& model() const { return model_; }
  const nav::NavState& nav() const { return nav_; }
  const care::CareState& care() const { return care_; }
  const sim::CameraState& camera() const { return camera_; }
  const sim::WheelCommand& setpoint() const { return setpoint_; }
  std::uint64_t tick_count() const { return tick_count_; }
  double clock() const { return static_cast<double>(tick_count_) * config_.dt; }
  int collisions() const { return collisions_; }

 private:
  enum Bucket { kEmergency, kAcks, kLogs, kAlerts, kTelemetry, kFrames, kBucketCount };

  Outbound handle_command(const InboundCommand& cmd);
  void stage(Bucket b, protocol::Payload payload, double ts,
             std::optional<std::uint64_t> only_client = std::nullopt);
  void log_line(protocol::LogLevel level, std::string text, double ts);
  void flush();
  protocol::Telemetry telemetry(bool with_grid) const;
  sim::EncoderDelta noisy(sim::EncoderDelta d);

  SupervisorConfig config_;
  nav::NavParams nav_params_;
  sim::World world_;
  sim::RobotModel model_;
  nav::NavState nav_;
  care::CareState care_;
  control::CoverageDriver driver_;
  sim::CameraState camera_;
  Mode mode_ = Mode::Manual;
  sim::WheelCommand setpoint_;
  sim::WheelCommand applied_;
  sim::UltrasonicSweep sweep_{};
  bool collided_ = false;
  int collisions_ = 0;
  std::uint64_t tick_count_ = 0;
  std::uint64_t frame_seq_ = 0;
  std::uint64_t seq_ = 0;
  std::mt19937_64 noise_rng_;
  std::deque<InboundCommand> pending_;
  std::vector<std::vector<Outbound>> staged_;
  std::vector<Outbound> outbox_;
  std::vector<std::string> log_;
};

}  // namespace companion::supervisor
