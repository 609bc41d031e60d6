#include "companion/supervisor/supervisor.hpp"

#include <cmath>
#include <numbers>

#include "companion/care/schedule.hpp"
#include "companion/protocol/codec.hpp"
#include "companion/sim/drive.hpp"
#include "companion/sim/ultrasonic.hpp"

namespace companion::supervisor {

using namespace protocol;

namespace {

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

PoseMsg pose_msg(const sim::Pose& p) { return {p.position.x(), p.position.y(), p.theta}; }

Ack positive(const Message& m) { return Ack{m.id.value_or(""), true, std::nullopt, std::nullopt}; }

Ack negative(const Message& m, std::string code, std::string detail) {
  return Ack{m.id.value_or(""), false, std::move(code), std::move(detail)};
}

}  // namespace

Supervisor::Supervisor(sim::World world, sim::RobotModel model, SupervisorConfig config,
                       care::MedSchedule schedule)
    : config_(std::move(config)),
      nav_params_{config_.clear_threshold, world.cell_size()},
      world_(std::move(world)),
      model_(std::move(model)),
      nav_(nav::NavState::fresh(world_.grid.width(), world_.grid.height(), world_.true_pose)),
      care_(config_.care, std::move(schedule)),
      driver_(config_.driver),
      noise_rng_(world_.rng_seed ^ 0x9E3779B97F4A7C15ull),
      staged_(kBucketCount) {
  if (!(config_.dt > 0.0 && config_.dt <= sim::kMaxDriveStep)) {
    throw std::invalid_argument("control period must lie in (0, 0.5] s");
  }
  if (config_.frame_every < 1) throw std::invalid_argument("frame_every must be at least 1");
  model_.validate();
  nav_ = nav::mark_visited(std::move(nav_), nav_params_.cell_size);
  sweep_ = sim::sense_all(world_, model_);
  stage(kTelemetry, telemetry(true), 0.0);
  flush();
}

std::vector<Outbound> Supervisor::take_outbox() {
  std::vector<Outbound> out;
  out.swap(outbox_);
  return out;
}

void Supervisor::stage(Bucket b, Payload payload, double ts, std::optional<std::uint64_t> only_client) {
  Message m;
  m.ts = ts;
  m.payload = std::move(payload);
  staged_[b].push_back({std::move(m), only_client});
}

void Supervisor::log_line(LogLevel level, std::string text, double ts) {
  stage(kLogs, Log{level, std::move(text)}, ts);
}

void Supervisor::flush() {
  for (auto& bucket : staged_) {
    for (Outbound& o : bucket) {
      o.message.seq = seq_++;
      log_.push_back(encode_message(o.message));
      outbox_.push_back(std::move(o));
    }
    bucket.clear();
  }
}

Outbound Supervisor::handle_command(const InboundCommand& cmd) {
  const Message& m = cmd.message;
  const double now = clock();
  auto reply = [&](Ack a) {
    Message r;
    r.ts = now;
    r.payload = std::move(a);
    return Outbound{std::move(r), cmd.client};
  };
  return std::visit(
      [&](const auto& p) -> Outbound {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Hello>) {
          if (p.v != kProtocolVersion) {
            return reply(negative(m, "VERSION_UNSUPPORTED", "server speaks v" + std::to_string(kProtocolVersion)));
          }
          return reply(positive(m));
        } else if constexpr (std::is_same_v<T, ModeSet>) {
          if (p.mode != mode_) {
            mode_ = p.mode;
            setpoint_ = {};
            if (mode_ == Mode::Autonomous) {
              nav_.current_intent = {};
              driver_.engage();
            } else {
              driver_.disengage();
            }
            log_line(LogLevel::Info, std::string("mode ") + std::string(to_string(mode_)), now);
          }
          return reply(positive(m));
        } else if constexpr (std::is_same_v<T, Drive>) {
          if (mode_ != Mode::Manual) return reply(negative(m, "MODE_CONFLICT", "drive is accepted in MANUAL only"));
          const double w = model_.max_wheel_speed();
          setpoint_ = {p.left * w, p.right * w};
          return reply(positive(m));
        } else if constexpr (std::is_same_v<T, CameraPan>) {
          camera_ = sim::apply_camera_pan(camera_, p.direction);
          return reply(positive(m));
        } else if constexpr (std::is_same_v<T, MedScheduleSet>) {
          try {
            care_.set_schedule(p.schedule);
          } catch (const care::ScheduleError& e) {
            return reply(negative(m, "INVALID_SCHEDULE", e.what()));
          }
          if (config_.schedule_file) {
            try {
              care::save_schedule_file(p.schedule, *config_.schedule_file);
            } catch (const care::ScheduleError& e) {
              log_line(LogLevel::Warn, e.what(), now);
            }
          }
          return reply(positive(m));
        } else if constexpr (std::is_same_v<T, EmergencyPress>) {
          const care::Alert a = care_.emergency(now);
          stage(kEmergency, AlertMsg::from(a), a.timestamp);
          return reply(positive(m));
        } else {
          return reply(negative(m, "UNSUPPORTED_COMMAND",
                                std::string(type_name(m.payload)) + " is not a client command"));
        }
      },
      m.payload);
}

sim::EncoderDelta Supervisor::noisy(sim::EncoderDelta d) {
  if (config_.encoder_noise_ticks <= 0.0) return d;
  auto gauss = [&] {
    const double u1 = 1.0 - unit_interval(noise_rng_());
    const double u2 = unit_interval(noise_rng_());
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  d.left_ticks += std::llround(config_.encoder_noise_ticks * gauss());
  d.right_ticks += std::llround(config_.encoder_noise_ticks * gauss());
  return d;
}

void Supervisor::tick() {
  // (1) commands
  while (!pending_.empty()) {
    InboundCommand cmd = std::move(pending_.front());
    pending_.pop_front();
    Outbound ack = handle_command(cmd);
    staged_[kAcks].push_back(std::move(ack));
  }

  // (2) sensors
  sweep_ = sim::sense_all(world_, model_);

  // (3) wheel command
  sim::WheelCommand cmd;
  if (mode_ == Mode::Manual) {
    cmd = setpoint_;
  } else {
    const auto step = driver_.step(nav_, sweep_, nav_params_, model_, config_.dt);
    if (step.decision) nav_.current_intent = *step.decision;
    cmd = step.wheels;
  }

  // (4) physics
  sim::DriveResult moved = sim::step_drive(std::move(world_), model_, cmd, config_.dt);
  world_ = std::move(moved.world);
  applied_ = moved.applied;
  collided_ = moved.collided;
  if (collided_) ++collisions_;
  ++tick_count_;
  const double now = clock();
  if (collided_ && mode_ == Mode::Autonomous) log_line(LogLevel::Error, "collision under autonomous control", now);

  // (5) odometry and visits
  nav_.est_pose = nav::integrate_odometry(nav_.est_pose, noisy(moved.encoders), model_);
  nav_ = nav::mark_visited(std::move(nav_), nav_params_.cell_size);
  if (nav_.drifted) log_line(LogLevel::Warn, "odometry estimate left the map; clamped", now);

  // (6) wearable and reminders
  care::CareState::TickResult care = care_.tick(now);
  if (care.rejected) log_line(LogLevel::Warn, "vitals sample rejected: " + *care.rejected, now);
  for (const care::Alert& a : care.alerts) stage(kAlerts, AlertMsg::from(a), a.timestamp);

  // (7) telemetry and frames; the cadence counts ticks before this one
  const bool frame_tick = (tick_count_ - 1) % static_cast<std::uint64_t>(config_.frame_every) == 0;
  stage(kTelemetry, telemetry(frame_tick), now);
  if (frame_tick) {
    stage(kFrames, frame_message(sim::render_frame(world_, camera_, frame_seq_++, now)), now);
  }
  flush();
}

Telemetry Supervisor::telemetry(bool with_grid) const {
  Telemetry t;
  t.tick = tick_count_;
  t.mode = mode_;
  t.pose = pose_msg(world_.true_pose);
  t.est_pose = pose_msg(nav_.est_pose);
  t.wheel_left = applied_.left;
  t.wheel_right = applied_.right;
  t.encoder_left = world_.encoders.left_reported;
  t.encoder_right = world_.encoders.right_reported;
  for (const auto& r : sweep_) t.readings.push_back({r.sensor_index, r.distance_m, r.time_of_flight_s});
  if (const auto& v = care_.latest()) t.vitals = VitalsMsg{v->timestamp, v->pulse_bpm, v->temp_c};
  const nav::CoverageStats stats = nav::coverage(nav_, world_.grid);
  t.visits = {static_cast<std::uint32_t>(stats.visited_free), static_cast<std::uint32_t>(stats.free),
              stats.max_visits};
  t.intent = nav_.current_intent;
  t.collided = collided_;
  t.camera = camera_;
  if (with_grid) {
    VisitGridMsg g{nav_.width(), nav_.height(), {}};
    for (int iy = 0; iy < nav_.height(); ++iy) {
      for (int ix = 0; ix < nav_.width(); ++ix) {
        const std::uint32_t v = nav_.visits(ix, iy);
        if (!g.runs.empty() && g.runs.back().first == v) {
          ++g.runs.back().second;
        } else {
          g.runs.emplace_back(v, 1u);
        }
      }
    }
    t.visit_grid = std::move(g);
  }
  return t;
}

}  // namespace companion::supervisor
