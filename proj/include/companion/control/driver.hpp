#pragma once

#include <optional>

#include "companion/nav/nav.hpp"
#include "companion/sim/drive.hpp"

namespace companion::control {

struct DriverParams {
  int cruise_ticks = 140;  // encoder ticks per wheel per control period going forward
  int turn_ticks = 120;    // per wheel per period when rotating in place
};

// Turns nav-core decisions into wheel commands for the autonomous mode.
//
// Motion follows the cell lattice: the robot decides only at a cell center,
// and a FORWARD decision carries it to the center of the neighbouring cell
// along one of the eight compass headings. A candidate heading is offered to
// choose_heading only while its sensor reads farther than that neighbour's
// center. Seen from a center this excludes occupied neighbours, and on a
// diagonal it also excludes slipping past an occupied corner. Assumes
// cell_size >= 2 * body_radius.
//
// Every command is a whole number of encoder ticks per period, so noiseless
// odometry stays exact.
class CoverageDriver {
 public:
  struct Step {
    sim::WheelCommand wheels;
    std::optional<nav::MotionDecision> decision;  // set when a new decision was taken
    bool sweep_only = false;
  };

  explicit CoverageDriver(DriverParams params = {}) : params_(params) {}

  /// Next period starts with a sensor sweep and no motion.
  void engage();
  void disengage();

  Step step(const nav::NavState& nav, const sim::UltrasonicSweep& sweep,
            const nav::NavParams& nav_params, const sim::RobotModel& model, double dt);

  const DriverParams& params() const { return params_; }

 private:
  enum class Phase { Idle, Sweep, Turning, Forward };

  sim::WheelCommand turn_command(const nav::NavState& nav, const sim::RobotModel& model,
                                 double dt) const;
  sim::WheelCommand forward_command(const nav::NavState& nav, const sim::RobotModel& model,
                                    double dt) const;
  Step decide(const nav::NavState& nav, const sim::UltrasonicSweep& sweep,
              const nav::NavParams& nav_params, const sim::RobotModel& model, double dt);
  Step move_on(const nav::NavState& nav, const sim::RobotModel& model, double dt);

  DriverParams params_;
  Phase phase_ = Phase::Idle;
  double target_heading_ = 0.0;
  sim::Vec2<double> waypoint_ = sim::Vec2<double>::Zero();
};

}  // namespace companion::control
