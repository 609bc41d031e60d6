#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "companion/sim/acoustics.hpp"
#include "companion/sim/camera.hpp"
#include "companion/sim/drive.hpp"
#include "companion/sim/raycast.hpp"
#include "companion/sim/scenario.hpp"
#include "companion/sim/ultrasonic.hpp"
#include "oracles.hpp"

using namespace companion::sim;

namespace {

World room(int w, int h, double cs = 0.10) {
  std::string text = "cell_size=" + std::to_string(cs) + "\n";
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
      text += border ? '#' : (x == w / 2 && y == h / 2 ? 'R' : '.');
    }
    text += '\n';
  }
  return load_scenario(text);
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("speed of sound substitutions") {
  CHECK(speed_of_sound(20.0) == 343.64);
  CHECK(speed_of_sound(0.0) == 331.5);
  CHECK(speed_of_sound(-10.0) == doctest::Approx(325.43).epsilon(1e-15));
  CHECK_THROWS_AS(speed_of_sound(60.5), std::domain_error);
  CHECK_THROWS_AS(speed_of_sound(-41.0), std::domain_error);
  CHECK_THROWS_AS(speed_of_sound(NAN), std::domain_error);
}

TEST_CASE("echo law holds in both directions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.01, 6.0), t(-40.0, 60.0);
  for (int i = 0; i < 1000; ++i) {
    const double dist = d(rng), temp = t(rng);
    const double tof = time_of_flight(dist, temp);
    CHECK(std::abs(tof - 2.0 * dist / (331.5 + 0.607 * temp)) <= 1e-12 * tof);
    CHECK(distance_from_tof(tof, temp) == doctest::Approx(dist).epsilon(1e-12));
  }
}

TEST_CASE("range table is monotone and interpolates") {
  const RangeTable table;
  CHECK(table.max_range(40.0) == 4.0);
  CHECK(table.max_range(25.0) == 6.0);
  CHECK(table.max_range(10.0) == 6.0);
  CHECK(table.max_range(500.0) == 0.6);
  CHECK(table.max_range(70.0) == doctest::Approx(2.75));
  for (double f = 1.0; f < 300.0; f += 0.5) CHECK(table.max_range(f) >= table.max_range(f + 0.5));
  CHECK_THROWS(RangeTable({{40, 4.0}, {30, 5.0}}));
  CHECK_THROWS(RangeTable({{30, 4.0}, {40, 5.0}}));
  CHECK(RangeTable::parse("10:3,20:1").max_range(15) == doctest::Approx(2.0));
  CHECK_THROWS(RangeTable::parse("10:3,x"));
}

TEST_CASE("scenario loading") {
  const World w = load_scenario("temp_c=25.5\nseed=9\n#####\n#...#\n#.R.#\n#...#\n#####\n");
  CHECK(w.grid.count(Cell::Free) == 9);
  CHECK(w.ambient_temp_c == 25.5);
  CHECK(w.rng_seed == 9);
  CHECK(w.cell_size() == 0.10);
  CHECK(w.true_pose.position.x() == doctest::Approx(0.25));
  CHECK(w.true_pose.position.y() == doctest::Approx(0.25));
  CHECK(w.true_pose.theta == 0.0);

  auto error_of = [](const std::string& text) -> std::string {
    try {
      load_scenario(text);
    } catch (const ScenarioError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(error_of("#####\n#R.R#\n#####\n").find("duplicate start") != std::string::npos);
  CHECK(error_of("#####\n#.R..\n#####\n").find("open border") != std::string::npos);
  CHECK(error_of("#####\n#.R#\n#####\n") != "");
  CHECK(error_of("#####\n#.Rx#\n#####\n") != "");
  CHECK(error_of("#####\n#...#\n#####\n").find("missing start") != std::string::npos);
  CHECK(load_scenario("###\r\n#R#\r\n###").grid.count(Cell::Free) == 1);

  try {
    load_scenario("seed=1\n#####\n#.R.#\n#..?#\n#####\n");
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 4);
  }
}

TEST_CASE("sensor facing a wall one metre away") {
  World w = room(30, 5);
  w.true_pose.position = {w.grid.cell_size() * 29 - 1.0, 0.25};
  w.true_pose.theta = 0.0;
  const RobotModel model = RobotModel::make_default();
  const UltrasonicReading r = sense_ultrasonic(w, model, 0);
  REQUIRE(r.has_echo());
  CHECK(*r.distance_m == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*r.time_of_flight_s == doctest::Approx(5.8201e-3).epsilon(1e-4));
}

TEST_CASE("long corridor gives no echo") {
  World w = room(60, 5);
  w.true_pose.position = {0.15, 0.25};
  const UltrasonicReading r = sense_ultrasonic(w, RobotModel::make_default(), 0);
  CHECK_FALSE(r.has_echo());
  CHECK_FALSE(r.time_of_flight_s.has_value());
}

TEST_CASE("ray cast agrees with the ray-march oracle") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 60; ++k) {
    const World w = load_scenario(oracle::random_map(rng, 10, 10, 0.1, 6));
    std::uniform_real_distribution<double> pos(0.1, 0.9), ang(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 5; ++i) {
      const double x = pos(rng), y = pos(rng), a = ang(rng);
      if (oracle::blocked_at(w.grid, x, y)) continue;
      const auto hit = cast_ray(w.grid, {x, y}, a, 4.0);
      const auto ref = oracle::march_ray(w.grid, x, y, a, 4.0);
      REQUIRE(hit.has_value() == ref.has_value());
      if (hit) CHECK(std::abs(hit->distance - *ref) < 1e-6);
    }
  }
}

TEST_CASE("diagonal sensor on a 10x10 map") {
  World w = room(10, 10);
  w.grid.set({6, 6}, Cell::Obstacle);
  w.true_pose.position = {0.25, 0.22};
  w.true_pose.theta = 0.0;
  const RobotModel model = RobotModel::make_default();
  const UltrasonicReading r = sense_ultrasonic(w, model, 2);  // front-right, +45 degrees
  const auto ref = oracle::march_ray(w.grid, 0.25, 0.22, std::numbers::pi / 4.0, 4.0);
  REQUIRE(r.has_echo());
  REQUIRE(ref.has_value());
  CHECK(std::abs(*r.distance_m - *ref) < 1e-6);
  CHECK(*r.distance_m == doctest::Approx((0.63 - 0.25) * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("straight drive example") {
  World w = room(40, 9);
  const RobotModel model = RobotModel::make_default();
  const Pose start = w.true_pose;
  const DriveResult r = step_drive(w, model, {10.0, 10.0}, 0.1);
  CHECK_FALSE(r.collided);
  CHECK(r.world.true_pose.position.x() - start.position.x() == doctest::Approx(0.032).epsilon(1e-12));
  CHECK(r.world.true_pose.position.y() == doctest::Approx(start.position.y()));
  CHECK(r.world.true_pose.theta == 0.0);
  CHECK(r.encoders.left_ticks == 57);
  CHECK(r.encoders.right_ticks == 57);
}

TEST_CASE("spin in place") {
  World w = room(9, 9);
  const RobotModel model = RobotModel::make_default();
  const DriveResult r = step_drive(w, model, {3.0, -3.0}, 0.2);
  CHECK(r.world.true_pose.position.x() == doctest::Approx(w.true_pose.position.x()).epsilon(1e-12));
  CHECK(r.world.true_pose.position.y() == doctest::Approx(w.true_pose.position.y()).epsilon(1e-12));
  CHECK(r.world.true_pose.theta == doctest::Approx(2 * 0.032 * 3.0 * 0.2 / 0.14).epsilon(1e-12));
}

TEST_CASE("clamping is reported, dt is validated") {
  World w = room(9, 9);
  const RobotModel model = RobotModel::make_default();
  const DriveResult r = step_drive(w, model, {100.0, -100.0}, 0.05);
  CHECK(r.clamped);
  CHECK(r.applied.left == doctest::Approx(500.0 * 2 * std::numbers::pi / 60.0));
  CHECK_THROWS(step_drive(w, model, {1, 1}, 0.0));
  CHECK_THROWS(step_drive(w, model, {1, 1}, 0.51));
}

TEST_CASE("arc matches fine-step Euler integration") {
  // Forward Euler with dt/1000 has error about v*omega*dt^2/2000; the sampled
  // speeds keep that under 1e-7 so the 1e-6 tolerance tests the arc itself.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> v(-0.3, 0.3), om(-2.0, 2.0), dt(0.01, 0.05),
      th(-3.1, 3.1);
  const RobotModel model = RobotModel::make_default();
  World w = room(40, 40);
  for (int i = 0; i < 500; ++i) {
    const double vv = v(rng), ww = om(rng), step = dt(rng);
    const double wl = (vv + ww * model.wheel_base / 2.0) / model.wheel_radius;
    const double wr = (vv - ww * model.wheel_base / 2.0) / model.wheel_radius;
    w.true_pose.position = {2.0, 2.0};
    w.true_pose.theta = th(rng);
    const DriveResult r = step_drive(w, model, {wl, wr}, step);
    const auto ref = oracle::euler_drive({2.0, 2.0, w.true_pose.theta}, wl, wr, model.wheel_radius,
                                         model.wheel_base, step);
    CHECK(std::abs(r.world.true_pose.position.x() - ref.x) < 1e-6);
    CHECK(std::abs(r.world.true_pose.position.y() - ref.y) < 1e-6);
    CHECK(std::abs(oracle::wrap(r.world.true_pose.theta - ref.theta)) < 1e-6);
  }
}

TEST_CASE("full speed into a wall stops at contact") {
  World w = room(20, 9);
  const RobotModel model = RobotModel::make_default();
  const double wall = 19 * w.cell_size();
  w.true_pose.position = {wall - model.body_radius - 0.05, 0.45};
  const double full = model.max_wheel_speed();
  const DriveResult r = step_drive(w, model, {full, full}, 0.1);
  CHECK(r.collided);
  const double clearance = wall - r.world.true_pose.position.x() - model.body_radius;
  CHECK(clearance >= 0.0);
  CHECK(clearance <= 1e-4);
  CHECK_FALSE(disc_hits_obstacle(r.world.grid, r.world.true_pose.position, model.body_radius));
  // Only the delivered rotation is counted.
  const double delivered = (r.world.true_pose.position.x() - w.true_pose.position.x()) /
                           model.metres_per_tick();
  CHECK(std::abs(static_cast<double>(r.encoders.left_ticks) - delivered) <= 1.0);
}

TEST_CASE("encoder ticks conserve delivered rotation") {
  World w = room(100, 100);
  const RobotModel model = RobotModel::make_default();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> wheel(-6.0, 6.0);
  double left = 0, right = 0;
  std::int64_t lt = 0, rt = 0;
  for (int i = 0; i < 400; ++i) {
    const WheelCommand c{wheel(rng), wheel(rng)};
    const DriveResult r = step_drive(std::move(w), model, c, 0.05);
    w = r.world;
    REQUIRE_FALSE(r.collided);
    left += c.left * 0.05 / model.radians_per_tick();
    right += c.right * 0.05 / model.radians_per_tick();
    lt += r.encoders.left_ticks;
    rt += r.encoders.right_ticks;
    CHECK(std::abs(static_cast<double>(lt) - left) <= 0.5 + 1e-9);
    CHECK(std::abs(static_cast<double>(rt) - right) <= 0.5 + 1e-9);
  }
}

TEST_CASE("camera pan saturates") {
  CameraState c;
  c = apply_camera_pan(c, PanDirection::Right);
  CHECK(c.pan_offset() == doctest::Approx(std::numbers::pi / 6));
  for (int i = 0; i < 5; ++i) c = apply_camera_pan(c, PanDirection::Right);
  CHECK(c.pan_step == 3);
  CHECK(c.pan_offset() == doctest::Approx(std::numbers::pi / 2));
  c.tilt_step = -3;
  CHECK(apply_camera_pan(c, PanDirection::Down).tilt_step == -3);
  CHECK(apply_camera_pan(c, PanDirection::Up).tilt_step == -2);
  for (int i = 0; i < 8; ++i) c = apply_camera_pan(c, PanDirection::Left);
  CHECK(c.pan_step == -3);
}

TEST_CASE("boxed-in robot sees only its obstacle ring") {
  const World w = load_scenario("cell_size=0.1\n#######\n#######\n##...##\n##.R.##\n##...##\n#######\n#######\n");
  const CameraFrame f = render_frame(w, {}, 0, 0.0);
  CHECK(f.width() == 21);
  CHECK(f.height() == 21);
  CHECK(f.count(Pixel::Robot) == 1);
  CHECK(f.pixels(20, 10) == Pixel::Robot);
  // Robot faces east: the frame rows ahead reach the ring at distance 2 cells.
  CHECK(f.pixels(19, 10) == Pixel::Free);
  CHECK(f.pixels(18, 10) == Pixel::Obstacle);
  for (int row = 0; row < 18; ++row)
    for (int col = 0; col < 21; ++col) CHECK(f.pixels(row, col) == Pixel::Unknown);
  CHECK(f.count(Pixel::Free) == 5);  // the pocket cells at or ahead of the robot row
}

TEST_CASE("pan is equivalent to rotating the robot") {
  World w = room(31, 31);
  w.grid.set({20, 12}, Cell::Obstacle);
  w.grid.set({14, 22}, Cell::Obstacle);
  CameraState cam;
  cam.pan_step = 3;
  const CameraFrame panned = render_frame(w, cam, 0, 0.0);
  World turned = w;
  turned.true_pose.theta = cam.pan_offset();
  const CameraFrame rotated = render_frame(turned, {}, 0, 0.0);
  CHECK((panned.pixels == rotated.pixels).all());
}

TEST_CASE("frame visibility matches per-cell marching") {
  World w = room(23, 23);
  w.true_pose.position = {1.13, 2.17};
  w.true_pose.theta = -std::numbers::pi / 2;  // facing north, the room opens ahead
  w.grid.set({8, 12}, Cell::Obstacle);
  w.grid.set({14, 9}, Cell::Obstacle);
  const CameraFrame f = render_frame(w, {}, 0, 0.0);
  const double s = w.cell_size();
  int expect_free = 0;
  for (int row = 0; row < 21; ++row) {
    for (int col = 0; col < 21; ++col) {
      const int ahead = 20 - row, lateral = col - 10;
      if (ahead == 0 && lateral == 0) continue;
      // heading north: forward is -y, the view's right is +x
      const double tx = 1.13 + lateral * s, ty = 2.17 - ahead * s;
      if (oracle::blocked_at(w.grid, tx, ty)) continue;
      const double dist = std::hypot(tx - 1.13, ty - 2.17);
      const auto hit = oracle::march_ray(w.grid, 1.13, 2.17, std::atan2(ty - 2.17, tx - 1.13), dist, 1e-3);
      if (!hit) ++expect_free;
    }
  }
  CHECK(f.count(Pixel::Free) == expect_free);
}

TEST_CASE("run-length round trip") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    CameraFrame::Pixels p(1 + rng() % 9, 1 + rng() % 9);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = static_cast<Pixel>(rng() % 4);
    const auto runs = encode_runs(p);
    CHECK((decode_runs(runs, static_cast<int>(p.cols()), static_cast<int>(p.rows())) == p).all());
  }
  CHECK_THROWS(decode_runs({{Pixel::Free, 3}}, 2, 2));
  CHECK_THROWS(decode_runs({{Pixel::Free, 5}}, 2, 2));
}

}
