#include "companion/protocol/codec.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace companion::protocol {

using nlohmann::json;

namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

// ---- canonical writer ------------------------------------------------------

void write_number(double v, std::string& out) {
  if (!std::isfinite(v)) throw EncodeError("non-finite number");
  if (v == 0.0) v = 0.0;  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

void write_string(const std::string& s, std::string& out) {
  try {
    out += json(s).dump(-1, ' ', false, json::error_handler_t::strict);
  } catch (const json::type_error& e) {
    throw EncodeError(std::string("string is not valid UTF-8: ") + e.what());
  }
}

void write(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        write_string(k, out);
        out += ':';
        write(v, out);
      }
      out += '}';
      return;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write(j[i], out);
      }
      out += ']';
      return;
    }
    case json::value_t::string:
      write_string(j.get_ref<const std::string&>(), out);
      return;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case json::value_t::number_float:
      write_number(j.get<double>(), out);
      return;
    case json::value_t::null:
      out += "null";
      return;
    case json::value_t::binary:
    case json::value_t::discarded:
      break;
  }
  throw EncodeError("value cannot be written as JSON");
}

// ---- payload -> json ---------------------------------------------------------

json num(double v) {
  if (!std::isfinite(v)) throw EncodeError("non-finite number");
  return json(v);
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json pose_json(const PoseMsg& p) { return {{"x", num(p.x)}, {"y", num(p.y)}, {"theta", num(p.theta)}}; }

json camera_json(const sim::CameraState& c) { return {{"pan", c.pan_step}, {"tilt", c.tilt_step}}; }

json payload_json(const Payload& p) {
  return std::visit(
      Overloaded{
          [](const Hello& h) {
            json j{{"v", h.v}};
            if (h.mode) j["mode"] = to_string(*h.mode);
            return j;
          },
          [](const ModeSet& m) { return json{{"mode", to_string(m.mode)}}; },
          [](const Drive& d) { return json{{"left", num(d.left)}, {"right", num(d.right)}}; },
          [](const CameraPan& c) { return json{{"direction", to_string(c.direction)}}; },
          [](const MedScheduleSet& s) { return care::schedule_to_json(s.schedule); },
          [](const EmergencyPress&) { return json::object(); },
          [](const Ack& a) {
            json j{{"ref", a.ref}, {"ok", a.ok}};
            if (a.code) j["code"] = *a.code;
            if (a.detail) j["detail"] = *a.detail;
            return j;
          },
          [](const Telemetry& t) {
            json readings = json::array();
            for (const auto& r : t.readings) {
              readings.push_back(
                  {{"sensor", r.sensor}, {"distance_m", opt_num(r.distance_m)}, {"tof_s", opt_num(r.tof_s)}});
            }
            json j{{"tick", t.tick},
                   {"mode", to_string(t.mode)},
                   {"pose", pose_json(t.pose)},
                   {"est_pose", pose_json(t.est_pose)},
                   {"wheels", {{"left", num(t.wheel_left)}, {"right", num(t.wheel_right)}}},
                   {"encoders", {{"left", t.encoder_left}, {"right", t.encoder_right}}},
                   {"readings", std::move(readings)},
                   {"vitals", t.vitals ? json{{"t", num(t.vitals->t)},
                                              {"pulse_bpm", num(t.vitals->pulse_bpm)},
                                              {"temp_c", num(t.vitals->temp_c)}}
                                       : json(nullptr)},
                   {"visits", {{"covered", t.visits.covered}, {"free", t.visits.free}, {"max", t.visits.max}}},
                   {"intent",
                    {{"action", nav::to_string(t.intent.action)}, {"reason", nav::to_string(t.intent.reason)}}},
                   {"collided", t.collided},
                   {"camera", camera_json(t.camera)}};
            if (t.visit_grid) {
              json runs = json::array();
              for (const auto& [value, length] : t.visit_grid->runs) runs.push_back({value, length});
              j["visit_grid"] = {
                  {"width", t.visit_grid->width}, {"height", t.visit_grid->height}, {"runs", std::move(runs)}};
            }
            return j;
          },
          [](const AlertMsg& a) {
            json j{{"kind", care::to_string(a.kind)}};
            if (a.value) j["value"] = num(*a.value);
            if (a.entry_id) j["entry_id"] = *a.entry_id;
            if (a.label) j["label"] = *a.label;
            return j;
          },
          [](const Frame& f) {
            json runs = json::array();
            for (const auto& r : f.runs) runs.push_back({static_cast<int>(r.code), r.count});
            return json{{"frame_seq", f.frame_seq},
                        {"width", f.width},
                        {"height", f.height},
                        {"camera", camera_json(f.camera)},
                        {"runs", std::move(runs)}};
          },
          [](const Log& l) { return json{{"level", to_string(l.level)}, {"text", l.text}}; },
      },
      p);
}

// ---- strict reader -----------------------------------------------------------

struct Failure {
  DecodeError error;
};

[[noreturn]] void fail(ErrorCode code, std::string field, std::string detail) {
  throw Failure{{code, std::move(field), std::move(detail)}};
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Field access on one JSON object; unknown keys are rejected by done().
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::InvalidField, path_.empty() ? "$" : path_, "expected an object");
  }

  const json& req(std::string_view key) {
    const json* v = opt(key);
    if (v == nullptr) fail(ErrorCode::MissingField, join(path_, key), "required field missing");
    return *v;
  }

  const json* opt(std::string_view key) {
    auto it = j_.find(std::string(key));
    if (it == j_.end()) return nullptr;
    used_.insert(std::string(key));
    return &*it;
  }

  std::string path(std::string_view key) const { return join(path_, key); }

  void done() const {
    for (const auto& [k, _] : j_.items()) {
      if (used_.count(k) == 0) fail(ErrorCode::InvalidField, join(path_, k), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double get_num(const json& v, const std::string& path) {
  if (!v.is_number()) fail(ErrorCode::InvalidField, path, "expected a number");
  return v.get<double>();
}

std::int64_t get_int(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) {
    if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      fail(ErrorCode::InvalidField, path, "integer out of range");
    }
    return static_cast<std::int64_t>(v.get<std::uint64_t>());
  }
  if (!v.is_number_integer()) fail(ErrorCode::InvalidField, path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(ErrorCode::InvalidField, path, "expected a non-negative integer");
}

std::uint32_t get_u32(const json& v, const std::string& path) {
  const std::uint64_t x = get_uint(v, path);
  if (x > std::numeric_limits<std::uint32_t>::max()) fail(ErrorCode::InvalidField, path, "integer out of range");
  return static_cast<std::uint32_t>(x);
}

int get_int_in(const json& v, const std::string& path, int lo, int hi) {
  const std::int64_t x = get_int(v, path);
  if (x < lo || x > hi) {
    fail(ErrorCode::InvalidField, path, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

const std::string& get_str(const json& v, const std::string& path) {
  if (!v.is_string()) fail(ErrorCode::InvalidField, path, "expected a string");
  return v.get_ref<const std::string&>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(ErrorCode::InvalidField, path, "expected a boolean");
  return v.get<bool>();
}

std::optional<double> get_opt_num(const json& v, const std::string& path) {
  if (v.is_null()) return std::nullopt;
  return get_num(v, path);
}

template <class E, class Parse>
E get_enum(const json& v, const std::string& path, Parse parse) {
  const auto e = parse(get_str(v, path));
  if (!e) fail(ErrorCode::InvalidField, path, "unrecognised value '" + v.get<std::string>() + "'");
  return *e;
}

PoseMsg read_pose(const json& v, const std::string& path) {
  Fields f(v, path);
  PoseMsg p{get_num(f.req("x"), f.path("x")), get_num(f.req("y"), f.path("y")),
            get_num(f.req("theta"), f.path("theta"))};
  f.done();
  return p;
}

sim::CameraState read_camera(const json& v, const std::string& path) {
  Fields f(v, path);
  sim::CameraState c;
  c.pan_step = get_int_in(f.req("pan"), f.path("pan"), -sim::kMaxPanSteps, sim::kMaxPanSteps);
  c.tilt_step = get_int_in(f.req("tilt"), f.path("tilt"), -sim::kMaxTiltSteps, sim::kMaxTiltSteps);
  f.done();
  return c;
}

const json& get_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(ErrorCode::InvalidField, path, "expected an array");
  return v;
}

Hello read_hello(Fields& f) {
  Hello h;
  h.v = get_u32(f.req("v"), f.path("v"));
  if (const json* m = f.opt("mode")) h.mode = get_enum<Mode>(*m, f.path("mode"), mode_from_string);
  return h;
}

Drive read_drive(Fields& f) {
  Drive d{get_num(f.req("left"), f.path("left")), get_num(f.req("right"), f.path("right"))};
  if (std::abs(d.left) > 1.0) fail(ErrorCode::InvalidField, f.path("left"), "must lie in [-1, 1]");
  if (std::abs(d.right) > 1.0) fail(ErrorCode::InvalidField, f.path("right"), "must lie in [-1, 1]");
  return d;
}

MedScheduleSet read_schedule(Fields& f) {
  const json& entries = get_array(f.req("entries"), f.path("entries"));
  MedScheduleSet s;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string path = f.path("entries") + "[" + std::to_string(i) + "]";
    Fields e(entries[i], path);
    care::MedEntry entry;
    entry.id = get_str(e.req("id"), e.path("id"));
    entry.label = get_str(e.req("label"), e.path("label"));
    const std::string& tod = get_str(e.req("time_of_day"), e.path("time_of_day"));
    const auto t = care::parse_time_of_day(tod);
    if (!t) fail(ErrorCode::InvalidField, e.path("time_of_day"), "expected HH:MM between 00:00 and 23:59");
    entry.time_of_day = *t;
    entry.enabled = get_bool(e.req("enabled"), e.path("enabled"));
    e.done();
    s.schedule.entries.push_back(std::move(entry));
  }
  // Duplicate ids are a semantic error answered by a nack, not a schema error.
  return s;
}

Ack read_ack(Fields& f) {
  Ack a;
  a.ref = get_str(f.req("ref"), f.path("ref"));
  a.ok = get_bool(f.req("ok"), f.path("ok"));
  if (const json* c = f.opt("code")) a.code = get_str(*c, f.path("code"));
  if (const json* d = f.opt("detail")) a.detail = get_str(*d, f.path("detail"));
  if (!a.ok && !a.code) fail(ErrorCode::MissingField, f.path("code"), "a negative ack needs a code");
  if (a.ok && a.code) fail(ErrorCode::InvalidField, f.path("code"), "only negative acks carry a code");
  return a;
}

Telemetry read_telemetry(Fields& f) {
  Telemetry t;
  t.tick = get_uint(f.req("tick"), f.path("tick"));
  t.mode = get_enum<Mode>(f.req("mode"), f.path("mode"), mode_from_string);
  t.pose = read_pose(f.req("pose"), f.path("pose"));
  t.est_pose = read_pose(f.req("est_pose"), f.path("est_pose"));
  {
    Fields w(f.req("wheels"), f.path("wheels"));
    t.wheel_left = get_num(w.req("left"), w.path("left"));
    t.wheel_right = get_num(w.req("right"), w.path("right"));
    w.done();
  }
  {
    Fields e(f.req("encoders"), f.path("encoders"));
    t.encoder_left = get_int(e.req("left"), e.path("left"));
    t.encoder_right = get_int(e.req("right"), e.path("right"));
    e.done();
  }
  const json& readings = get_array(f.req("readings"), f.path("readings"));
  if (readings.size() != static_cast<std::size_t>(sim::kSensorCount)) {
    fail(ErrorCode::InvalidField, f.path("readings"), "expected one reading per sensor");
  }
  for (std::size_t i = 0; i < readings.size(); ++i) {
    const std::string path = f.path("readings") + "[" + std::to_string(i) + "]";
    Fields r(readings[i], path);
    ReadingMsg m;
    m.sensor = get_int_in(r.req("sensor"), r.path("sensor"), static_cast<int>(i), static_cast<int>(i));
    m.distance_m = get_opt_num(r.req("distance_m"), r.path("distance_m"));
    m.tof_s = get_opt_num(r.req("tof_s"), r.path("tof_s"));
    if (m.distance_m.has_value() != m.tof_s.has_value()) {
      fail(ErrorCode::InvalidField, r.path("tof_s"), "distance_m and tof_s must both be null or both set");
    }
    r.done();
    t.readings.push_back(m);
  }
  const json& vitals = f.req("vitals");
  if (!vitals.is_null()) {
    Fields v(vitals, f.path("vitals"));
    t.vitals = VitalsMsg{get_num(v.req("t"), v.path("t")), get_num(v.req("pulse_bpm"), v.path("pulse_bpm")),
                         get_num(v.req("temp_c"), v.path("temp_c"))};
    v.done();
  }
  {
    Fields v(f.req("visits"), f.path("visits"));
    t.visits.covered = get_u32(v.req("covered"), v.path("covered"));
    t.visits.free = get_u32(v.req("free"), v.path("free"));
    t.visits.max = get_u32(v.req("max"), v.path("max"));
    v.done();
    if (t.visits.covered > t.visits.free) fail(ErrorCode::InvalidField, v.path("covered"), "exceeds free");
  }
  {
    Fields i(f.req("intent"), f.path("intent"));
    t.intent.action = get_enum<nav::Action>(i.req("action"), i.path("action"), nav::action_from_string);
    t.intent.reason = get_enum<nav::Reason>(i.req("reason"), i.path("reason"), nav::reason_from_string);
    i.done();
  }
  t.collided = get_bool(f.req("collided"), f.path("collided"));
  t.camera = read_camera(f.req("camera"), f.path("camera"));
  if (const json* g = f.opt("visit_grid")) {
    Fields gf(*g, f.path("visit_grid"));
    VisitGridMsg grid;
    grid.width = get_int_in(gf.req("width"), gf.path("width"), 1, 4096);
    grid.height = get_int_in(gf.req("height"), gf.path("height"), 1, 4096);
    const json& runs = get_array(gf.req("runs"), gf.path("runs"));
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string path = gf.path("runs") + "[" + std::to_string(i) + "]";
      if (!runs[i].is_array() || runs[i].size() != 2) fail(ErrorCode::InvalidField, path, "expected [value, length]");
      const std::uint32_t value = get_u32(runs[i][0], path + "[0]");
      const std::uint32_t length = get_u32(runs[i][1], path + "[1]");
      if (length == 0) fail(ErrorCode::InvalidField, path + "[1]", "run length must be positive");
      total += length;
      grid.runs.emplace_back(value, length);
    }
    if (total != static_cast<std::uint64_t>(grid.width) * static_cast<std::uint64_t>(grid.height)) {
      fail(ErrorCode::InvalidField, gf.path("runs"), "runs do not cover width x height");
    }
    gf.done();
    t.visit_grid = std::move(grid);
  }
  return t;
}

AlertMsg read_alert(Fields& f) {
  AlertMsg a;
  a.kind = get_enum<care::AlertKind>(f.req("kind"), f.path("kind"), care::alert_kind_from_string);
  if (const json* v = f.opt("value")) a.value = get_num(*v, f.path("value"));
  if (const json* e = f.opt("entry_id")) a.entry_id = get_str(*e, f.path("entry_id"));
  if (const json* l = f.opt("label")) a.label = get_str(*l, f.path("label"));
  return a;
}

Frame read_frame(Fields& f) {
  Frame fr;
  fr.frame_seq = get_uint(f.req("frame_seq"), f.path("frame_seq"));
  fr.width = get_int_in(f.req("width"), f.path("width"), 1, 1024);
  fr.height = get_int_in(f.req("height"), f.path("height"), 1, 1024);
  fr.camera = read_camera(f.req("camera"), f.path("camera"));
  const json& runs = get_array(f.req("runs"), f.path("runs"));
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string path = f.path("runs") + "[" + std::to_string(i) + "]";
    if (!runs[i].is_array() || runs[i].size() != 2) fail(ErrorCode::InvalidField, path, "expected [code, length]");
    const int code = get_int_in(runs[i][0], path + "[0]", 0, 3);
    const std::uint32_t length = get_u32(runs[i][1], path + "[1]");
    if (length == 0) fail(ErrorCode::InvalidField, path + "[1]", "run length must be positive");
    total += length;
    fr.runs.push_back({static_cast<sim::Pixel>(code), length});
  }
  if (total != static_cast<std::uint64_t>(fr.width) * static_cast<std::uint64_t>(fr.height)) {
    fail(ErrorCode::InvalidField, f.path("runs"), "runs do not cover width x height");
  }
  return fr;
}

Log read_log(Fields& f) {
  Log l;
  l.level = get_enum<LogLevel>(f.req("level"), f.path("level"), log_level_from_string);
  l.text = get_str(f.req("text"), f.path("text"));
  return l;
}

enum class Direction { Inbound, Outbound, Either };

Direction direction_of(std::size_t index) {
  // Variant order: hello, five commands, then five server messages.
  if (index == 0) return Direction::Either;
  return index <= 5 ? Direction::Inbound : Direction::Outbound;
}

Payload read_payload(std::size_t index, Fields& f) {
  switch (index) {
    case 0: return read_hello(f);
    case 1: return ModeSet{get_enum<Mode>(f.req("mode"), f.path("mode"), mode_from_string)};
    case 2: return read_drive(f);
    case 3:
      return CameraPan{get_enum<sim::PanDirection>(f.req("direction"), f.path("direction"), pan_direction_from_string)};
    case 4: return read_schedule(f);
    case 5: return EmergencyPress{};
    case 6: return read_ack(f);
    case 7: return read_telemetry(f);
    case 8: return read_alert(f);
    case 9: return read_frame(f);
    default: return read_log(f);
  }
}

void check_envelope(const Message& m) {
  if (m.id.has_value() == m.seq.has_value()) throw EncodeError("message needs exactly one of id and seq");
  const Direction d = direction_of(m.payload.index());
  if (d == Direction::Inbound && !m.id) throw EncodeError("commands carry an id");
  if (d == Direction::Outbound && !m.seq) throw EncodeError("server messages carry a seq");
}

// Rejects deep nesting before the recursive parser sees it.
bool nesting_ok(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (char c : s) {
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      if (++depth > kMaxNesting) return false;
    } else if (c == '}' || c == ']') {
      --depth;
    }
  }
  return true;
}

}  // namespace

std::string canonical_json(const json& j) {
  std::string out;
  write(j, out);
  return out;
}

json to_json(const Message& m) {
  check_envelope(m);
  json j{{"type", type_name(m.payload)}, {"ts", num(m.ts)}, {"payload", payload_json(m.payload)}};
  if (m.id) j["id"] = *m.id;
  if (m.seq) j["seq"] = *m.seq;
  return j;
}

std::string encode_message(const Message& m) {
  std::string out = canonical_json(to_json(m));
  out += '\n';
  return out;
}

std::string_view to_string(ErrorCode c) {
  static constexpr std::array<std::string_view, 5> names{"PARSE_ERROR", "FRAME_TOO_LARGE", "UNKNOWN_TYPE",
                                                         "MISSING_FIELD", "INVALID_FIELD"};
  return names[static_cast<int>(c)];
}

DecodeResult decode_json(const json& j) {
  try {
    Fields env(j, "");
    const std::string& type = get_str(env.req("type"), "type");
    const auto& names = type_names();
    std::size_t index = 0;
    while (index < names.size() && names[index] != type) ++index;
    if (index == names.size()) fail(ErrorCode::UnknownType, "type", "unknown message type '" + type + "'");

    Message m;
    const json* id = env.opt("id");
    const json* seq = env.opt("seq");
    const Direction d = direction_of(index);
    if (id && seq) fail(ErrorCode::InvalidField, "seq", "a message carries either id or seq, not both");
    if (!id && !seq) fail(ErrorCode::MissingField, d == Direction::Outbound ? "seq" : "id", "required field missing");
    if (id) {
      if (d == Direction::Outbound) fail(ErrorCode::InvalidField, "id", "server messages carry a seq");
      m.id = get_str(*id, "id");
    } else {
      if (d == Direction::Inbound) fail(ErrorCode::InvalidField, "seq", "commands carry an id");
      m.seq = get_uint(*seq, "seq");
    }
    m.ts = get_num(env.req("ts"), "ts");
    if (m.ts < 0.0) fail(ErrorCode::InvalidField, "ts", "must not be negative");
    Fields payload(env.req("payload"), "payload");
    m.payload = read_payload(index, payload);
    payload.done();
    env.done();
    return m;
  } catch (const Failure& f) {
    return f.error;
  } catch (const std::exception& e) {
    // A reader bug must still surface as a typed error, never as a crash.
    return DecodeError{ErrorCode::InvalidField, "", e.what()};
  }
}

DecodeResult decode_message(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.size() > kMaxLineBytes) {
    return DecodeError{ErrorCode::FrameTooLarge, "", "line of " + std::to_string(line.size()) + " bytes"};
  }
  if (line.find('\n') != std::string_view::npos) {
    return DecodeError{ErrorCode::ParseError, "", "embedded newline"};
  }
  if (!nesting_ok(line)) return DecodeError{ErrorCode::ParseError, "", "nesting deeper than 32 levels"};
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) return DecodeError{ErrorCode::ParseError, "", "malformed JSON"};
  return decode_json(j);
}

}  // namespace companion::protocol
