#include "companion/care/profiles.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace companion::care {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, int line, const char* what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ProfileError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double fever_temp(double t) {
  using namespace shape;
  const double rise = (kFeverPeak - kBaseTemp) / kFeverRate;
  const double t_peak = kFeverStart + rise;
  const double t_fall = t_peak + kFeverHold;
  if (t < kFeverStart) return kBaseTemp;
  if (t < t_peak) return kBaseTemp + kFeverRate * (t - kFeverStart);
  if (t < t_fall) return kFeverPeak;
  return std::max(kBaseTemp, kFeverPeak - kFeverRate * (t - t_fall));
}

bool in_burst(double t) {
  using namespace shape;
  if (t < kBurstStart) return false;
  return std::fmod(t - kBurstStart, kBurstPeriod) < kBurstLength;
}

}  // namespace

std::vector<ScriptedRow> parse_vitals_csv(std::string_view text) {
  std::vector<ScriptedRow> rows;
  int line_no = 0;
  bool header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "t,pulse_bpm,temp_c") throw ProfileError(line_no, "expected header t,pulse_bpm,temp_c");
      header = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw ProfileError(line_no, "expected three comma separated fields");
    }
    ScriptedRow r{parse_number(line.substr(0, c1), line_no, "t"),
                  parse_number(line.substr(c1 + 1, c2 - c1 - 1), line_no, "pulse_bpm"),
                  parse_number(line.substr(c2 + 1), line_no, "temp_c")};
    if (!rows.empty() && !(r.t > rows.back().t)) throw ProfileError(line_no, "t must increase");
    rows.push_back(r);
  }
  if (!header) throw ProfileError(line_no, "missing header");
  if (rows.empty()) throw ProfileError(line_no, "no samples");
  return rows;
}

VitalsProfile VitalsProfile::parse(std::string_view spec) {
  VitalsProfile p;
  if (spec == "steady") return p;
  if (spec == "fever_ramp") {
    p.kind = ProfileKind::FeverRamp;
    return p;
  }
  if (spec == "tachy_burst") {
    p.kind = ProfileKind::TachyBurst;
    return p;
  }
  if (spec.starts_with("csv:")) {
    const std::string path(spec.substr(4));
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vitals script " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    p.kind = ProfileKind::Scripted;
    p.rows = parse_vitals_csv(ss.str());
    return p;
  }
  throw std::invalid_argument("unknown vitals profile '" + std::string(spec) + "'");
}

VitalsSample profile_baseline(const VitalsProfile& p, double t) {
  using namespace shape;
  switch (p.kind) {
    case ProfileKind::Steady:
      return {t, kBasePulse, kBaseTemp};
    case ProfileKind::FeverRamp: {
      const double temp = fever_temp(t);
      return {t, kBasePulse + kFeverPulsePerC * (temp - kBaseTemp), temp};
    }
    case ProfileKind::TachyBurst:
      return {t, in_burst(t) ? kBurstPulse : kBasePulse, kBaseTemp};
    case ProfileKind::Scripted: {
      if (p.rows.empty()) throw std::invalid_argument("scripted profile without rows");
      auto it = std::upper_bound(p.rows.begin(), p.rows.end(), t,
                                 [](double v, const ScriptedRow& r) { return v < r.t; });
      const ScriptedRow& r = it == p.rows.begin() ? *it : *std::prev(it);
      return {t, r.pulse_bpm, r.temp_c};
    }
  }
  return {t, kBasePulse, kBaseTemp};
}

VitalsSample synthesize_vitals(const VitalsProfile& p, double t, std::uint64_t seed) {
  VitalsSample s = profile_baseline(p, t);
  if (p.kind == ProfileKind::Scripted || p.noise_scale == 0.0) return s;
  const auto tb = std::bit_cast<std::uint64_t>(t);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tb), static_cast<std::uint32_t>(tb >> 32)};
  std::mt19937_64 rng(seq);
  const double u_pulse = 2.0 * unit_interval(rng()) - 1.0;
  const double u_temp = 2.0 * unit_interval(rng()) - 1.0;
  s.pulse_bpm += p.noise_scale * shape::kPulseNoise * u_pulse;
  s.temp_c += p.noise_scale * shape::kTempNoise * u_temp;
  return s;
}

}  // namespace companion::care
