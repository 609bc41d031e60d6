#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "companion/care/vitals.hpp"

namespace companion::care {

enum class ProfileKind { Steady, FeverRamp, TachyBurst, Scripted };

struct ScriptedRow {
  double t = 0.0;
  double pulse_bpm = 0.0;
  double temp_c = 0.0;

  bool operator==(const ScriptedRow&) const = default;
};

class ProfileError : public std::runtime_error {
 public:
  ProfileError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// CSV with header `t,pulse_bpm,temp_c`, strictly increasing t. Throws ProfileError.
std::vector<ScriptedRow> parse_vitals_csv(std::string_view text);

struct VitalsProfile {
  ProfileKind kind = ProfileKind::Steady;
  double noise_scale = 1.0;        // 1 gives +-3 bpm and +-0.1 C; scripted rows get no noise
  std::vector<ScriptedRow> rows;  // scripted only

  /// "steady", "fever_ramp", "tachy_burst", or "csv:PATH" (file is read here).
  static VitalsProfile parse(std::string_view spec);
};

// Shape constants for the built-in profiles.
namespace shape {
inline constexpr double kBasePulse = 72.0;
inline constexpr double kBaseTemp = 36.6;
inline constexpr double kPulseNoise = 3.0;
inline constexpr double kTempNoise = 0.1;

inline constexpr double kFeverStart = 60.0;    // s
inline constexpr double kFeverRate = 0.02;     // C per s, both ways
inline constexpr double kFeverPeak = 39.0;
inline constexpr double kFeverHold = 300.0;    // s at the peak
inline constexpr double kFeverPulsePerC = 10.0;

inline constexpr double kBurstStart = 30.0;
inline constexpr double kBurstPeriod = 120.0;
inline constexpr double kBurstLength = 20.0;
inline constexpr double kBurstPulse = 145.0;
}  // namespace shape

/// Noise-free value of the profile at t.
VitalsSample profile_baseline(const VitalsProfile& p, double t);

/// Baseline plus uniform noise drawn from a generator keyed on (seed, t), so
/// the same triple always gives the same sample.
VitalsSample synthesize_vitals(const VitalsProfile& p, double t, std::uint64_t seed);

}  // namespace companion::care
