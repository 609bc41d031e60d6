#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace companion::care {

struct VitalsSample {
  double timestamp = 0.0;  // sim seconds
  double pulse_bpm = 0.0;
  double temp_c = 0.0;

  bool operator==(const VitalsSample&) const = default;
};

inline constexpr double kPulseMin = 0.0, kPulseMax = 300.0;
inline constexpr double kTempMin = 30.0, kTempMax = 45.0;

/// Empty when the sample is inside the sensor plausibility window, otherwise
/// a human readable reason.
std::optional<std::string> implausible(const VitalsSample& s);

// Non-medical defaults; everything is overridable from config.
struct Thresholds {
  double pulse_low = 50.0;
  double pulse_high = 120.0;
  double temp_low = 35.0;
  double temp_high = 38.0;

  /// Throws std::invalid_argument unless low < high for both pairs.
  void validate() const;
  bool operator==(const Thresholds&) const = default;
};

enum class AlertKind { PulseLow, PulseHigh, TempLow, TempHigh, Emergency, MedReminder };

std::string_view to_string(AlertKind k);
std::optional<AlertKind> alert_kind_from_string(std::string_view s);

struct Alert {
  AlertKind kind = AlertKind::Emergency;
  double timestamp = 0.0;
  std::optional<double> value;         // triggering reading for vitals alerts
  std::optional<std::string> entry_id;  // schedule entry for reminders
  std::optional<std::string> label;

  bool operator==(const Alert&) const = default;
};

enum class Band { Low, In, High };

// Where each signal sat at the previous accepted sample. A fresh state counts
// as in band, so a stream that starts out of band alerts on its first sample.
struct HysteresisState {
  Band pulse = Band::In;
  Band temp = Band::In;

  bool operator==(const HysteresisState&) const = default;
};

struct IngestResult {
  std::vector<Alert> alerts;  // at most one pulse and one temperature alert
  HysteresisState state;
  std::optional<std::string> rejected;  // set for implausible samples; state is then unchanged
};

Band classify(double value, double low, double high);

/// Edge-triggered threshold rules: an alert fires only on an in-band to
/// out-of-band transition, pulse before temperature.
IngestResult ingest_vitals(const VitalsSample& sample, const Thresholds& th,
                           const HysteresisState& state);

Alert press_emergency(double timestamp);

}  // namespace companion::care
