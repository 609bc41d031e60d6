#include "companion/care/vitals.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace companion::care {

namespace {

constexpr std::array<std::string_view, 6> kKindNames{
    "PULSE_LOW", "PULSE_HIGH", "TEMP_LOW", "TEMP_HIGH", "EMERGENCY", "MED_REMINDER"};

std::optional<Alert> edge(Band previous, Band now, AlertKind low, AlertKind high, double value,
                          double ts) {
  if (previous != Band::In || now == Band::In) return std::nullopt;
  return Alert{now == Band::Low ? low : high, ts, value, std::nullopt, std::nullopt};
}

}  // namespace

std::optional<std::string> implausible(const VitalsSample& s) {
  if (!std::isfinite(s.timestamp)) return "non-finite timestamp";
  if (!(s.pulse_bpm >= kPulseMin && s.pulse_bpm <= kPulseMax)) {
    return "pulse " + std::to_string(s.pulse_bpm) + " bpm outside [0, 300]";
  }
  if (!(s.temp_c >= kTempMin && s.temp_c <= kTempMax)) {
    return "temperature " + std::to_string(s.temp_c) + " C outside [30, 45]";
  }
  return std::nullopt;
}

void Thresholds::validate() const {
  const bool finite = std::isfinite(pulse_low) && std::isfinite(pulse_high) &&
                      std::isfinite(temp_low) && std::isfinite(temp_high);
  if (!finite || !(pulse_low < pulse_high) || !(temp_low < temp_high)) {
    throw std::invalid_argument("thresholds: each low bound must be below its high bound");
  }
}

std::string_view to_string(AlertKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<AlertKind> alert_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<AlertKind>(i);
  }
  return std::nullopt;
}

Band classify(double value, double low, double high) {
  if (value < low) return Band::Low;
  if (value > high) return Band::High;
  return Band::In;
}

IngestResult ingest_vitals(const VitalsSample& sample, const Thresholds& th,
                           const HysteresisState& state) {
  IngestResult out;
  out.state = state;
  if (auto why = implausible(sample)) {
    out.rejected = std::move(why);
    return out;
  }
  const Band pulse = classify(sample.pulse_bpm, th.pulse_low, th.pulse_high);
  const Band temp = classify(sample.temp_c, th.temp_low, th.temp_high);
  if (auto a = edge(state.pulse, pulse, AlertKind::PulseLow, AlertKind::PulseHigh,
                    sample.pulse_bpm, sample.timestamp)) {
    out.alerts.push_back(*a);
  }
  if (auto a = edge(state.temp, temp, AlertKind::TempLow, AlertKind::TempHigh, sample.temp_c,
                    sample.timestamp)) {
    out.alerts.push_back(*a);
  }
  out.state = {pulse, temp};
  return out;
}

Alert press_emergency(double timestamp) {
  return Alert{AlertKind::Emergency, timestamp, std::nullopt, std::nullopt, std::nullopt};
}

}  // namespace companion::care
