#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace companion::sim {

inline constexpr double kMinModelTempC = -40.0;
inline constexpr double kMaxModelTempC = 60.0;

/// Speed of sound in air (m/s) at `temp_c` degrees Celsius: 331.5 + 0.607 t.
/// Throws std::domain_error outside [-40, 60] C.
double speed_of_sound(double temp_c);

/// Round-trip echo time for a reflector `distance_m` away.
double time_of_flight(double distance_m, double temp_c);

/// Inverse of time_of_flight.
double distance_from_tof(double tof_s, double temp_c);

// Maximum usable range as a function of carrier frequency. Piecewise linear
// between knots, clamped outside them; knots must be strictly increasing in
// frequency and non-increasing in range.
class RangeTable {
 public:
  struct Knot {
    double frequency_khz;
    double max_range_m;
  };

  RangeTable();
  explicit RangeTable(std::vector<Knot> knots);

  double max_range(double frequency_khz) const;
  std::span<const Knot> knots() const { return knots_; }

  /// Parses "25:6.0,40:4.0,..." as used in config files.
  static RangeTable parse(std::string_view text);

 private:
  std::vector<Knot> knots_;
};

}  // namespace companion::sim
