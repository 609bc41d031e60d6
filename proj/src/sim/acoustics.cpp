#include "companion/sim/acoustics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace companion::sim {

double speed_of_sound(double temp_c) {
  if (!(temp_c >= kMinModelTempC && temp_c <= kMaxModelTempC)) {
    throw std::domain_error("speed_of_sound: temperature " + std::to_string(temp_c) +
                            " C outside model range [-40, 60]");
  }
  return 331.5 + 0.607 * temp_c;
}

double time_of_flight(double distance_m, double temp_c) {
  return 2.0 * distance_m / speed_of_sound(temp_c);
}

double distance_from_tof(double tof_s, double temp_c) {
  return tof_s * speed_of_sound(temp_c) / 2.0;
}

RangeTable::RangeTable()
    : RangeTable({{25.0, 6.0}, {40.0, 4.0}, {100.0, 1.5}, {200.0, 0.6}}) {}

RangeTable::RangeTable(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw std::invalid_argument("RangeTable: no knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i].max_range_m > 0.0) || !std::isfinite(knots_[i].max_range_m)) {
      throw std::invalid_argument("RangeTable: range must be positive and finite");
    }
    if (i == 0) continue;
    if (!(knots_[i].frequency_khz > knots_[i - 1].frequency_khz)) {
      throw std::invalid_argument("RangeTable: frequencies must be strictly increasing");
    }
    if (knots_[i].max_range_m > knots_[i - 1].max_range_m) {
      throw std::invalid_argument(
          "RangeTable: range may not grow with frequency");
    }
  }
}

double RangeTable::max_range(double frequency_khz) const {
  if (frequency_khz <= knots_.front().frequency_khz) return knots_.front().max_range_m;
  if (frequency_khz >= knots_.back().frequency_khz) return knots_.back().max_range_m;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const Knot& hi = knots_[i];
    if (frequency_khz > hi.frequency_khz) continue;
    const Knot& lo = knots_[i - 1];
    const double w = (frequency_khz - lo.frequency_khz) / (hi.frequency_khz - lo.frequency_khz);
    // Convex combination of two ranges with hi <= lo stays within [hi, lo].
    return std::min(lo.max_range_m, std::max(hi.max_range_m,
                    lo.max_range_m + w * (hi.max_range_m - lo.max_range_m)));
  }
  return knots_.back().max_range_m;
}

namespace {

double parse_double(std::string_view s) {
  std::size_t used = 0;
  const std::string copy(s);
  const double v = std::stod(copy, &used);
  if (used != copy.size()) throw std::invalid_argument("trailing characters in '" + copy + "'");
  return v;
}

}  // namespace

RangeTable RangeTable::parse(std::string_view text) {
  std::vector<Knot> knots;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("RangeTable: expected freq:range, got '" + std::string(item) + "'");
    }
    knots.push_back({parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1))});
  }
  return RangeTable(std::move(knots));
}

}  // namespace companion::sim
