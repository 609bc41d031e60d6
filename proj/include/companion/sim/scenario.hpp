#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "companion/sim/world.hpp"

namespace companion::sim {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int line, int column, const std::string& what);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses a scenario map:
///
///     temp_c=20.0
///     seed=7
///     cell_size=0.5
///     #####
///     #.R.#
///     #####
///
/// '#' obstacle, '.' free, 'R' robot start (free, heading east). Optional
/// `battery_v=` and `battery_mah=` headers are kept as metadata. Errors carry
/// 1-based line and column.
World load_scenario(std::string_view text);
World load_scenario_file(const std::filesystem::path& path);

}  // namespace companion::sim
