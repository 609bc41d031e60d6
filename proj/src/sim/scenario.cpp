#include "companion/sim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace companion::sim {

ScenarioError::ScenarioError(int line, int column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Line {
  int number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<Line> lines;
  int number = 1;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (line.ends_with('\r')) line.remove_suffix(1);
    lines.push_back({number++, line});
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

double header_number(const Line& line, std::string_view value, std::size_t value_col) {
  const std::string s(value);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw ScenarioError(line.number, static_cast<int>(value_col) + 1,
                        "invalid number '" + s + "'");
  }
  return v;
}

}  // namespace

World load_scenario(std::string_view text) {
  const std::vector<Line> lines = split_lines(text);
  World world;
  double cell_size = 0.10;
  std::size_t i = 0;

  for (; i < lines.size(); ++i) {
    const Line& line = lines[i];
    if (line.text.empty()) continue;
    const auto eq = line.text.find('=');
    if (eq == std::string_view::npos) break;
    const std::string_view key = line.text.substr(0, eq);
    const std::string_view value = line.text.substr(eq + 1);
    if (key == "temp_c") {
      world.ambient_temp_c = header_number(line, value, eq + 1);
      if (world.ambient_temp_c < kMinModelTempC || world.ambient_temp_c > kMaxModelTempC) {
        throw ScenarioError(line.number, static_cast<int>(eq) + 2,
                            "temp_c outside [-40, 60]");
      }
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc{} || end != value.data() + value.size() || value.empty()) {
        throw ScenarioError(line.number, static_cast<int>(eq) + 2, "seed must be an unsigned integer");
      }
      world.rng_seed = seed;
    } else if (key == "cell_size") {
      cell_size = header_number(line, value, eq + 1);
      if (!(cell_size > 0)) {
        throw ScenarioError(line.number, static_cast<int>(eq) + 2, "cell_size must be positive");
      }
    } else if (key == "battery_v") {
      world.battery.voltage = header_number(line, value, eq + 1);
    } else if (key == "battery_mah") {
      world.battery.capacity_mah = header_number(line, value, eq + 1);
    } else {
      throw ScenarioError(line.number, 1, "unknown header '" + std::string(key) + "'");
    }
  }

  std::vector<Line> rows;
  for (; i < lines.size(); ++i) rows.push_back(lines[i]);
  while (!rows.empty() && rows.back().text.empty()) rows.pop_back();
  if (rows.empty()) throw ScenarioError(static_cast<int>(lines.size()) + 1, 1, "missing map grid");

  const int width = static_cast<int>(rows.front().text.size());
  const int height = static_cast<int>(rows.size());
  for (const Line& row : rows) {
    if (static_cast<int>(row.text.size()) != width) {
      throw ScenarioError(row.number, static_cast<int>(std::min<std::size_t>(row.text.size(), width)) + 1,
                          "ragged row: expected " + std::to_string(width) + " cells, got " +
                              std::to_string(row.text.size()));
    }
  }
  if (width < 3 || height < 3) {
    throw ScenarioError(rows.front().number, 1, "map must be at least 3x3");
  }

  world.grid = OccupancyGrid(width, height, cell_size);
  std::optional<CellIndex> start;
  for (int iy = 0; iy < height; ++iy) {
    const Line& row = rows[iy];
    for (int ix = 0; ix < width; ++ix) {
      const char glyph = row.text[ix];
      const bool border = ix == 0 || iy == 0 || ix == width - 1 || iy == height - 1;
      switch (glyph) {
        case '#':
          world.grid.set({ix, iy}, Cell::Obstacle);
          break;
        case '.':
        case 'R':
          if (border) throw ScenarioError(row.number, ix + 1, "open border");
          if (glyph == 'R') {
            if (start) throw ScenarioError(row.number, ix + 1, "duplicate start");
            start = CellIndex{ix, iy};
          }
          break;
        default:
          throw ScenarioError(row.number, ix + 1,
                              std::string("unknown glyph '") + glyph + "'");
      }
    }
  }
  if (!start) throw ScenarioError(rows.back().number, 1, "missing start");

  world.true_pose.position = world.grid.cell_center(*start);
  world.true_pose.theta = 0.0;
  return world;
}

World load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(0, 0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

}  // namespace companion::sim
