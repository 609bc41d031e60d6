#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace companion::supervisor {

struct RunReport {
  std::uint64_t ticks = 0;
  double coverage_fraction = 0.0;
  std::uint32_t max_visit_count = 0;
  int collisions = 0;
  std::map<std::string, int> alerts_by_kind;  // every kind listed, zeros included
  std::string message_log_hash;              // SHA-256 of the log bytes, lowercase hex
  std::vector<std::string> violations;

  bool operator==(const RunReport&) const = default;
};

nlohmann::json report_to_json(const RunReport& r);

std::string sha256_hex(std::string_view bytes);

/// Rebuilds the report from encoded log lines alone (each line with its "\n").
/// Violations: undecodable lines, seq not counting up from 0 by one, tick
/// counters going backwards, and collisions while AUTONOMOUS.
RunReport report_from_log(const std::vector<std::string>& lines);

}  // namespace companion::supervisor
