#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "companion/app/config.hpp"
#include "companion/protocol/messages.hpp"

namespace companion::app {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;   // scenario, script, profile or schedule unusable
inline constexpr int kExitServer = 4;  // could not open the protocol port

class ScriptError : public std::runtime_error {
 public:
  ScriptError(int line, const std::string& what)
      : std::runtime_error("script line " + std::to_string(line) + ": " + what) {}
};

struct ScriptLine {
  std::uint64_t tick = 0;  // delivered before this many ticks have run
  protocol::Message message;
};

/// Lines of `<tick> <encoded message>`; blank lines and lines starting with
/// '#' are skipped. Ticks must not decrease.
std::vector<ScriptLine> parse_script(std::string_view text);

/// Runs the simulation described by opts, prints the report JSON to `out`,
/// diagnostics to `err`, and returns the exit code.
int run(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace companion::app
