#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "algclosure/scenario.hpp"

namespace algclosure {

inline constexpr const char* kToolName = "algclosure";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_inconclusive = 2, exit_invariant = 3, exit_input = 4 };

struct CommandOptions {
  std::string scenario;
  /// Overrides the command's main cap: closure_cap (closure), state_cap
  /// (construct, refute), node_cap (verify).
  std::optional<std::size_t> budget;
  std::optional<std::uint32_t> trunc;
  std::optional<std::uint32_t> stages;
  bool recheck = false;
  std::optional<std::string> snapshot_out;
  std::optional<std::string> resume;
  std::optional<std::vector<std::uint64_t>> p;
  std::optional<std::vector<std::uint32_t>> q;
  std::optional<std::string> ceiling;
};

struct CommandResult {
  int exit_code = exit_ok;
  nlohmann::ordered_json report;  // body; no timing
  double seconds = 0;
};

CommandResult run_closure(const Scenario& s, const CommandOptions& o);
CommandResult run_construct(const Scenario& s, const CommandOptions& o, bool refute = false);
CommandResult run_verify(const Scenario& s, const CommandOptions& o);
CommandResult run_supernormal(const Scenario& s, const CommandOptions& o);

/// Loads the scenario, dispatches on `command` and turns exceptions into
/// reports with the matching exit code.
CommandResult run_command(std::string_view command, const CommandOptions& o);

/// Report text: the body plus a trailing "timing" member when requested.
std::string render_report(const CommandResult& r, bool with_timing = true);

}  // namespace algclosure
