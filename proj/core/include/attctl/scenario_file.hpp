#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "attctl/sim_harness.hpp"

namespace attctl {

// Scenario files use a flat TOML subset:
//
//   # comment
//   [section]
//   key = 1.5            # number
//   key = "text"         # string
//   key = true           # boolean
//   key = [0, 0, 1]      # numeric array
//
// Sections: scenario, initial, desired, inertia, gains, weights, pseudo,
// noise, integrator, convergence. Every key is optional and defaults to the
// Scenario default; unknown sections or keys are a ConfigError.

/// Parses scenario text. Throws ConfigError (with the line number where one
/// applies) on syntax errors, unknown or duplicate keys, wrong value types,
/// and on values that break a Scenario invariant.
Scenario parse_scenario(std::string_view text);

/// Reads and parses a file. A missing or unreadable file is a ConfigError.
Scenario load_scenario(const std::filesystem::path& path);

/// Writes every field of `s`, with full precision, in a form parse_scenario
/// reads back to an equal scenario.
std::string format_scenario(const Scenario& s);

}  // namespace attctl
