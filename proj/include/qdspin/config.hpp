// Structured key-value configuration with nested blocks and mandatory
// units on dimensioned scalars:
//
//   cavity {
//     finesse = 500
//     linewidth = 25GHz
//   }
//   spin { zeeman = 5.8GHz  g_factor = 0.143  field = 2.9T }
//
// Unknown keys are errors. The config hash is computed from the parsed
// parameter set, so whitespace, comments and unit spelling (25GHz vs
// 25000MHz) do not change it.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "qdspin/engine.hpp"

namespace qdspin {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ConfigTree = std::map<std::string, std::string>;  // dotted path -> raw value

ConfigTree parse_config_text(const std::string& text);
ConfigTree parse_config_file(const std::string& path);

// Applies "path=value" overrides (the CLI --set flag).
void apply_override(ConfigTree& tree, const std::string& assignment);

// Builds the physics world; throws ConfigError on unknown keys or
// malformed values.
World world_from_config(const ConfigTree& tree);

struct Violation {
  std::string path;
  std::string message;
  bool warning = false;
};

// Checks every type invariant without running physics; returns an empty
// list for a healthy config.
std::vector<Violation> validate_config(const ConfigTree& tree);

// FNV-1a over the canonical serialization of the parsed parameters.
std::string config_hash(const ConfigTree& tree);

// The built-in default parameter set (also shipped as configs/default.cfg).
std::string default_config_text();

}  // namespace qdspin
