#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "strikesim/core_model.hpp"

namespace strikesim {

/// Parses the flat `key = value` scenario format. Keys are ScenarioConfig
/// field names; `#` starts a comment; unknown or repeated keys are errors.
/// Keys not mentioned keep their defaults.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Emits every field, one per line, in declaration order. parse_scenario of
/// the result reproduces the config exactly.
std::string to_scenario_text(const ScenarioConfig& cfg);

/// Assigns one field from its textual value (same syntax as the file).
void set_config_field(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Field names a sweep may vary: numeric or boolean scalars.
bool is_sweepable_field(std::string_view key);
std::vector<std::string_view> config_field_names();

/// Splits `key = value` lines, stripping comments and blank lines. Shared with
/// the sweep spec format.
struct KeyValueLine {
  std::size_t line = 0;
  std::string key;
  std::string value;
};
std::vector<KeyValueLine> split_key_values(std::string_view text);

std::string trim(std::string_view s);

}  // namespace strikesim
