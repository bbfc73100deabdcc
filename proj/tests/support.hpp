#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "strikesim/scenario_io.hpp"

namespace testing {

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(STRIKESIM_SCENARIO_DIR) / (name + ".scenario");
}

inline strikesim::ScenarioConfig scenario(const std::string& name) {
  return strikesim::load_scenario(scenario_path(name));
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fresh, empty scratch directory under the test working directory.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::current_path() / "scratch" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace testing
