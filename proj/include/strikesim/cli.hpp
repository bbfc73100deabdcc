#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "strikesim/core_model.hpp"

namespace strikesim {

/// Exit statuses shared by every subcommand.
enum ExitStatus : int { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2 };

struct SweepSpec {
  ScenarioConfig base;
  std::string axis;
  std::vector<std::string> values;
  std::vector<std::uint64_t> seeds;
  std::size_t threads = 0;  // 0: hardware concurrency
};

/// Sweep file keys: base (scenario path, relative to the sweep file),
/// axis, values (comma list), seeds (comma list of seeds or a..b ranges),
/// threads (optional).
SweepSpec parse_sweep(std::string_view text, const std::filesystem::path& relative_to);

struct SweepRow {
  std::string axis_value;
  std::uint64_t seed = 0;
  std::string classification;
  double mean_legitimacy = 0.0;
  double final_price_level = 0.0;
  std::string status;
};

/// Runs every (value, seed) pair and returns rows in sweep-file order regardless
/// of which worker finished first.
std::vector<SweepRow> execute_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::optional<std::uint64_t> seed_override, bool quiet, std::ostream& out,
            std::ostream& err);
int cmd_sweep(const std::filesystem::path& sweep_path, const std::filesystem::path& out_dir,
              bool quiet, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace strikesim
