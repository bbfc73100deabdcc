#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "strikesim/cli.hpp"
#include "support.hpp"

using namespace strikesim;
namespace fs = std::filesystem;

namespace {

std::size_t entries(const fs::path& dir) {
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++n;
  return n;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

int shell(const std::string& args) {
  const std::string cmd = std::string(STRIKESIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes the four artifacts") {
  const auto out_dir = testing::scratch("cli_run");
  std::ostringstream out, err;
  CHECK(cmd_run(testing::scenario_path("baseline"), out_dir, std::nullopt, false, out, err) == kExitOk);
  CHECK(entries(out_dir) == 4);
  for (const char* f : {"metrics.csv", "events.log", "resolutions.csv", "report.json"}) {
    CHECK(fs::exists(out_dir / f));
  }
  CHECK(out.str().rfind("classification: ", 0) == 0);
}

TEST_CASE("missing or invalid config exits 2") {
  const auto out_dir = testing::scratch("cli_missing");
  std::ostringstream out, err;
  CHECK(cmd_run("/nonexistent/none.scenario", out_dir, std::nullopt, false, out, err) == kExitConfig);
  CHECK_FALSE(err.str().empty());

  const auto bad = testing::scratch("cli_bad") / "bad.scenario";
  write(bad, "ticks = 0\n");
  CHECK(cmd_run(bad, out_dir, std::nullopt, false, out, err) == kExitConfig);
  CHECK_FALSE(fs::exists(out_dir));
}

TEST_CASE("seed override is deterministic") {
  const auto a = testing::scratch("cli_seed_a");
  const auto b = testing::scratch("cli_seed_b");
  const auto c = testing::scratch("cli_seed_c");
  std::ostringstream out, err;
  CHECK(cmd_run(testing::scenario_path("baseline"), a, 7, true, out, err) == kExitOk);
  CHECK(cmd_run(testing::scenario_path("baseline"), b, 7, true, out, err) == kExitOk);
  CHECK(cmd_run(testing::scenario_path("baseline"), c, std::nullopt, true, out, err) == kExitOk);
  for (const char* f : {"metrics.csv", "events.log", "resolutions.csv", "report.json"}) {
    CAPTURE(f);
    CHECK(testing::slurp(a / f) == testing::slurp(b / f));
  }
  CHECK(testing::slurp(a / "events.log") != testing::slurp(c / "events.log"));
}

TEST_CASE("input files are left untouched") {
  const auto path = testing::scenario_path("crisis");
  const std::string before = testing::slurp(path);
  const auto time_before = fs::last_write_time(path);
  std::ostringstream out, err;
  cmd_run(path, testing::scratch("cli_untouched"), std::nullopt, true, out, err);
  CHECK(testing::slurp(path) == before);
  CHECK(fs::last_write_time(path) == time_before);
}

TEST_CASE("unwritable output is a runtime error") {
  const auto blocker = testing::scratch("cli_blocker");
  write(blocker / "file", "x");
  std::ostringstream out, err;
  CHECK(cmd_run(testing::scenario_path("baseline"), blocker / "file" / "sub", std::nullopt, true, out,
                err) == kExitRuntime);
}

TEST_CASE("vigilance sweep") {
  const auto dir = testing::scratch("cli_sweep");
  const auto spec = dir / "vig.sweep";
  write(spec, "base = " + testing::scenario_path("baseline").string() +
                  "\naxis = demon_base_vigilance\nvalues = 0, 1, inf\nseeds = 1..10\n");
  const std::string spec_before = testing::slurp(spec);
  std::ostringstream out, err;
  CHECK(cmd_sweep(spec, dir / "out", true, out, err) == kExitOk);
  CHECK(testing::slurp(spec) == spec_before);
  const auto rows = lines(testing::slurp(dir / "out" / "aggregate.csv"));
  REQUIRE(rows.size() == 31);
  CHECK(rows[0] == "axis_value,seed,classification,mean_legitimacy,final_price_level,status");
  std::size_t inf_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].substr(rows[i].rfind(',') + 1) == "ok");
    if (rows[i].rfind("inf,", 0) == 0) {
      ++inf_rows;
      CHECK(rows[i].find(",Tyranny,") != std::string::npos);
    }
  }
  CHECK(inf_rows == 10);
  CHECK(fs::exists(dir / "out" / "demon_base_vigilance_inf" / "seed_3" / "report.json"));
}

TEST_CASE("sweep rows are counted even when runs fail") {
  const auto dir = testing::scratch("cli_sweep_fail");
  const auto spec = dir / "fail.sweep";
  // ticks = 0 fails validation for one value only
  write(spec, "base = " + testing::scenario_path("baseline").string() +
                  "\naxis = ticks\nvalues = 0, 60\nseeds = 1, 2, 3\n");
  std::ostringstream out, err;
  CHECK(cmd_sweep(spec, dir / "out", true, out, err) == kExitRuntime);
  const auto rows = lines(testing::slurp(dir / "out" / "aggregate.csv"));
  CHECK(rows.size() == 1 + 2 * 3);
}

TEST_CASE("bad sweep specs exit 2") {
  const auto dir = testing::scratch("cli_sweep_bad");
  const std::string base = "base = " + testing::scenario_path("baseline").string() + "\n";
  std::ostringstream out, err;
  write(dir / "empty.sweep", base + "axis = sigma_v\nvalues =\nseeds = 1\n");
  CHECK(cmd_sweep(dir / "empty.sweep", dir / "o1", true, out, err) == kExitConfig);
  write(dir / "axis.sweep", base + "axis = no_such_field\nvalues = 1\n");
  CHECK(cmd_sweep(dir / "axis.sweep", dir / "o2", true, out, err) == kExitConfig);
  write(dir / "value.sweep", base + "axis = sigma_v\nvalues = abc\n");
  CHECK(cmd_sweep(dir / "value.sweep", dir / "o3", true, out, err) == kExitConfig);
  CHECK(cmd_sweep(dir / "missing.sweep", dir / "o4", true, out, err) == kExitConfig);
}

TEST_CASE("report summaries") {
  std::ostringstream out, err;
  const auto base = testing::scratch("cli_report_base");
  REQUIRE(cmd_run(testing::scenario_path("baseline"), base, std::nullopt, true, out, err) == kExitOk);
  std::ostringstream summary;
  CHECK(cmd_report(base, summary, err) == kExitOk);
  const auto text = lines(summary.str());
  const auto census = std::find_if(text.begin(), text.end(),
                                   [](const std::string& l) { return l.rfind("organizations: ", 0) == 0; });
  REQUIRE(census != text.end());
  CHECK(std::stoul(census->substr(15)) >= 1);
  CHECK(census + 1 != text.end());
  CHECK((census + 1)->find("legitimacy=") != std::string::npos);
  CHECK(summary.str().find("top laziest:") != std::string::npos);
  CHECK(summary.str().find("crisis windows:") != std::string::npos);
  CHECK(summary.str().find("cascade failures:") != std::string::npos);

  const auto tyr = testing::scratch("cli_report_tyranny");
  REQUIRE(cmd_run(testing::scenario_path("tyranny"), tyr, std::nullopt, true, out, err) == kExitOk);
  std::ostringstream tyr_summary;
  CHECK(cmd_report(tyr, tyr_summary, err) == kExitOk);
  CHECK(tyr_summary.str().find("organizations: 0\n") != std::string::npos);

  const auto empty = testing::scratch("cli_report_empty");
  fs::create_directories(empty);
  CHECK(cmd_report(empty, out, err) == kExitConfig);
}

TEST_CASE("executable exit statuses") {
  const auto dir = testing::scratch("cli_exe");
  const std::string baseline = testing::scenario_path("baseline").string();
  CHECK(shell("run " + baseline + " " + (dir / "a").string()) == 0);
  CHECK(entries(dir / "a") == 4);
  CHECK(shell("run " + baseline + " --out " + (dir / "b").string() + " --seed 7 --quiet") == 0);
  CHECK(shell("report " + (dir / "a").string()) == 0);
  CHECK(shell("run /nonexistent.scenario " + (dir / "c").string()) == 2);
  CHECK(shell("report " + dir.string()) == 2);
  CHECK(shell("frobnicate") == 2);
  CHECK(shell("run") == 2);
}

}  // TEST_SUITE
