#include "strikesim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "strikesim/engine.hpp"
#include "strikesim/scenario_io.hpp"

namespace strikesim {

namespace {

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    std::string item = trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t parse_u64(std::string_view text, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: bad seed '{}'", line, text));
  }
  return v;
}

// "1..10" (inclusive) or a single seed.
void append_seeds(std::vector<std::uint64_t>& out, std::string_view item, std::size_t line) {
  const std::size_t dots = item.find("..");
  if (dots == std::string_view::npos) {
    out.push_back(parse_u64(item, line));
    return;
  }
  const std::uint64_t lo = parse_u64(trim(item.substr(0, dots)), line);
  const std::uint64_t hi = parse_u64(trim(item.substr(dots + 2)), line);
  if (hi < lo) throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: empty range {}", line, item));
  for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
}

std::string dir_token(std::string_view text) {
  std::string out;
  for (char c : text) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
  }
  return out;
}

std::string csv_field(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

void print_issues(const ValidatedConfig& checked, std::ostream& err) {
  for (const ConfigIssue& issue : checked.issues) {
    err << "config error [" << to_string(issue.code) << "] " << issue.field << ": " << issue.message
        << "\n";
  }
}

}  // namespace

SweepSpec parse_sweep(std::string_view text, const std::filesystem::path& relative_to) {
  SweepSpec spec;
  bool have_base = false;
  bool have_values = false;
  for (const KeyValueLine& kv : split_key_values(text)) {
    if (kv.key == "base") {
      std::filesystem::path p(kv.value);
      if (p.is_relative()) p = relative_to / p;
      spec.base = load_scenario(p);
      have_base = true;
    } else if (kv.key == "axis") {
      spec.axis = kv.value;
    } else if (kv.key == "values") {
      spec.values = split_list(kv.value);
      have_values = true;
    } else if (kv.key == "seeds") {
      for (const std::string& item : split_list(kv.value)) append_seeds(spec.seeds, item, kv.line);
    } else if (kv.key == "threads") {
      spec.threads = parse_u64(kv.value, kv.line);
    } else {
      throw Error(ErrorCode::UnknownKey, fmt::format("line {}: unknown sweep key '{}'", kv.line, kv.key));
    }
  }
  if (!have_base) throw Error(ErrorCode::ConfigSyntax, "sweep needs a base scenario");
  if (!is_sweepable_field(spec.axis)) {
    throw Error(ErrorCode::UnknownKey, fmt::format("'{}' is not a sweepable field", spec.axis));
  }
  if (!have_values || spec.values.empty()) {
    throw Error(ErrorCode::InvalidParameter, "sweep values list is empty");
  }
  if (spec.seeds.empty()) spec.seeds.push_back(spec.base.seed);
  for (const std::string& v : spec.values) {
    ScenarioConfig probe = spec.base;
    set_config_field(probe, spec.axis, v);  // syntax check before anything runs
  }
  return spec;
}

std::vector<SweepRow> execute_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir) {
  struct Job {
    std::string value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const std::string& v : spec.values) {
    for (std::uint64_t s : spec.seeds) jobs.push_back({v, s});
  }
  std::vector<SweepRow> rows(jobs.size());

  auto run_one = [&](std::size_t i) {
    const Job& job = jobs[i];
    SweepRow& row = rows[i];
    row.axis_value = job.value;
    row.seed = job.seed;
    row.classification = "Unclassified";
    try {
      ScenarioConfig cfg = spec.base;
      set_config_field(cfg, spec.axis, job.value);
      cfg.seed = job.seed;
      const ValidatedConfig checked = validate_config(cfg);
      if (!checked.ok()) {
        row.status = csv_field("config_error: " + checked.issues.front().message);
        return;
      }
      const auto dir = out_dir / fmt::format("{}_{}", spec.axis, dir_token(job.value)) /
                       fmt::format("seed_{}", job.seed);
      const RunReport report = run(cfg, dir);
      row.classification = classification_label(report.classification);
      if (!report.state.metrics.empty()) {
        row.mean_legitimacy = report.state.metrics.back().mean_legitimacy;
        row.final_price_level = report.state.metrics.back().price_level;
      }
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = csv_field(std::string("error: ") + e.what());
    }
  };

  std::size_t threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, jobs.size()));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(i);
      });
    }
  }
  return rows;
}

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::optional<std::uint64_t> seed_override, bool quiet, std::ostream& out,
            std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = load_scenario(config_path);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed_override) cfg.seed = *seed_override;
  const ValidatedConfig checked = validate_config(cfg);
  if (!checked.ok()) {
    print_issues(checked, err);
    return kExitConfig;
  }
  try {
    const RunReport report = run(cfg, out_dir);
    out << "classification: " << classification_label(report.classification) << "\n";
    if (!quiet) {
      out << "ticks: " << report.state.tick << "\n";
      out << "artifacts: " << out_dir.string() << "\n";
    }
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_sweep(const std::filesystem::path& sweep_path, const std::filesystem::path& out_dir,
              bool quiet, std::ostream& out, std::ostream& err) {
  SweepSpec spec;
  try {
    std::ifstream in(sweep_path);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read {}", sweep_path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    spec = parse_sweep(buf.str(), sweep_path.parent_path());
  } catch (const Error& e) {
    err << "sweep error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<SweepRow> rows;
  try {
    std::filesystem::create_directories(out_dir);
    rows = execute_sweep(spec, out_dir);
    std::string table = "axis_value,seed,classification,mean_legitimacy,final_price_level,status\n";
    for (const SweepRow& r : rows) {
      table += fmt::format("{},{},{},{},{},{}\n", r.axis_value, r.seed, r.classification,
                           r.mean_legitimacy, r.final_price_level, r.status);
    }
    std::ofstream agg(out_dir / "aggregate.csv", std::ios::binary | std::ios::trunc);
    agg << table;
    if (!agg) throw Error(ErrorCode::Io, "cannot write aggregate.csv");
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }

  const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status != "ok"; });
  if (!quiet) {
    out << "runs: " << rows.size() << " failed: " << failed << "\n";
    out << "aggregate: " << (out_dir / "aggregate.csv").string() << "\n";
  }
  return failed ? kExitRuntime : kExitOk;
}

int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
  const auto path = run_dir / "report.json";
  std::ifstream in(path);
  if (!in) {
    err << "error [" << to_string(ErrorCode::MissingReport) << "]: no report.json in "
        << run_dir.string() << "\n";
    return kExitConfig;
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    err << "error [" << to_string(ErrorCode::MissingReport) << "]: unreadable report: " << e.what()
        << "\n";
    return kExitConfig;
  }
  try {
    out << "classification: " << doc.at("classification").get<std::string>() << "\n";
    out << "seed: " << doc.at("seed").get<std::uint64_t>() << "\n";
    const auto& orgs = doc.at("organizations");
    out << "organizations: " << orgs.size() << "\n";
    for (const auto& o : orgs) {
      out << fmt::format("  {} members={} legitimacy={:.3f} ({}/{})\n",
                         o.at("label").get<std::string>(), o.at("members").get<std::size_t>(),
                         o.at("legitimacy").get<double>(), o.at("recognized_treaties").get<std::uint64_t>(),
                         o.at("total_conflicts").get<std::uint64_t>());
    }
    out << "top laziest:\n";
    for (const auto& a : doc.at("top_laziest")) {
      out << fmt::format("  agent {} {} laziness={:.6g} {}\n", a.at("id").get<std::uint64_t>(),
                         a.at("tier").get<std::string>(), a.at("laziness").get<double>(),
                         a.at("strategy").get<std::string>());
    }
    const auto& windows = doc.at("crisis_windows");
    out << "crisis windows: " << windows.size() << "\n";
    for (const auto& w : windows) {
      out << fmt::format("  ticks {}-{}\n", w.at(0).get<std::uint64_t>(), w.at(1).get<std::uint64_t>());
    }
    const auto& cascades = doc.at("cascade_failures");
    out << "cascade failures: " << cascades.size() << "\n";
    for (const auto& c : cascades) {
      out << fmt::format("  tick {} cluster {} terminated={}\n", c.at("tick").get<std::uint64_t>(),
                         c.at("cluster").get<std::uint32_t>(), c.at("terminated").get<std::size_t>());
    }
  } catch (const std::exception& e) {
    err << "error: malformed report: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"strikesim: seeded agent-population strike and governance simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_pos;
  std::string out_flag;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "run one scenario");
  run_cmd->add_option("config", config_path, "scenario file")->required();
  run_cmd->add_option("output", out_pos, "output directory");
  run_cmd->add_option("--out", out_flag, "output directory");
  run_cmd->add_option("--seed", seed, "override the scenario seed");
  run_cmd->add_flag("--quiet", quiet, "print only the classification");

  std::string sweep_path;
  std::string sweep_out_pos;
  std::string sweep_out_flag;
  bool sweep_quiet = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("spec", sweep_path, "sweep file")->required();
  sweep_cmd->add_option("output", sweep_out_pos, "output directory");
  sweep_cmd->add_option("--out", sweep_out_flag, "output directory");
  sweep_cmd->add_flag("--quiet", sweep_quiet, "no summary lines");

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "summarize a finished run");
  report_cmd->add_option("dir", report_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto pick = [](const std::string& flag, const std::string& pos) {
    return std::filesystem::path(!flag.empty() ? flag : !pos.empty() ? pos : "out");
  };
  if (*run_cmd) {
    return cmd_run(config_path, pick(out_flag, out_pos), seed, quiet, std::cout, std::cerr);
  }
  if (*sweep_cmd) {
    return cmd_sweep(sweep_path, pick(sweep_out_flag, sweep_out_pos), sweep_quiet, std::cout, std::cerr);
  }
  return cmd_report(report_dir, std::cout, std::cerr);
}

}  // namespace strikesim
