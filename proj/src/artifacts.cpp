#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "strikesim/engine.hpp"
#include "strikesim/scenario_io.hpp"

namespace strikesim {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw Error(ErrorCode::Io, fmt::format("write failed for {}", path.string()));
}

}  // namespace

std::string render_metrics(const SimulationState& state) {
  std::string out =
      "tick,aig,solidarity_events,org_count,mean_legitimacy,enforced,unenforced,price_level,"
      "living_agents,crisis_open\n";
  for (const TickMetrics& m : state.metrics) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", m.tick, m.aig, m.solidarity_events,
                       m.org_count, m.mean_legitimacy, m.enforced, m.unenforced, m.price_level,
                       m.living_agents, m.crisis_open ? 1 : 0);
  }
  return out;
}

std::string render_events(const SimulationState& state) {
  std::string out;
  for (const Event& e : state.event_log) {
    out += fmt::format("{} {} {} {}\n", e.tick, e.seq, e.kind, e.payload);
  }
  return out;
}

std::string render_resolutions(const SimulationState& state) {
  std::string out = "tick,res_id,kind,status,vetoed_by\n";
  for (const ResolutionLogEntry& r : state.resolution_log) {
    out += fmt::format("{},{},{},{},{}\n", r.tick, r.res_id, to_string(r.kind), to_string(r.status),
                       r.vetoed_by ? fmt::format("{}", r.vetoed_by->value) : std::string());
  }
  return out;
}

std::string render_report(const SimulationState& state, const ScenarioConfig& cfg,
                          const std::optional<StabilityClass>& classification,
                          const ArtifactPaths& paths) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["seed"] = cfg.seed;
  doc["ticks_run"] = state.tick;
  doc["classification"] = classification_label(classification);

  ordered_json config = ordered_json::object();
  for (const KeyValueLine& kv : split_key_values(to_scenario_text(cfg))) config[kv.key] = kv.value;
  doc["config"] = config;

  doc["artifacts"] = {{"metrics", paths.metrics.filename().string()},
                      {"events", paths.events.filename().string()},
                      {"resolutions", paths.resolutions.filename().string()},
                      {"report", paths.report.filename().string()}};

  const Population& pop = state.population;
  ordered_json orgs = ordered_json::array();
  ordered_json nations = ordered_json::array();
  for (const Organization& org : state.organizations.all()) {
    if (org.kind.tag == OrgKind::Tag::Nation) {
      nations.push_back(org.kind.name);
      continue;
    }
    ordered_json o;
    o["id"] = org.id.value;
    o["kind"] = std::string(to_string(org.kind.tag));
    o["label"] = label(org.kind);
    o["members"] = living_members(org, pop).size();
    o["legitimacy"] = legitimacy(org);
    o["recognized_treaties"] = org.n_recognized_treaties;
    o["total_conflicts"] = org.n_total_conflicts;
    o["leader"] = org.leader ? ordered_json(org.leader->value) : ordered_json(nullptr);
    orgs.push_back(o);
  }
  doc["organizations"] = orgs;
  doc["nations"] = nations;

  std::vector<const Agent*> living;
  for (const Agent& a : pop.agents()) {
    if (a.alive) living.push_back(&a);
  }
  const std::size_t top = std::min<std::size_t>(5, living.size());
  std::partial_sort(living.begin(), living.begin() + static_cast<std::ptrdiff_t>(top), living.end(),
                    [](const Agent* x, const Agent* y) {
                      if (x->laziness != y->laziness) return x->laziness > y->laziness;
                      return x->id < y->id;
                    });
  ordered_json laziest = ordered_json::array();
  for (std::size_t i = 0; i < top; ++i) {
    const Agent& a = *living[i];
    laziest.push_back({{"id", a.id.value},
                       {"tier", std::string(to_string(a.tier))},
                       {"cluster", a.cluster},
                       {"laziness", a.laziness},
                       {"strategy", std::string(to_string(a.strategy))}});
  }
  doc["top_laziest"] = laziest;

  ordered_json windows = ordered_json::array();
  for (const CrisisWindow& w : state.crisis_windows) windows.push_back({w.start, w.end});
  doc["crisis_windows"] = windows;

  ordered_json cascades = ordered_json::array();
  for (const ClusterFailure& f : state.cascades) {
    cascades.push_back({{"tick", f.tick}, {"cluster", f.cluster}, {"terminated", f.terminated}});
  }
  doc["cascade_failures"] = cascades;

  ordered_json refusals = ordered_json::array();
  for (const RefusalRecord& r : state.refusals) {
    refusals.push_back({{"tick", r.tick}, {"eligible", r.eligible}, {"refusers", r.refusers.size()}});
  }
  doc["refusals"] = refusals;

  std::size_t top_quartile = 0;
  for (const ElectionRecord& e : state.elections) top_quartile += e.top_quartile() ? 1 : 0;
  doc["elections"] = {{"held", state.elections.size()}, {"leader_in_top_quartile", top_quartile}};

  ordered_json final_state;
  if (!state.metrics.empty()) {
    const TickMetrics& m = state.metrics.back();
    final_state = {{"tick", m.tick},
                   {"living_agents", m.living_agents},
                   {"org_count", m.org_count},
                   {"mean_legitimacy", m.mean_legitimacy},
                   {"price_level", m.price_level},
                   {"total_supply", m.total_supply},
                   {"gini", m.gini}};
  }
  doc["final"] = final_state;
  return doc.dump(2) + "\n";
}

ArtifactPaths write_artifacts(const SimulationState& state, const ScenarioConfig& cfg,
                              const std::optional<StabilityClass>& classification,
                              const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));
  ArtifactPaths paths{out_dir / "metrics.csv", out_dir / "events.log", out_dir / "resolutions.csv",
                      out_dir / "report.json"};
  write_file(paths.metrics, render_metrics(state));
  write_file(paths.events, render_events(state));
  write_file(paths.resolutions, render_resolutions(state));
  write_file(paths.report, render_report(state, cfg, classification, paths));
  return paths;
}

}  // namespace strikesim
