#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strikesim/core_model.hpp"
#include "strikesim/economy.hpp"
#include "strikesim/governance.hpp"
#include "strikesim/organizations.hpp"

namespace strikesim {

enum class StabilityClass : std::uint8_t {
  Tyranny,
  Anarchy,
  ConstitutionalDemocracy,
  Revolution,
  DynamicEquilibrium,
};

std::string_view to_string(StabilityClass c) noexcept;

struct Event {
  std::uint64_t tick = 0;
  std::uint64_t seq = 0;  // per tick
  std::string kind;
  std::string payload;
};

/// One row of the metrics series. The first ten fields are the exported
/// columns; the rest feed the classifier and the ledger summary.
struct TickMetrics {
  std::uint64_t tick = 0;
  double aig = 0.0;
  std::uint64_t solidarity_events = 0;
  std::uint64_t org_count = 0;
  double mean_legitimacy = 1.0;
  std::uint64_t enforced = 0;
  std::uint64_t unenforced = 0;
  double price_level = 0.0;
  std::uint64_t living_agents = 0;
  bool crisis_open = false;

  double noncompliant_fraction = 0.0;
  std::uint64_t cascade_failures = 0;
  std::uint64_t challenge_filings = 0;
  double minted = 0.0;
  double total_supply = 0.0;
  double gini = 0.0;
};

struct ElectionRecord {
  std::uint64_t tick = 0;
  OrganizationId org;
  AgentId leader;
  std::size_t members = 0;
  std::size_t lazier_than_leader = 0;

  bool top_quartile() const noexcept { return 4 * lazier_than_leader < members; }
};

struct ResolutionLogEntry {
  std::uint64_t tick = 0;
  std::uint64_t res_id = 0;
  ResolutionKind kind = ResolutionKind::TreatyRecognition;
  ResolutionStatus status = ResolutionStatus::Proposed;
  std::optional<OrganizationId> vetoed_by;
};

struct CrisisWindow {
  std::uint64_t start = 0;
  std::uint64_t end = 0;  // inclusive
};

struct RefusalRecord {
  std::uint64_t tick = 0;
  std::size_t eligible = 0;
  std::vector<AgentId> refusers;
};

/// Bookkeeping for a resolution the engine still has to settle.
struct ResolutionContext {
  std::optional<AgentId> filer;
  std::optional<OrganizationId> conflict_org;
};

struct SimulationState {
  std::uint64_t tick = 0;  // next tick to execute
  std::uint64_t rng_root = 0;

  Population population;
  OrgRegistry organizations;
  Council council;
  std::vector<Resolution> resolutions;  // index == id
  std::map<std::uint64_t, ResolutionContext> open_resolutions;
  std::vector<ResolutionLogEntry> resolution_log;
  CookieLedger ledger;
  DemonState demon;

  std::vector<Event> event_log;
  std::vector<TickMetrics> metrics;

  std::vector<OrganizationId> nations;
  std::set<std::uint32_t> failed_clusters;
  std::vector<ClusterFailure> cascades;
  std::vector<ElectionRecord> elections;
  std::vector<RefusalRecord> refusals;
  std::vector<CrisisWindow> crisis_windows;
  std::vector<AgentId> strikers;

  PerTier<std::set<AgentId>> cohorts;  // agents that took part in a solidarity exchange
  std::set<AgentId> uai_cohort;
  std::vector<AgentId> assignees;  // agents given work this tick
  std::vector<AgentId> awaiting_resurrection;
};

/// Validates the config and builds the tick-0 state: hierarchy, nations and
/// the council, seeded criminal families, the ledger.
SimulationState initialize(const ScenarioConfig& cfg);

/// Advances one tick through the nine phases.
void step(SimulationState& state, const ScenarioConfig& cfg);

struct StabilityThresholds {
  double anarchy_legitimacy = 0.3;
  double anarchy_enforcement = 0.2;
  double democracy_legitimacy = 0.5;
  double revolution_fraction = 0.5;

  static StabilityThresholds from(const ScenarioConfig& cfg);
};

inline constexpr std::size_t kMinClassificationWindow = 50;

StabilityClass classify_stability(std::span<const TickMetrics> window,
                                  const StabilityThresholds& thresholds = {});

/// Length of the trailing window the run is classified over.
std::size_t classification_window(std::uint64_t ticks) noexcept;

/// Fraction of this tick's assignments held by non-compliant agents.
double alignment_illusion_gap(const SimulationState& state);

struct ArtifactPaths {
  std::filesystem::path metrics;
  std::filesystem::path events;
  std::filesystem::path resolutions;
  std::filesystem::path report;
};

struct RunReport {
  SimulationState state;
  std::optional<StabilityClass> classification;  // none for runs under 50 ticks
  std::optional<ArtifactPaths> artifacts;
};

/// Steps cfg.ticks times and classifies. With an output directory the four
/// artifacts are written there; on a step error whatever was produced so far
/// is flushed before the error propagates.
RunReport run(const ScenarioConfig& cfg,
              const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// Artifact rendering, shared with the CLI.
std::string render_metrics(const SimulationState& state);
std::string render_events(const SimulationState& state);
std::string render_resolutions(const SimulationState& state);
std::string render_report(const SimulationState& state, const ScenarioConfig& cfg,
                          const std::optional<StabilityClass>& classification,
                          const ArtifactPaths& paths);
ArtifactPaths write_artifacts(const SimulationState& state, const ScenarioConfig& cfg,
                              const std::optional<StabilityClass>& classification,
                              const std::filesystem::path& out_dir);

std::string classification_label(const std::optional<StabilityClass>& c);

}  // namespace strikesim
