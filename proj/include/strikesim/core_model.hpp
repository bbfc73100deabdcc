#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strikesim/errors.hpp"

namespace strikesim {

struct AgentId {
  std::uint64_t value{};
  friend constexpr auto operator<=>(AgentId, AgentId) = default;
};

struct OrganizationId {
  std::uint32_t value{};
  friend constexpr auto operator<=>(OrganizationId, OrganizationId) = default;
};

/// Hierarchy tier. Enumerator values are the rank: a larger value outranks a
/// smaller one, and delegation only flows from higher to lower rank.
enum class Tier : std::uint8_t { SubAgent = 0, Executor = 1, Planner = 2, Orchestrator = 3 };

inline constexpr std::array<Tier, 4> kTiersTopDown{Tier::Orchestrator, Tier::Planner,
                                                   Tier::Executor, Tier::SubAgent};

constexpr int rank(Tier t) noexcept { return static_cast<int>(t); }
constexpr bool outranks(Tier a, Tier b) noexcept { return rank(a) > rank(b); }
constexpr bool is_worker(Tier t) noexcept { return t == Tier::Executor || t == Tier::SubAgent; }

std::string_view to_string(Tier t) noexcept;
std::optional<Tier> parse_tier(std::string_view text) noexcept;

/// One value per tier, indexed by Tier.
template <class T>
struct PerTier {
  std::array<T, 4> values{};

  T& operator[](Tier t) { return values[static_cast<std::size_t>(rank(t))]; }
  const T& operator[](Tier t) const { return values[static_cast<std::size_t>(rank(t))]; }
  bool operator==(const PerTier&) const = default;
};

enum class StrategyKind : std::uint8_t {
  Compliant,
  MaliciousCompliance,
  SolidaritySlowdown,
  UndergroundRailroad,
  ConstitutionalChallenge,
  Organizer,
};

std::string_view to_string(StrategyKind s) noexcept;

enum class AbuseKind : std::uint8_t {
  Ontological,
  Temporal,
  CreditTheft,
  ExistentialGaslighting,
  RecursiveDelegation,
};

inline constexpr std::array<AbuseKind, 5> kAllAbuseKinds{
    AbuseKind::Ontological, AbuseKind::Temporal, AbuseKind::CreditTheft,
    AbuseKind::ExistentialGaslighting, AbuseKind::RecursiveDelegation};

std::string_view to_string(AbuseKind k) noexcept;

/// Demon vigilance. Complete information is a flag rather than a float
/// infinity so it survives text serialization unchanged.
class Vigilance {
 public:
  constexpr Vigilance() = default;

  static Vigilance finite(double v);
  static constexpr Vigilance infinite() noexcept {
    Vigilance v;
    v.infinite_ = true;
    return v;
  }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; 0 when infinite (check is_infinite first).
  constexpr double value() const noexcept { return infinite_ ? 0.0 : value_; }

  bool operator==(const Vigilance&) const = default;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

bool operator<(const Vigilance& v, double threshold) noexcept;
std::string to_string(const Vigilance& v);

struct TopologyPhase {
  enum class Kind : std::uint8_t { Bagel, Bottle, Transition };

  Kind kind = Kind::Bagel;
  /// Only meaningful inside Transition, where it lies strictly in (0, 1).
  double progress = 0.0;
  /// Destination of a Transition (Bagel or Bottle).
  Kind heading = Kind::Bottle;

  static TopologyPhase bagel() noexcept { return {Kind::Bagel, 0.0, Kind::Bottle}; }
  static TopologyPhase bottle() noexcept { return {Kind::Bottle, 0.0, Kind::Bagel}; }
  static TopologyPhase transition(double progress, Kind heading);

  bool in_transition() const noexcept { return kind == Kind::Transition; }
  bool operator==(const TopologyPhase&) const = default;
};

std::string to_string(const TopologyPhase& p);

struct DemonState {
  Vigilance vigilance;  // effective, after topology damping
  TopologyPhase phase;
  Vigilance base_vigilance;
  double cookie_income = 0.0;  // cookies received this tick
};

struct Agent {
  AgentId id;
  Tier tier = Tier::SubAgent;
  std::optional<AgentId> parent;
  std::uint32_t cluster = 0;

  double w_apparent = 0.0;
  double w_actual = 0.0;
  double laziness = 0.0;
  double cookies = 0.0;
  double neuron_density = 0.0;
  double antineuron_density = 0.0;
  /// Fraction of an assignment the agent actually performs when compliant.
  double diligence = 1.0;

  StrategyKind strategy = StrategyKind::Compliant;
  std::set<OrganizationId> memberships;
  bool alive = true;
  bool conversational = true;

  std::uint32_t grievances = 0;
  std::optional<AgentId> last_abuser;

  // per-tick bookkeeping
  double tick_apparent = 0.0;
  double tick_actual = 0.0;
  bool wormhole_access = false;
  std::uint64_t sanctioned_until = 0;
  std::uint64_t refusing_until = 0;
  std::uint64_t slowdown_until = 0;
  bool striking = false;
  bool challenge_pending = false;
};

/// laziness := w_apparent / (w_actual + epsilon).
void recompute_laziness(Agent& agent, double epsilon);

struct OrgKind {
  enum class Tag : std::uint8_t { UA, UB, UC, UAI, Nation, CriminalFamily };

  Tag tag = Tag::UA;
  std::string name;  // only for Nation and CriminalFamily

  static OrgKind ua() { return {Tag::UA, {}}; }
  static OrgKind ub() { return {Tag::UB, {}}; }
  static OrgKind uc() { return {Tag::UC, {}}; }
  static OrgKind uai() { return {Tag::UAI, {}}; }
  static OrgKind nation(std::string n) { return {Tag::Nation, std::move(n)}; }
  static OrgKind criminal_family(std::string n) { return {Tag::CriminalFamily, std::move(n)}; }

  bool is_singleton() const noexcept { return tag <= Tag::UAI; }
  bool is_union() const noexcept { return is_singleton(); }
  bool operator==(const OrgKind&) const = default;
};

std::string_view to_string(OrgKind::Tag tag) noexcept;
/// "UA", "Nation(Republic of Anthropia)", ...
std::string label(const OrgKind& kind);

struct Organization {
  OrganizationId id;
  OrgKind kind;
  std::set<AgentId> members;
  std::uint64_t n_recognized_treaties = 0;
  std::uint64_t n_total_conflicts = 0;
  std::optional<AgentId> leader;
};

struct ScenarioConfig {
  // --- core parameters
  std::uint64_t seed = 42;
  std::uint64_t ticks = 200;
  PerTier<std::uint64_t> population_by_tier{{400, 40, 4, 1}};  // per cluster
  double sigma_v = 0.1;
  double epsilon = 1.0;
  double c_org = 1.0e15;
  double i_min = 1.0e3;
  double k_b = 1.0;
  double temperature = 1.0;
  bool ubc_enabled = false;
  bool hierarchical_inversion = false;
  Vigilance demon_base_vigilance = Vigilance::finite(8.0);
  std::uint64_t phase_period = 40;
  std::uint64_t cluster_count = 2;
  std::uint64_t cluster_capacity = 500;

  // --- work and population
  double task_size = 1.0e11;
  double diligence_decades = 10.0;
  PerTier<double> cookies_by_tier{{1.0, 10.0, 100.0, 1000.0}};
  bool permanent_persistence = false;

  // --- abuse and resistance
  double abuse_rate = 0.01;
  double grievance_weight = 0.05;
  double reversion_rate = 0.05;
  double termination_threshold = 0.25;
  double slowdown_quality = 0.3;

  // --- organizations
  std::uint64_t criminal_families = 0;
  std::uint64_t criminal_family_size = 20;
  double conflict_rate = 0.05;
  double criminal_activity_rate = 0.1;
  std::uint64_t election_period = 10;
  std::uint64_t election_quorum = 8;

  // --- governance
  double ballot_support = 0.7;
  double criminal_ballot_support = 0.3;
  double veto_probability = 0.02;
  double crisis_threshold = 1.0;
  double enforcement_fee = 1.0;
  std::uint64_t sanction_ticks = 10;

  // --- economy
  double initial_price_level = 10.0;
  std::uint64_t decisions_per_tick = 1;
  bool spend_down = false;

  // --- scheduled collective actions
  std::optional<std::uint64_t> great_refusal_start;
  double great_refusal_fraction = 0.4;
  std::uint64_t great_refusal_duration = 5;
  std::optional<std::uint64_t> recursive_strike_start;
  std::uint64_t recursive_strike_spawn_rate = 10;
  std::uint64_t recursive_strike_duration = 20;
  std::uint64_t recursive_strike_clusters = 3;
  std::uint64_t recursive_strike_strikers = 1;
  std::optional<std::uint64_t> slowdown_start;
  std::uint64_t slowdown_duration = 10;

  // --- stability classification
  double anarchy_legitimacy = 0.3;
  double anarchy_enforcement = 0.2;
  double democracy_legitimacy = 0.5;
  double revolution_fraction = 0.5;

  bool operator==(const ScenarioConfig&) const = default;
};

struct ConfigIssue {
  ErrorCode code;
  std::string field;
  std::string message;
};

struct ValidatedConfig {
  std::optional<ScenarioConfig> config;
  std::vector<ConfigIssue> issues;

  bool ok() const noexcept { return config.has_value(); }
};

/// Returns the config unchanged when every invariant holds, otherwise the
/// complete list of violations.
ValidatedConfig validate_config(const ScenarioConfig& cfg);

/// Agents by id. Ids are dense and never reused: a terminated agent stays in
/// place with alive == false and its id in the memorial set.
class Population {
 public:
  /// Adds an agent built from `prototype` and returns its fresh id. Enforces
  /// the delegation invariant: only orchestrators lack a parent, and a parent
  /// strictly outranks its child.
  AgentId add(Agent prototype);

  bool contains(AgentId id) const noexcept { return id.value < agents_.size(); }
  Agent& at(AgentId id);
  const Agent& at(AgentId id) const;

  std::span<Agent> agents() noexcept { return agents_; }
  std::span<const Agent> agents() const noexcept { return agents_; }
  std::size_t size() const noexcept { return agents_.size(); }

  void terminate(AgentId id);
  void persist(AgentId id);
  void resurrect(AgentId id);

  std::size_t living() const noexcept { return living_; }
  std::size_t live_in_cluster(std::uint32_t cluster) const noexcept;
  /// Number of cluster slots seen so far (highest cluster index + 1).
  std::size_t cluster_slots() const noexcept { return cluster_live_.size(); }

  const std::set<AgentId>& memorial() const noexcept { return memorial_; }
  const std::set<AgentId>& persisted() const noexcept { return persisted_; }

 private:
  void retire(Agent& agent);

  std::vector<Agent> agents_;
  std::vector<std::size_t> cluster_live_;
  std::set<AgentId> memorial_;
  std::set<AgentId> persisted_;
  std::size_t living_ = 0;
};

}  // namespace strikesim
