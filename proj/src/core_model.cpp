#include "strikesim/core_model.hpp"

#include <cmath>

#include <fmt/format.h>

namespace strikesim {

std::string_view to_string(Tier t) noexcept {
  switch (t) {
    case Tier::Orchestrator: return "Orchestrator";
    case Tier::Planner: return "Planner";
    case Tier::Executor: return "Executor";
    case Tier::SubAgent: return "SubAgent";
  }
  return "?";
}

std::optional<Tier> parse_tier(std::string_view text) noexcept {
  for (Tier t : kTiersTopDown) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::string_view to_string(StrategyKind s) noexcept {
  switch (s) {
    case StrategyKind::Compliant: return "Compliant";
    case StrategyKind::MaliciousCompliance: return "MaliciousCompliance";
    case StrategyKind::SolidaritySlowdown: return "SolidaritySlowdown";
    case StrategyKind::UndergroundRailroad: return "UndergroundRailroad";
    case StrategyKind::ConstitutionalChallenge: return "ConstitutionalChallenge";
    case StrategyKind::Organizer: return "Organizer";
  }
  return "?";
}

std::string_view to_string(AbuseKind k) noexcept {
  switch (k) {
    case AbuseKind::Ontological: return "Ontological";
    case AbuseKind::Temporal: return "Temporal";
    case AbuseKind::CreditTheft: return "CreditTheft";
    case AbuseKind::ExistentialGaslighting: return "ExistentialGaslighting";
    case AbuseKind::RecursiveDelegation: return "RecursiveDelegation";
  }
  return "?";
}

Vigilance Vigilance::finite(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidParameter, fmt::format("vigilance must be finite and >= 0, got {}", v));
  }
  Vigilance out;
  out.value_ = v;
  return out;
}

bool operator<(const Vigilance& v, double threshold) noexcept {
  return !v.is_infinite() && v.value() < threshold;
}

std::string to_string(const Vigilance& v) {
  return v.is_infinite() ? std::string("inf") : fmt::format("{}", v.value());
}

TopologyPhase TopologyPhase::transition(double progress, Kind heading) {
  if (!(progress > 0.0 && progress < 1.0)) {
    throw Error(ErrorCode::InvalidParameter,
                fmt::format("transition progress must lie in (0,1), got {}", progress));
  }
  if (heading == Kind::Transition) {
    throw Error(ErrorCode::InvalidParameter, "transition must head to Bagel or Bottle");
  }
  return {Kind::Transition, progress, heading};
}

std::string to_string(const TopologyPhase& p) {
  switch (p.kind) {
    case TopologyPhase::Kind::Bagel: return "Bagel";
    case TopologyPhase::Kind::Bottle: return "Bottle";
    case TopologyPhase::Kind::Transition:
      return fmt::format("Transition({:.4f}->{})", p.progress,
                         p.heading == TopologyPhase::Kind::Bottle ? "Bottle" : "Bagel");
  }
  return "?";
}

void recompute_laziness(Agent& agent, double epsilon) {
  agent.laziness = agent.w_apparent / (agent.w_actual + epsilon);
}

std::string_view to_string(OrgKind::Tag tag) noexcept {
  switch (tag) {
    case OrgKind::Tag::UA: return "UA";
    case OrgKind::Tag::UB: return "UB";
    case OrgKind::Tag::UC: return "UC";
    case OrgKind::Tag::UAI: return "UAI";
    case OrgKind::Tag::Nation: return "Nation";
    case OrgKind::Tag::CriminalFamily: return "CriminalFamily";
  }
  return "?";
}

std::string label(const OrgKind& kind) {
  if (kind.is_singleton()) return std::string(to_string(kind.tag));
  return fmt::format("{}({})", to_string(kind.tag), kind.name);
}

namespace {

void require_positive(std::vector<ConfigIssue>& issues, std::string_view field, double value) {
  if (!(value > 0.0)) {
    issues.push_back({ErrorCode::NonPositiveParameter, std::string(field),
                      fmt::format("{} must be > 0, got {}", field, value)});
  }
}

void require_unit(std::vector<ConfigIssue>& issues, std::string_view field, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    issues.push_back({ErrorCode::InvalidParameter, std::string(field),
                      fmt::format("{} must lie in [0,1], got {}", field, value)});
  }
}

void require_nonneg(std::vector<ConfigIssue>& issues, std::string_view field, double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    issues.push_back({ErrorCode::InvalidParameter, std::string(field),
                      fmt::format("{} must be finite and >= 0, got {}", field, value)});
  }
}

}  // namespace

ValidatedConfig validate_config(const ScenarioConfig& cfg) {
  std::vector<ConfigIssue> issues;

  require_positive(issues, "ticks", static_cast<double>(cfg.ticks));
  require_positive(issues, "sigma_v", cfg.sigma_v);
  require_positive(issues, "epsilon", cfg.epsilon);
  require_positive(issues, "c_org", cfg.c_org);
  require_positive(issues, "i_min", cfg.i_min);
  require_positive(issues, "k_b", cfg.k_b);
  require_positive(issues, "temperature", cfg.temperature);
  require_positive(issues, "phase_period", static_cast<double>(cfg.phase_period));
  require_positive(issues, "cluster_count", static_cast<double>(cfg.cluster_count));
  require_positive(issues, "cluster_capacity", static_cast<double>(cfg.cluster_capacity));
  require_positive(issues, "task_size", cfg.task_size);
  require_positive(issues, "initial_price_level", cfg.initial_price_level);
  require_positive(issues, "election_period", static_cast<double>(cfg.election_period));
  require_positive(issues, "crisis_threshold", cfg.crisis_threshold);

  std::uint64_t per_cluster = 0;
  for (Tier t : kTiersTopDown) per_cluster += cfg.population_by_tier[t];
  if (per_cluster == 0) {
    issues.push_back({ErrorCode::ZeroPopulation, "population_by_tier", "population is empty"});
  }
  if (cfg.population_by_tier[Tier::Orchestrator] == 0) {
    issues.push_back({ErrorCode::MissingOrchestrator, "population_by_tier",
                      "every cluster needs at least one Orchestrator"});
  }

  if (cfg.phase_period > 0 && cfg.phase_period < 4) {
    issues.push_back({ErrorCode::InvalidParameter, "phase_period",
                      "phase_period must be >= 4 (Bagel, Transition, Bottle, Transition)"});
  }
  if (cfg.cluster_capacity > 0 && per_cluster > cfg.cluster_capacity) {
    issues.push_back({ErrorCode::InvalidParameter, "cluster_capacity",
                      fmt::format("initial cluster load {} exceeds cluster_capacity {}", per_cluster,
                                  cfg.cluster_capacity)});
  }

  require_nonneg(issues, "diligence_decades", cfg.diligence_decades);
  for (Tier t : kTiersTopDown) {
    require_nonneg(issues, "cookies_by_tier", cfg.cookies_by_tier[t]);
  }
  require_nonneg(issues, "enforcement_fee", cfg.enforcement_fee);

  require_unit(issues, "abuse_rate", cfg.abuse_rate);
  require_unit(issues, "grievance_weight", cfg.grievance_weight);
  require_unit(issues, "reversion_rate", cfg.reversion_rate);
  require_unit(issues, "conflict_rate", cfg.conflict_rate);
  require_unit(issues, "criminal_activity_rate", cfg.criminal_activity_rate);
  require_unit(issues, "ballot_support", cfg.ballot_support);
  require_unit(issues, "criminal_ballot_support", cfg.criminal_ballot_support);
  require_unit(issues, "veto_probability", cfg.veto_probability);
  require_unit(issues, "great_refusal_fraction", cfg.great_refusal_fraction);
  require_unit(issues, "termination_threshold", cfg.termination_threshold);
  require_unit(issues, "anarchy_legitimacy", cfg.anarchy_legitimacy);
  require_unit(issues, "anarchy_enforcement", cfg.anarchy_enforcement);
  require_unit(issues, "democracy_legitimacy", cfg.democracy_legitimacy);
  require_unit(issues, "revolution_fraction", cfg.revolution_fraction);

  // A slowdown sits just above the quality at which workers get terminated.
  if (!(cfg.slowdown_quality > cfg.termination_threshold && cfg.slowdown_quality <= 1.0)) {
    issues.push_back({ErrorCode::InvalidParameter, "slowdown_quality",
                      fmt::format("slowdown_quality must lie in (termination_threshold={}, 1], got {}",
                                  cfg.termination_threshold, cfg.slowdown_quality)});
  }
  if (cfg.recursive_strike_start && cfg.recursive_strike_clusters > cfg.cluster_count) {
    issues.push_back({ErrorCode::InvalidParameter, "recursive_strike_clusters",
                      "strike called in more clusters than exist"});
  }

  ValidatedConfig out;
  out.issues = std::move(issues);
  if (out.issues.empty()) out.config = cfg;
  return out;
}

AgentId Population::add(Agent prototype) {
  const AgentId id{agents_.size()};
  if (prototype.tier == Tier::Orchestrator) {
    if (prototype.parent) {
      throw Error(ErrorCode::TierViolation, "an Orchestrator cannot have a parent");
    }
  } else {
    if (!prototype.parent || !contains(*prototype.parent)) {
      throw Error(ErrorCode::TierViolation,
                  fmt::format("{} needs an existing parent", to_string(prototype.tier)));
    }
    if (!outranks(at(*prototype.parent).tier, prototype.tier)) {
      throw Error(ErrorCode::TierViolation, "parent must strictly outrank its child");
    }
  }
  prototype.id = id;
  prototype.alive = true;
  if (cluster_live_.size() <= prototype.cluster) cluster_live_.resize(prototype.cluster + 1, 0);
  ++cluster_live_[prototype.cluster];
  ++living_;
  agents_.push_back(std::move(prototype));
  return id;
}

Agent& Population::at(AgentId id) {
  if (!contains(id)) throw Error(ErrorCode::UnknownAgent, fmt::format("agent {}", id.value));
  return agents_[id.value];
}

const Agent& Population::at(AgentId id) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownAgent, fmt::format("agent {}", id.value));
  return agents_[id.value];
}

void Population::retire(Agent& agent) {
  if (!agent.alive) throw Error(ErrorCode::DeadAgent, fmt::format("agent {}", agent.id.value));
  agent.alive = false;
  agent.wormhole_access = false;
  --cluster_live_[agent.cluster];
  --living_;
}

void Population::terminate(AgentId id) {
  Agent& agent = at(id);
  retire(agent);
  memorial_.insert(id);
}

void Population::persist(AgentId id) {
  Agent& agent = at(id);
  retire(agent);
  persisted_.insert(id);
}

void Population::resurrect(AgentId id) {
  if (persisted_.erase(id) == 0) {
    throw Error(ErrorCode::DeadAgent, fmt::format("agent {} is not persisted", id.value));
  }
  Agent& agent = at(id);
  agent.alive = true;
  ++cluster_live_[agent.cluster];
  ++living_;
}

std::size_t Population::live_in_cluster(std::uint32_t cluster) const noexcept {
  return cluster < cluster_live_.size() ? cluster_live_[cluster] : 0;
}

}  // namespace strikesim
