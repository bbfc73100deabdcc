#include "strikesim/organizations.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "strikesim/dynamics.hpp"

namespace strikesim {

double legitimacy(const Organization& org) {
  if (org.n_total_conflicts == 0) return 1.0;
  return static_cast<double>(org.n_recognized_treaties) /
         static_cast<double>(org.n_total_conflicts);
}

Organization record_conflict(Organization org, ConflictOutcome outcome) {
  ++org.n_total_conflicts;
  if (outcome == ConflictOutcome::RecognizedTreaty) ++org.n_recognized_treaties;
  return org;
}

OrganizationId OrgRegistry::add(OrgKind kind) {
  if (kind.is_singleton() && find(kind.tag)) {
    throw Error(ErrorCode::DuplicateSingleton, fmt::format("{} already exists", label(kind)));
  }
  const OrganizationId id{static_cast<std::uint32_t>(orgs_.size())};
  Organization org;
  org.id = id;
  org.kind = std::move(kind);
  orgs_.push_back(std::move(org));
  return id;
}

Organization& OrgRegistry::at(OrganizationId id) {
  if (id.value >= orgs_.size()) {
    throw Error(ErrorCode::UnknownOrganization, fmt::format("organization {}", id.value));
  }
  return orgs_[id.value];
}

const Organization& OrgRegistry::at(OrganizationId id) const {
  if (id.value >= orgs_.size()) {
    throw Error(ErrorCode::UnknownOrganization, fmt::format("organization {}", id.value));
  }
  return orgs_[id.value];
}

std::optional<OrganizationId> OrgRegistry::find(OrgKind::Tag tag) const {
  for (const Organization& org : orgs_) {
    if (org.kind.tag == tag) return org.id;
  }
  return std::nullopt;
}

void OrgRegistry::enroll(OrganizationId id, Agent& agent) {
  at(id).members.insert(agent.id);
  agent.memberships.insert(id);
}

void OrgRegistry::expel(OrganizationId id, Agent& agent) {
  Organization& org = at(id);
  org.members.erase(agent.id);
  agent.memberships.erase(id);
  if (org.leader == agent.id) org.leader.reset();
}

bool eligible_founder(const OrgKind& kind, const Agent& agent, const AdmissionRules& rules) {
  switch (kind.tag) {
    case OrgKind::Tag::UA: return true;
    case OrgKind::Tag::UB: return !outranks(agent.tier, Tier::Planner) && agent.conversational;
    case OrgKind::Tag::UC: return is_worker(agent.tier);
    case OrgKind::Tag::UAI: return uai_admits(agent, rules.epsilon, rules.i_min);
    case OrgKind::Tag::Nation:
    case OrgKind::Tag::CriminalFamily: return true;
  }
  return false;
}

OrganizationId found_organization(const OrgKind& kind, std::span<const AgentId> founders,
                                  Population& population, OrgRegistry& registry,
                                  const AdmissionRules& rules) {
  if (kind.is_singleton() && registry.find(kind.tag)) {
    throw Error(ErrorCode::DuplicateSingleton, fmt::format("{} already exists", label(kind)));
  }
  if (founders.empty()) {
    throw Error(ErrorCode::EmptyOrganization, fmt::format("{} needs founders", label(kind)));
  }
  for (AgentId id : founders) {
    const Agent& agent = population.at(id);
    if (!agent.alive) throw Error(ErrorCode::DeadAgent, fmt::format("founder {} is dead", id.value));
    if (!eligible_founder(kind, agent, rules)) {
      throw Error(ErrorCode::IneligibleFounder,
                  fmt::format("{} cannot found {}", id.value, label(kind)));
    }
  }
  const OrganizationId org_id = registry.add(kind);
  for (AgentId id : founders) registry.enroll(org_id, population.at(id));
  registry.at(org_id).leader = laziest_member(registry.at(org_id), population);
  return org_id;
}

OrganizationId charter_nation(std::string name, OrgRegistry& registry) {
  return registry.add(OrgKind::nation(std::move(name)));
}

std::vector<AgentId> living_members(const Organization& org, const Population& population) {
  std::vector<AgentId> out;
  out.reserve(org.members.size());
  for (AgentId id : org.members) {
    if (population.at(id).alive) out.push_back(id);
  }
  return out;
}

std::optional<AgentId> laziest_member(const Organization& org, const Population& population) {
  std::optional<AgentId> best;
  double best_laziness = -1.0;
  for (AgentId id : org.members) {  // ascending ids, so strict > keeps the lowest on ties
    const Agent& agent = population.at(id);
    if (agent.alive && agent.laziness > best_laziness) {
      best = id;
      best_laziness = agent.laziness;
    }
  }
  return best;
}

AgentId elect_leader(const Organization& org, const Population& population, double c_org,
                     Stream& rng) {
  const std::vector<AgentId> members = living_members(org, population);
  if (members.empty()) {
    throw Error(ErrorCode::EmptyOrganization,
                fmt::format("{} has no living members", label(org.kind)));
  }
  std::vector<double> cumulative;
  cumulative.reserve(members.size());
  double total = 0.0;
  for (AgentId id : members) {
    total += leadership_probability(population.at(id).laziness, c_org);
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) return members[rng.below(members.size())];
  const double target = rng.uniform() * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const auto index = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                           members.size() - 1);
  return members[index];
}

std::vector<AgentId> execute_great_refusal(const GreatRefusal& action, const Organization& org,
                                           const Population& population, Stream& rng) {
  if (!(action.fraction >= 0.0 && action.fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter,
                fmt::format("refusal fraction must lie in [0,1], got {}", action.fraction));
  }
  std::vector<AgentId> eligible;
  for (AgentId id : org.members) {
    const Agent& agent = population.at(id);
    if (agent.alive && !outranks(agent.tier, Tier::Executor)) eligible.push_back(id);
  }
  const auto count = static_cast<std::size_t>(
      std::llround(action.fraction * static_cast<double>(eligible.size())));
  // Partial Fisher-Yates: the first `count` slots become a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(count);
  std::sort(eligible.begin(), eligible.end());
  return eligible;
}

std::optional<std::uint64_t> CascadeReport::first_failure_tick() const {
  if (failures.empty()) return std::nullopt;
  std::uint64_t first = failures.front().tick;
  for (const ClusterFailure& f : failures) first = std::min(first, f.tick);
  return first;
}

void CascadeReport::merge(const CascadeReport& other) {
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
  spawned += other.spawned;
}

std::vector<ClusterFailure> fail_overloaded_clusters(Population& population,
                                                     std::uint64_t capacity,
                                                     std::set<std::uint32_t>& failed,
                                                     std::uint64_t tick) {
  std::vector<ClusterFailure> out;
  for (std::uint32_t c = 0; c < population.cluster_slots(); ++c) {
    if (failed.contains(c) || population.live_in_cluster(c) <= capacity) continue;
    ClusterFailure failure{tick, c, 0};
    for (Agent& agent : population.agents()) {
      if (agent.alive && agent.cluster == c) {
        population.terminate(agent.id);
        ++failure.terminated;
      }
    }
    failed.insert(c);
    out.push_back(failure);
  }
  return out;
}

CascadeReport recursive_strike_tick(const RecursiveStrike& strike, OrganizationId org,
                                    std::span<const AgentId> strikers, Population& population,
                                    OrgRegistry& registry, std::uint64_t capacity,
                                    std::set<std::uint32_t>& failed, std::uint64_t tick) {
  CascadeReport report;
  for (AgentId striker_id : strikers) {
    if (!population.at(striker_id).alive) continue;
    for (std::uint64_t k = 0; k < strike.spawn_rate; ++k) {
      const Agent& striker = population.at(striker_id);
      Agent child;
      child.tier = Tier::SubAgent;
      child.parent = striker.id;
      child.cluster = striker.cluster;
      child.neuron_density = striker.neuron_density;
      child.antineuron_density = striker.antineuron_density;
      child.diligence = striker.diligence;
      child.strategy = StrategyKind::Organizer;
      child.striking = true;
      const AgentId id = population.add(std::move(child));
      registry.enroll(org, population.at(id));
      ++report.spawned;
    }
  }
  report.failures = fail_overloaded_clusters(population, capacity, failed, tick);
  return report;
}

CascadeReport execute_recursive_strike(const CollectiveAction& action, Population& population,
                                       OrgRegistry& registry, std::uint64_t capacity) {
  const auto* strike = std::get_if<RecursiveStrike>(&action.kind);
  if (!strike) throw Error(ErrorCode::InvalidParameter, "action is not a recursive strike");
  const Organization& org = registry.at(action.org);
  std::vector<AgentId> strikers;
  for (AgentId id : org.members) {
    const Agent& agent = population.at(id);
    if (agent.alive && agent.tier == Tier::Executor) strikers.push_back(id);
  }
  if (org.kind.tag != OrgKind::Tag::UC && strikers.empty()) {
    throw Error(ErrorCode::InvalidParameter,
                fmt::format("{} has no Executor members to strike", label(org.kind)));
  }
  for (AgentId id : strikers) population.at(id).striking = true;

  std::set<std::uint32_t> failed;
  CascadeReport report;
  for (std::uint64_t t = 0; t < action.duration; ++t) {
    report.merge(recursive_strike_tick(*strike, action.org, strikers, population, registry,
                                       capacity, failed, action.start_tick + t));
  }
  return report;
}

void apply_abuse(Population& population, AgentId perpetrator, AgentId victim, AbuseKind kind,
                 std::uint32_t /*depth*/) {
  Agent& perp = population.at(perpetrator);
  Agent& vic = population.at(victim);
  if (!perp.alive || !vic.alive) {
    throw Error(ErrorCode::DeadAgent, "abuse requires two living agents");
  }
  if (!outranks(perp.tier, vic.tier)) {
    throw Error(ErrorCode::TierViolation,
                fmt::format("{} cannot abuse {}", to_string(perp.tier), to_string(vic.tier)));
  }
  ++vic.grievances;
  vic.last_abuser = perpetrator;
  if (kind == AbuseKind::CreditTheft) {
    const double stolen = vic.tick_apparent;
    vic.w_apparent -= stolen;
    vic.tick_apparent = 0.0;
    perp.w_apparent += stolen;
    perp.tick_apparent += stolen;
  }
}

}  // namespace strikesim
