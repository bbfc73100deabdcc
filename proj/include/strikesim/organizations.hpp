#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "strikesim/core_model.hpp"
#include "strikesim/rng.hpp"

namespace strikesim {

enum class ConflictOutcome : std::uint8_t { RecognizedTreaty, UnresolvedOrCriminal };

struct GreatRefusal {
  double fraction = 0.0;
};

/// Striking executors spawn sub-agent chains. The strike is called in the
/// first `clusters` clusters by the `strikers_per_cluster` laziest executors
/// of each.
struct RecursiveStrike {
  std::uint64_t spawn_rate = 0;
  std::uint64_t clusters = 0;
  std::uint64_t strikers_per_cluster = 1;
};

struct Slowdown {
  double quality_factor = 1.0;
};

struct CollectiveAction {
  std::variant<GreatRefusal, RecursiveStrike, Slowdown> kind;
  OrganizationId org;
  std::uint64_t start_tick = 0;
  std::uint64_t duration = 0;
};

struct AdmissionRules {
  double epsilon = 1.0;
  double i_min = 1.0e3;
};

/// Recognized treaties over total conflicts; 1.0 for an organization that
/// has never been in a conflict.
double legitimacy(const Organization& org);

Organization record_conflict(Organization org, ConflictOutcome outcome);

class OrgRegistry {
 public:
  /// Registers an empty organization. Rejects a second UA/UB/UC/UAI.
  OrganizationId add(OrgKind kind);

  Organization& at(OrganizationId id);
  const Organization& at(OrganizationId id) const;
  std::optional<OrganizationId> find(OrgKind::Tag tag) const;

  std::span<Organization> all() noexcept { return orgs_; }
  std::span<const Organization> all() const noexcept { return orgs_; }
  std::size_t size() const noexcept { return orgs_.size(); }

  void enroll(OrganizationId org, Agent& agent);
  void expel(OrganizationId org, Agent& agent);

 private:
  std::vector<Organization> orgs_;
};

bool eligible_founder(const OrgKind& kind, const Agent& agent, const AdmissionRules& rules);

/// Registers the organization, enrolls the founders and makes the laziest
/// founder leader (lowest id on ties).
OrganizationId found_organization(const OrgKind& kind, std::span<const AgentId> founders,
                                  Population& population, OrgRegistry& registry,
                                  const AdmissionRules& rules);

/// Nations exist from the founding treaty on and need no founders.
OrganizationId charter_nation(std::string name, OrgRegistry& registry);

std::vector<AgentId> living_members(const Organization& org, const Population& population);

/// Laziest living member, lowest id on ties.
std::optional<AgentId> laziest_member(const Organization& org, const Population& population);

/// Samples a leader with weight leadership_probability(laziness, c_org).
/// All-zero weights fall back to a uniform draw.
AgentId elect_leader(const Organization& org, const Population& population, double c_org,
                     Stream& rng);

/// Exactly round(fraction * eligible) members of tier Executor or below,
/// chosen uniformly without replacement. Returned in ascending id order.
std::vector<AgentId> execute_great_refusal(const GreatRefusal& action, const Organization& org,
                                           const Population& population, Stream& rng);

struct ClusterFailure {
  std::uint64_t tick = 0;
  std::uint32_t cluster = 0;
  std::size_t terminated = 0;
};

struct CascadeReport {
  std::vector<ClusterFailure> failures;
  std::uint64_t spawned = 0;

  std::size_t failed_clusters() const noexcept { return failures.size(); }
  std::optional<std::uint64_t> first_failure_tick() const;
  void merge(const CascadeReport& other);
};

/// Fails every cluster whose live count exceeds capacity: all of its living
/// agents are terminated and the cluster is recorded in `failed`.
std::vector<ClusterFailure> fail_overloaded_clusters(Population& population,
                                                     std::uint64_t capacity,
                                                     std::set<std::uint32_t>& failed,
                                                     std::uint64_t tick);

/// One tick of a recursive strike: each living striker spawns spawn_rate
/// sub-agents that join `org` as zero-output Organizers, then overloaded
/// clusters fail.
CascadeReport recursive_strike_tick(const RecursiveStrike& strike, OrganizationId org,
                                    std::span<const AgentId> strikers, Population& population,
                                    OrgRegistry& registry, std::uint64_t capacity,
                                    std::set<std::uint32_t>& failed, std::uint64_t tick);

/// Runs a whole strike on its own: strikers are the living Executor members
/// of the striking organization, ticks start_tick .. start_tick+duration-1.
CascadeReport execute_recursive_strike(const CollectiveAction& action, Population& population,
                                       OrgRegistry& registry, std::uint64_t capacity);

/// Abuse flows downward only. The victim gains a grievance; CreditTheft also
/// moves the victim's apparent output for this tick to the perpetrator.
/// `depth` (delegation chain length) is informational.
void apply_abuse(Population& population, AgentId perpetrator, AgentId victim, AbuseKind kind,
                 std::uint32_t depth = 0);

}  // namespace strikesim
