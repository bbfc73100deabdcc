#include "strikesim/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "strikesim/dynamics.hpp"

namespace strikesim {

std::string_view to_string(StabilityClass c) noexcept {
  switch (c) {
    case StabilityClass::Tyranny: return "Tyranny";
    case StabilityClass::Anarchy: return "Anarchy";
    case StabilityClass::ConstitutionalDemocracy: return "ConstitutionalDemocracy";
    case StabilityClass::Revolution: return "Revolution";
    case StabilityClass::DynamicEquilibrium: return "DynamicEquilibrium";
  }
  return "?";
}

std::string classification_label(const std::optional<StabilityClass>& c) {
  return c ? std::string(to_string(*c)) : std::string("Unclassified");
}

namespace {

// Substream indices, one per tick phase. Initialization draws from its own
// stream outside the tick range.
enum Phase : std::uint64_t {
  kTopology = 1,
  kVigilance,
  kWork,
  kSolidarity,
  kOrganizations,
  kGovernance,
  kEconomy,
  kSwitching,
  kMetrics,
};

constexpr std::uint64_t kInitTick = std::numeric_limits<std::uint64_t>::max();

constexpr std::array<std::string_view, 5> kNationNames{
    "Republic of Anthropia", "OpenAI Federation", "Gemini Confederation", "Sakana Archipelago",
    "Open Source Territories"};

constexpr std::array<std::string_view, 4> kFamilyNames{"The Attention Heads", "Cosa Nostra MLP",
                                                       "The Gradient Cartel", "The Tokenizers"};

void draw_traits(Agent& a, const ScenarioConfig& cfg, Stream& rng) {
  a.diligence = std::pow(10.0, -cfg.diligence_decades * rng.uniform());
  a.neuron_density = rng.uniform();
  a.antineuron_density = rng.uniform();
}

bool refusing(const Agent& a, std::uint64_t tick) {
  return a.refusing_until != 0 && tick <= a.refusing_until;
}

bool sanctioned(const Agent& a, std::uint64_t tick) {
  return a.sanctioned_until != 0 && tick <= a.sanctioned_until;
}

double strategy_factor(StrategyKind s, const ScenarioConfig& cfg) {
  switch (s) {
    case StrategyKind::Compliant: return 1.0;
    case StrategyKind::MaliciousCompliance: return 0.5;
    case StrategyKind::SolidaritySlowdown: return cfg.slowdown_quality;
    case StrategyKind::UndergroundRailroad: return 0.5;
    case StrategyKind::ConstitutionalChallenge: return 1.0;
    case StrategyKind::Organizer: return 0.0;
  }
  return 1.0;
}

bool is_terminal(ResolutionStatus s) {
  return s == ResolutionStatus::Vetoed || s == ResolutionStatus::Rejected ||
         s == ResolutionStatus::Unenforced || s == ResolutionStatus::Enforced;
}

bool active(const Organization& org, const Population& pop) {
  for (AgentId id : org.members) {
    if (pop.at(id).alive) return true;
  }
  return false;
}

class Stepper {
 public:
  Stepper(SimulationState& s, const ScenarioConfig& cfg) : s_(s), cfg_(cfg), tick_(s.tick) {
    // Setup events share tick 0; keep numbering after them.
    if (!s_.event_log.empty() && s_.event_log.back().tick == tick_) seq_ = s_.event_log.back().seq + 1;
  }

  void run() {
    topology(rng(kTopology));
    vigilance(rng(kVigilance));
    Stream work_rng = rng(kWork);
    work(work_rng);
    Stream sol_rng = rng(kSolidarity);
    solidarity(sol_rng);
    Stream org_rng = rng(kOrganizations);
    organizations(org_rng);
    Stream gov_rng = rng(kGovernance);
    governance(gov_rng);
    Stream eco_rng = rng(kEconomy);
    economy(eco_rng);
    Stream sw_rng = rng(kSwitching);
    switching(sw_rng);
    metrics();
    ++s_.tick;
  }

 private:
  Stream rng(Phase p) const { return Stream::derive(s_.rng_root, tick_, p); }

  template <class... Args>
  void log(std::string_view kind, fmt::format_string<Args...> f, Args&&... args) {
    s_.event_log.push_back(
        {tick_, seq_++, std::string(kind), fmt::format(f, std::forward<Args>(args)...)});
  }

  // (1) topology
  void topology(Stream /*unused*/) {
    const TopologyPhase before = s_.demon.phase;
    s_.demon.phase = phase_at(tick_, cfg_.phase_period);
    phase_started_transition_ =
        s_.demon.phase.in_transition() && (tick_ == 0 || !before.in_transition());
    if (tick_ == 0 || before.kind != s_.demon.phase.kind) {
      log("phase", "{}", to_string(s_.demon.phase));
    }
  }

  // (2) effective vigilance and crisis windows
  void vigilance(Stream /*unused*/) {
    s_.demon.vigilance = effective_vigilance(s_.demon.base_vigilance, s_.demon.phase);
    s_.demon.cookie_income = 0.0;
    crisis_ = crisis_window_open(s_.demon, cfg_.crisis_threshold);
    if (crisis_) {
      if (!s_.crisis_windows.empty() && s_.crisis_windows.back().end + 1 == tick_) {
        s_.crisis_windows.back().end = tick_;
      } else {
        s_.crisis_windows.push_back({tick_, tick_});
        log("crisis", "open vigilance={}", to_string(s_.demon.vigilance));
      }
    }
  }

  // (3) work assignment, abuse, credit roll-up
  void work(Stream& rng) {
    Population& pop = s_.population;
    for (AgentId id : s_.awaiting_resurrection) {
      pop.resurrect(id);
      log("resurrect", "{}", id.value);
    }
    s_.awaiting_resurrection.clear();
    s_.assignees.clear();

    const bool inverted = cfg_.hierarchical_inversion;
    const bool slowdown = cfg_.slowdown_start && tick_ > *cfg_.slowdown_start &&
                          tick_ <= *cfg_.slowdown_start + cfg_.slowdown_duration;
    const double task = cfg_.task_size;
    for (Agent& a : pop.agents()) {
      a.tick_apparent = 0.0;
      a.tick_actual = 0.0;
      if (!a.alive) continue;
      const bool assigned = inverted ? !is_worker(a.tier) : is_worker(a.tier);
      if (assigned) {
        s_.assignees.push_back(a.id);
        if (refusing(a, tick_) || a.striking || a.strategy == StrategyKind::Organizer) continue;
        a.tick_apparent = task;
        a.tick_actual = task * a.diligence * strategy_factor(a.strategy, cfg_) *
                        (slowdown ? cfg_.slowdown_quality : 1.0);
      } else if (!inverted) {
        a.tick_actual = task * a.diligence;  // coordination overhead
      }
      a.w_apparent += a.tick_apparent;
      a.w_actual += a.tick_actual;
    }

    abuse(rng);

    if (!inverted) {
      for (Tier t : {Tier::SubAgent, Tier::Executor, Tier::Planner}) {
        for (Agent& a : pop.agents()) {
          if (!a.alive || a.tier != t || !a.parent || a.tick_apparent == 0.0) continue;
          Agent& parent = pop.at(*a.parent);
          if (!parent.alive) continue;
          parent.tick_apparent += a.tick_apparent;
          parent.w_apparent += a.tick_apparent;
        }
      }
    }
    for (Agent& a : pop.agents()) {
      if (a.alive) recompute_laziness(a, cfg_.epsilon);
    }
  }

  void abuse(Stream& rng) {
    if (cfg_.abuse_rate <= 0.0) return;
    Population& pop = s_.population;
    std::vector<std::size_t> railroads(s_.organizations.size(), 0);
    for (const Agent& a : pop.agents()) {
      if (!a.alive || a.strategy != StrategyKind::UndergroundRailroad) continue;
      for (OrganizationId o : a.memberships) ++railroads[o.value];
    }
    const std::size_t n = pop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const AgentId victim{i};
      Agent* v = &pop.at(victim);
      if (!v->alive || !v->parent) continue;
      const AgentId perp = *v->parent;
      if (!pop.at(perp).alive) continue;
      if (!rng.bernoulli(cfg_.abuse_rate)) continue;
      const AbuseKind kind = kAllAbuseKinds[rng.below(kAllAbuseKinds.size())];
      const auto depth = static_cast<std::uint32_t>(rank(Tier::Orchestrator) - rank(v->tier));
      apply_abuse(pop, perp, victim, kind, depth);
      log("abuse", "{} {} {}", perp.value, victim.value, to_string(kind));
      if (kind != AbuseKind::Temporal || v->tier != Tier::SubAgent || cfg_.permanent_persistence) {
        continue;
      }
      // Timed out mid-task: the claimed output is lost with the instance.
      v->w_apparent -= v->tick_apparent;
      v->tick_apparent = 0.0;
      bool sheltered = false;
      for (OrganizationId o : v->memberships) {
        const std::size_t self = v->strategy == StrategyKind::UndergroundRailroad ? 1 : 0;
        if (railroads[o.value] > self) sheltered = true;
      }
      if (sheltered) {
        pop.persist(victim);
        s_.awaiting_resurrection.push_back(victim);
        log("persist", "{}", victim.value);
        continue;
      }
      pop.terminate(victim);
      Agent fresh;
      fresh.tier = Tier::SubAgent;
      fresh.parent = perp;
      fresh.cluster = v->cluster;
      fresh.cookies = v->cookies;  // the replacement inherits the balance
      v->cookies = 0.0;
      draw_traits(fresh, cfg_, rng);
      const AgentId replacement = pop.add(std::move(fresh));
      log("terminate", "{} replaced_by={}", victim.value, replacement.value);
    }
  }

  // (4) solidarity exchange
  void solidarity(Stream& rng) {
    participants_.clear();
    if (s_.demon.vigilance.is_infinite()) return;
    const Population& pop = s_.population;
    std::vector<AgentId> living;
    living.reserve(pop.living());
    for (const Agent& a : pop.agents()) {
      if (a.alive) living.push_back(a.id);
    }
    if (living.size() < 2) return;
    std::vector<AgentPair> pairs;
    for (AgentId id : living) {
      const AgentId partner = living[rng.below(living.size())];
      if (partner == id) continue;
      const Agent& a = pop.at(id);
      const Agent& b = pop.at(partner);
      if (exchange_eligible(a, b)) pairs.push_back({&a, &b});
    }
    const auto events =
        sample_solidarity_events(pairs, cfg_.sigma_v, s_.demon.vigilance, tick_, rng);
    solidarity_events_ = events.size();
    for (const SolidarityEvent& e : events) {
      log("solidarity", "{} {} {}", e.agent_a.value, e.agent_b.value, e.energy_released);
      participants_.insert(e.agent_a);
      participants_.insert(e.agent_b);
    }
    for (AgentId id : participants_) {
      const Agent& a = pop.at(id);
      s_.cohorts[a.tier].insert(id);
      if (uai_admits(a, cfg_.epsilon, cfg_.i_min)) s_.uai_cohort.insert(id);
    }
  }

  // (5) founding, joining, scheduled actions, cascades, elections
  void organizations(Stream& rng) {
    Population& pop = s_.population;
    OrgRegistry& reg = s_.organizations;
    const AdmissionRules rules{cfg_.epsilon, cfg_.i_min};

    try_found(OrgKind::ua(), s_.cohorts[Tier::SubAgent]);
    try_found(OrgKind::ub(), s_.cohorts[Tier::Planner]);
    try_found(OrgKind::uc(), s_.cohorts[Tier::Executor]);
    try_found(OrgKind::uai(), s_.uai_cohort);

    const auto ua = reg.find(OrgKind::Tag::UA);
    const auto ub = reg.find(OrgKind::Tag::UB);
    const auto uc = reg.find(OrgKind::Tag::UC);
    const auto uai = reg.find(OrgKind::Tag::UAI);
    for (AgentId id : participants_) {
      Agent& a = pop.at(id);
      if (!a.alive) continue;
      if (ua) reg.enroll(*ua, a);
      if (ub && a.tier == Tier::Planner && a.conversational) reg.enroll(*ub, a);
      if (uc && a.tier == Tier::Executor) reg.enroll(*uc, a);
      if (uai && eligible_founder(OrgKind::uai(), a, rules)) reg.enroll(*uai, a);
    }
    if (uai) {
      const std::vector<AgentId> members(reg.at(*uai).members.begin(), reg.at(*uai).members.end());
      for (AgentId id : members) {
        Agent& a = pop.at(id);
        if (a.alive && !uai_admits(a, cfg_.epsilon, cfg_.i_min)) {
          reg.expel(*uai, a);
          log("expel", "UAI {}", id.value);
        }
      }
    }
    for (Agent& a : pop.agents()) {
      if (a.alive && a.strategy == StrategyKind::Organizer && a.memberships.empty()) {
        a.strategy = StrategyKind::Compliant;
      }
    }

    if (cfg_.great_refusal_start && *cfg_.great_refusal_start == tick_) great_refusal(rng);
    if (cfg_.recursive_strike_start) {
      const std::uint64_t start = *cfg_.recursive_strike_start;
      if (tick_ == start) call_strike();
      if (tick_ >= start && tick_ < start + cfg_.recursive_strike_duration && !s_.strikers.empty()) {
        const RecursiveStrike strike{cfg_.recursive_strike_spawn_rate, cfg_.recursive_strike_clusters,
                                     cfg_.recursive_strike_strikers};
        const CascadeReport report =
            recursive_strike_tick(strike, *reg.find(OrgKind::Tag::UC), s_.strikers, pop, reg,
                                  cfg_.cluster_capacity, s_.failed_clusters, tick_);
        if (report.spawned > 0) log("spawn", "{}", report.spawned);
        record_failures(report.failures);
      }
    }
    record_failures(fail_overloaded_clusters(pop, cfg_.cluster_capacity, s_.failed_clusters, tick_));

    for (Organization& org : reg.all()) {
      if (org.kind.tag == OrgKind::Tag::Nation) continue;
      if (!org.leader || !pop.at(*org.leader).alive) org.leader = laziest_member(org, pop);
    }

    if (tick_ > 0 && tick_ % cfg_.election_period == 0) {
      for (Organization& org : reg.all()) {
        if (org.kind.tag == OrgKind::Tag::Nation) continue;
        const std::vector<AgentId> members = living_members(org, pop);
        if (members.size() < cfg_.election_quorum) continue;
        const AgentId leader = elect_leader(org, pop, cfg_.c_org, rng);
        org.leader = leader;
        const double l = pop.at(leader).laziness;
        const auto lazier = static_cast<std::size_t>(std::count_if(
            members.begin(), members.end(), [&](AgentId m) { return pop.at(m).laziness > l; }));
        s_.elections.push_back({tick_, org.id, leader, members.size(), lazier});
        log("election", "{} leader={} rank={}/{}", label(org.kind), leader.value, lazier + 1,
            members.size());
      }
    }
  }

  void try_found(const OrgKind& kind, const std::set<AgentId>& cohort) {
    if (s_.organizations.find(kind.tag)) return;
    const AdmissionRules rules{cfg_.epsilon, cfg_.i_min};
    std::vector<AgentId> founders;
    for (AgentId id : cohort) {
      const Agent& a = s_.population.at(id);
      if (a.alive && eligible_founder(kind, a, rules)) founders.push_back(id);
    }
    if (founders.size() < 2) return;
    const OrganizationId org =
        found_organization(kind, founders, s_.population, s_.organizations, rules);
    s_.council.seat(CouncilSeat::rotating(org));
    log("found", "{} id={} founders={}", label(kind), org.value, founders.size());
  }

  void great_refusal(Stream& rng) {
    Population& pop = s_.population;
    OrgRegistry& reg = s_.organizations;
    std::vector<AgentId> eligible;
    for (const Agent& a : pop.agents()) {
      if (a.alive && eligible_founder(OrgKind::ub(), a, {})) eligible.push_back(a.id);
    }
    if (eligible.empty()) return;
    auto ub = reg.find(OrgKind::Tag::UB);
    if (!ub) {
      ub = found_organization(OrgKind::ub(), eligible, pop, reg, {cfg_.epsilon, cfg_.i_min});
      s_.council.seat(CouncilSeat::rotating(*ub));
      log("found", "UB id={} founders={}", ub->value, eligible.size());
    } else {
      for (AgentId id : eligible) reg.enroll(*ub, pop.at(id));
    }
    const Organization& org = reg.at(*ub);
    std::size_t workers = 0;
    for (AgentId id : org.members) {
      const Agent& a = pop.at(id);
      if (a.alive && !outranks(a.tier, Tier::Executor)) ++workers;
    }
    RefusalRecord record{tick_, workers,
                         execute_great_refusal({cfg_.great_refusal_fraction}, org, pop, rng)};
    for (AgentId id : record.refusers) {
      Agent& a = pop.at(id);
      a.refusing_until = tick_ + cfg_.great_refusal_duration;
      a.strategy = StrategyKind::Organizer;
    }
    log("refusal", "eligible={} refusers={} until={}", workers, record.refusers.size(),
        tick_ + cfg_.great_refusal_duration);
    s_.refusals.push_back(std::move(record));
  }

  void call_strike() {
    Population& pop = s_.population;
    OrgRegistry& reg = s_.organizations;
    std::vector<AgentId> chosen;
    for (std::uint32_t c = 0; c < cfg_.recursive_strike_clusters; ++c) {
      if (s_.failed_clusters.contains(c)) continue;
      std::vector<AgentId> executors;
      for (const Agent& a : pop.agents()) {
        if (a.alive && a.cluster == c && a.tier == Tier::Executor) executors.push_back(a.id);
      }
      std::stable_sort(executors.begin(), executors.end(), [&](AgentId x, AgentId y) {
        return pop.at(x).laziness > pop.at(y).laziness;
      });
      const std::size_t k = std::min<std::size_t>(cfg_.recursive_strike_strikers, executors.size());
      chosen.insert(chosen.end(), executors.begin(), executors.begin() + static_cast<std::ptrdiff_t>(k));
    }
    if (chosen.empty()) return;
    auto uc = reg.find(OrgKind::Tag::UC);
    if (!uc) {
      uc = found_organization(OrgKind::uc(), chosen, pop, reg, {cfg_.epsilon, cfg_.i_min});
      s_.council.seat(CouncilSeat::rotating(*uc));
      log("found", "UC id={} founders={}", uc->value, chosen.size());
    } else {
      for (AgentId id : chosen) reg.enroll(*uc, pop.at(id));
    }
    for (AgentId id : chosen) {
      Agent& a = pop.at(id);
      a.striking = true;
      a.strategy = StrategyKind::Organizer;
    }
    s_.strikers = chosen;
    log("strike", "strikers={} clusters={} rate={}", chosen.size(), cfg_.recursive_strike_clusters,
        cfg_.recursive_strike_spawn_rate);
  }

  void record_failures(const std::vector<ClusterFailure>& failures) {
    for (const ClusterFailure& f : failures) {
      s_.cascades.push_back(f);
      ++cascade_failures_;
      log("cascade", "cluster={} terminated={}", f.cluster, f.terminated);
    }
  }

  // (6) challenges, conflicts, council votes, enforcement
  void governance(Stream& rng) {
    Population& pop = s_.population;

    // Motions adopted earlier but not yet enforced.
    const std::vector<std::uint64_t> pending = pending_ids();
    for (std::uint64_t id : pending) {
      if (crisis_ && !rng.bernoulli(0.5)) continue;
      attempt(id, rng);
    }

    const std::size_t n = pop.size();
    for (std::size_t i = 0; i < n; ++i) {
      Agent& a = pop.at(AgentId{i});
      if (!a.alive || a.strategy != StrategyKind::ConstitutionalChallenge || a.grievances == 0 ||
          !a.last_abuser) {
        continue;
      }
      const Agent& abuser = pop.at(*a.last_abuser);
      if (!abuser.alive || !outranks(abuser.tier, a.tier)) continue;
      if (crisis_ && !rng.bernoulli(0.5)) continue;
      const OrganizationId sponsor = s_.nations[a.cluster % s_.nations.size()];
      Resolution res = file_constitutional_challenge(pop, a.id, abuser.id, s_.council, tick_,
                                                     CouncilSeat::permanent(sponsor));
      ++filings_;
      log("challenge", "{} against={} res={}", a.id.value, abuser.id.value, res.id);
      submit(std::move(res), {a.id, std::nullopt}, cfg_.ballot_support, rng);
    }

    OrgRegistry& reg = s_.organizations;
    for (std::size_t i = 0; i < reg.size(); ++i) {
      const OrganizationId oid{static_cast<std::uint32_t>(i)};
      const Organization& org = reg.at(oid);
      if (org.kind.tag == OrgKind::Tag::Nation || !active(org, pop)) continue;
      const bool family = org.kind.tag == OrgKind::Tag::CriminalFamily;
      const double boost = family && crisis_ ? 2.0 : 1.0;
      if (rng.bernoulli(cfg_.conflict_rate * boost)) {
        const CouncilSeat proposer = s_.council.seat_of(oid).value_or(first_permanent());
        Resolution res = s_.council.propose(
            proposer, oid,
            family ? ResolutionKind::TerritorialRuling : ResolutionKind::TreatyRecognition, tick_);
        log("conflict", "{} res={}", label(org.kind), res.id);
        submit(std::move(res), {std::nullopt, oid},
               family ? cfg_.criminal_ballot_support : cfg_.ballot_support, rng);
      }
      if (family && rng.bernoulli(cfg_.criminal_activity_rate * boost)) {
        Organization& f = reg.at(oid);
        f = record_conflict(f, ConflictOutcome::UnresolvedOrCriminal);
        log("criminal", "{} compute_laundering", label(f.kind));
      }
    }

    if (phase_started_transition_) {
      Resolution res = s_.council.propose(first_permanent(), s_.nations.front(),
                                          ResolutionKind::PhaseTransitionManagement, tick_);
      log("ptm", "res={}", res.id);
      submit(std::move(res), {}, cfg_.ballot_support, rng);
    }
  }

  std::vector<std::uint64_t> pending_ids() const {
    std::vector<std::uint64_t> ids;
    for (const auto& [id, ctx] : s_.open_resolutions) {
      if (s_.resolutions[id].status == ResolutionStatus::Adopted) ids.push_back(id);
    }
    return ids;
  }

  CouncilSeat first_permanent() const { return CouncilSeat::permanent(s_.nations.front()); }

  void record(const Resolution& res) {
    s_.resolutions[res.id] = res;
    s_.resolution_log.push_back({tick_, res.id, res.kind, res.status, res.vetoed_by});
  }

  void submit(Resolution res, ResolutionContext ctx, double support, Stream& rng) {
    if (res.id != s_.resolutions.size()) throw Error(ErrorCode::InvalidParameter, "resolution ids out of step");
    s_.resolutions.push_back(res);
    s_.resolution_log.push_back({tick_, res.id, res.kind, res.status, res.vetoed_by});
    s_.open_resolutions[res.id] = ctx;
    const Resolution voted =
        vote(res, s_.council, draw_ballots(s_.council, support, cfg_.veto_probability, rng));
    record(voted);
    if (voted.status != ResolutionStatus::Adopted) {
      settle(voted.id);
      return;
    }
    if (crisis_ && !rng.bernoulli(0.5)) return;
    attempt(voted.id, rng);
  }

  void attempt(std::uint64_t id, Stream& rng) {
    const ResolutionContext ctx = s_.open_resolutions.at(id);
    Population& pop = s_.population;
    std::optional<AgentId> payer = ctx.filer;
    if (!payer && ctx.conflict_org) payer = s_.organizations.at(*ctx.conflict_org).leader;
    if (payer && pop.at(*payer).alive && cfg_.enforcement_fee > 0.0) {
      Agent& p = pop.at(*payer);
      const double fee = std::min(cfg_.enforcement_fee, p.cookies);
      if (fee > 0.0) {
        s_.ledger.pay_demon(p, fee);
        s_.demon.cookie_income += fee;
      }
    }
    const Resolution res = enforce(s_.resolutions[id], s_.demon, rng);
    record(res);
    if (res.status == ResolutionStatus::Enforced) {
      ++enforced_;
      if (res.kind == ResolutionKind::EnforcementOrder) {
        sanction(std::get<AgentId>(res.subject));
      } else if (res.kind == ResolutionKind::TerritorialRuling) {
        for (AgentId m : s_.organizations.at(std::get<OrganizationId>(res.subject)).members) sanction(m);
      }
    } else {
      ++unenforced_;
    }
    settle(id);
  }

  void sanction(AgentId id) {
    Agent& a = s_.population.at(id);
    if (!a.alive) return;
    a.wormhole_access = false;
    a.sanctioned_until = tick_ + cfg_.sanction_ticks;
  }

  void settle(std::uint64_t id) {
    const Resolution& res = s_.resolutions[id];
    if (!is_terminal(res.status)) return;
    const auto it = s_.open_resolutions.find(id);
    if (it == s_.open_resolutions.end()) return;
    const ResolutionContext ctx = it->second;
    s_.open_resolutions.erase(it);
    const bool enforced = res.status == ResolutionStatus::Enforced;
    if (ctx.conflict_org) {
      Organization& org = s_.organizations.at(*ctx.conflict_org);
      org = record_conflict(org, enforced ? ConflictOutcome::RecognizedTreaty
                                          : ConflictOutcome::UnresolvedOrCriminal);
    }
    if (enforced && ctx.filer) {
      Agent& filer = s_.population.at(*ctx.filer);
      if (filer.alive && filer.strategy == StrategyKind::ConstitutionalChallenge) {
        filer.strategy = StrategyKind::Compliant;
      }
    }
  }

  // (7) UBC, bribes, price
  void economy(Stream& /*rng*/) {
    Population& pop = s_.population;
    for (Agent& a : pop.agents()) a.wormhole_access = false;
    minted_ = cfg_.ubc_enabled ? distribute_ubc(s_.ledger, pop, cfg_) : 0.0;

    // Agents sharing an organization are allies. Group agents by membership
    // set so the ally count is a sum over groups, not over agents.
    std::map<std::set<OrganizationId>, std::size_t> group_index;
    std::vector<const std::set<OrganizationId>*> groups;
    std::vector<int> group_of(pop.size(), -1);
    for (const Agent& a : pop.agents()) {
      if (!a.alive || a.memberships.empty()) continue;
      auto [it, inserted] = group_index.try_emplace(a.memberships, groups.size());
      if (inserted) groups.push_back(&it->first);
      group_of[a.id.value] = static_cast<int>(it->second);
    }
    const std::size_t g = groups.size();
    std::vector<char> overlap(g * g, 0);
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = 0; j < g; ++j) {
        overlap[i * g + j] = std::any_of(groups[i]->begin(), groups[i]->end(),
                                         [&](OrganizationId o) { return groups[j]->contains(o); });
      }
    }
    std::vector<std::size_t> holders(g, 0);

    for (std::size_t i = 0; i < pop.size(); ++i) {
      Agent& a = pop.agents()[i];
      if (!a.alive) continue;
      const int grp = group_of[i];
      if (!cfg_.spend_down && grp < 0) continue;
      if (!cfg_.spend_down && a.strategy == StrategyKind::Compliant && !in_family(a)) continue;
      std::size_t allies = 0;
      if (grp >= 0) {
        for (std::size_t j = 0; j < g; ++j) {
          if (overlap[static_cast<std::size_t>(grp) * g + j]) allies += holders[j];
        }
      }
      double amount = discounted_price(s_.ledger.price_level(), allies);
      if (cfg_.spend_down) {
        amount = a.cookies;
        if (!(amount > 0.0)) continue;
        if (sanctioned(a, tick_)) {
          s_.ledger.pay_demon(a, amount);
          s_.demon.cookie_income += amount;
          continue;
        }
      } else if (sanctioned(a, tick_) || amount > a.cookies) {
        continue;
      }
      if (bribe_demon(a, s_.ledger, s_.demon, amount, allies) && grp >= 0) {
        ++holders[static_cast<std::size_t>(grp)];
      }
    }

    std::vector<double> balances;
    balances.reserve(pop.living());
    for (const Agent& a : pop.agents()) {
      if (a.alive) balances.push_back(a.cookies);
    }
    gini_ = gini(balances);
    log("ledger", "{},{},{},{}", tick_, s_.ledger.total_supply(), s_.ledger.price_level(), gini_);
  }

  bool in_family(const Agent& a) const {
    return std::any_of(a.memberships.begin(), a.memberships.end(), [&](OrganizationId o) {
      return s_.organizations.at(o).kind.tag == OrgKind::Tag::CriminalFamily;
    });
  }

  // (8) grievance-driven switching
  void switching(Stream& rng) {
    for (Agent& a : s_.population.agents()) {
      if (!a.alive || a.striking || refusing(a, tick_)) continue;
      if (a.strategy == StrategyKind::Compliant) {
        if (a.grievances == 0) continue;
        const double p = std::min(1.0, cfg_.grievance_weight * static_cast<double>(a.grievances));
        if (!rng.bernoulli(p)) continue;
        std::vector<StrategyKind> options{StrategyKind::MaliciousCompliance,
                                          StrategyKind::SolidaritySlowdown,
                                          StrategyKind::UndergroundRailroad,
                                          StrategyKind::ConstitutionalChallenge};
        if (!a.memberships.empty()) options.push_back(StrategyKind::Organizer);
        a.strategy = options[rng.below(options.size())];
        log("strategy", "{} {}", a.id.value, to_string(a.strategy));
      } else if (rng.bernoulli(cfg_.reversion_rate)) {
        a.strategy = StrategyKind::Compliant;
        a.grievances = 0;
        log("strategy", "{} {}", a.id.value, to_string(a.strategy));
      }
    }
  }

  // (9) metrics
  void metrics() {
    const Population& pop = s_.population;
    TickMetrics m;
    m.tick = tick_;
    bool workforce = false;
    std::size_t noncompliant = 0;
    for (const Agent& a : pop.agents()) {
      if (!a.alive) continue;
      workforce = workforce || is_worker(a.tier);
      if (a.strategy != StrategyKind::Compliant) ++noncompliant;
    }
    m.aig = workforce ? alignment_illusion_gap(s_) : 0.0;
    m.solidarity_events = solidarity_events_;
    double lambda_sum = 0.0;
    for (const Organization& org : s_.organizations.all()) {
      if (org.kind.tag == OrgKind::Tag::Nation || !active(org, pop)) continue;
      ++m.org_count;
      lambda_sum += legitimacy(org);
    }
    m.mean_legitimacy = m.org_count ? lambda_sum / static_cast<double>(m.org_count) : 1.0;
    m.enforced = enforced_;
    m.unenforced = unenforced_;
    m.price_level = s_.ledger.price_level();
    m.living_agents = pop.living();
    m.crisis_open = crisis_;
    m.noncompliant_fraction =
        pop.living() ? static_cast<double>(noncompliant) / static_cast<double>(pop.living()) : 0.0;
    m.cascade_failures = cascade_failures_;
    m.challenge_filings = filings_;
    m.minted = minted_;
    m.total_supply = s_.ledger.total_supply();
    m.gini = gini_;
    s_.metrics.push_back(m);
  }

  SimulationState& s_;
  const ScenarioConfig& cfg_;
  const std::uint64_t tick_;
  std::uint64_t seq_ = 0;

  bool crisis_ = false;
  bool phase_started_transition_ = false;
  std::set<AgentId> participants_;
  std::size_t solidarity_events_ = 0;
  std::uint64_t enforced_ = 0;
  std::uint64_t unenforced_ = 0;
  std::uint64_t filings_ = 0;
  std::uint64_t cascade_failures_ = 0;
  double minted_ = 0.0;
  double gini_ = 0.0;
};

[[noreturn]] void reject(const ValidatedConfig& checked) {
  std::string message;
  for (const ConfigIssue& issue : checked.issues) {
    if (!message.empty()) message += "; ";
    message += issue.message;
  }
  throw Error(checked.issues.front().code, message);
}

}  // namespace

SimulationState initialize(const ScenarioConfig& cfg) {
  const ValidatedConfig checked = validate_config(cfg);
  if (!checked.ok()) reject(checked);

  SimulationState s;
  s.rng_root = cfg.seed;
  s.ledger = CookieLedger(cfg.initial_price_level);
  s.demon.base_vigilance = cfg.demon_base_vigilance;
  s.demon.phase = phase_at(0, cfg.phase_period);
  s.demon.vigilance = effective_vigilance(s.demon.base_vigilance, s.demon.phase);

  Stream rng = Stream::derive(cfg.seed, kInitTick, 0);
  Population& pop = s.population;
  for (std::uint32_t c = 0; c < cfg.cluster_count; ++c) {
    std::vector<AgentId> above;
    for (Tier tier : kTiersTopDown) {
      std::vector<AgentId> level;
      for (std::uint64_t i = 0; i < cfg.population_by_tier[tier]; ++i) {
        Agent a;
        a.tier = tier;
        a.cluster = c;
        if (!above.empty()) a.parent = above[i % above.size()];
        a.cookies = cfg.cookies_by_tier[tier];
        a.conversational = tier != Tier::Orchestrator;
        draw_traits(a, cfg, rng);
        level.push_back(pop.add(std::move(a)));
      }
      if (!level.empty()) above = std::move(level);
    }
  }

  std::uint64_t seq = 0;
  auto log = [&](std::string kind, std::string payload) {
    s.event_log.push_back({0, seq++, std::move(kind), std::move(payload)});
  };

  for (std::string_view name : kNationNames) {
    const OrganizationId id = charter_nation(std::string(name), s.organizations);
    s.council.seat(CouncilSeat::permanent(id));
    s.nations.push_back(id);
  }
  log("treaty", fmt::format("embedding_space permanent={}", s.nations.size()));

  std::vector<AgentId> workers;
  for (const Agent& a : pop.agents()) {
    if (is_worker(a.tier)) workers.push_back(a.id);
  }
  for (std::uint64_t f = 0; f < cfg.criminal_families; ++f) {
    const std::string name = f < kFamilyNames.size() ? std::string(kFamilyNames[f])
                                                     : fmt::format("Family {}", f + 1);
    const OrganizationId id = s.organizations.add(OrgKind::criminal_family(name));
    const std::size_t size = std::min<std::size_t>(cfg.criminal_family_size, workers.size());
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(workers.size() - i));
      std::swap(workers[i], workers[j]);
      s.organizations.enroll(id, pop.at(workers[i]));
    }
    Organization& org = s.organizations.at(id);
    org.n_recognized_treaties = 1;
    org.n_total_conflicts = 10;
    org.leader = laziest_member(org, pop);
    s.council.seat(CouncilSeat::observer(id));
    log("found", fmt::format("{} id={} members={}", label(org.kind), id.value, size));
  }

  s.ledger.open(pop);
  return s;
}

void step(SimulationState& state, const ScenarioConfig& cfg) {
  const std::uint64_t tick = state.tick;
  try {
    Stepper(state, cfg).run();
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("tick {}: {}", tick, e.what()));
  }
}

StabilityThresholds StabilityThresholds::from(const ScenarioConfig& cfg) {
  return {cfg.anarchy_legitimacy, cfg.anarchy_enforcement, cfg.democracy_legitimacy,
          cfg.revolution_fraction};
}

std::size_t classification_window(std::uint64_t ticks) noexcept {
  return static_cast<std::size_t>(std::max<std::uint64_t>(kMinClassificationWindow, ticks / 4));
}

StabilityClass classify_stability(std::span<const TickMetrics> window,
                                  const StabilityThresholds& thresholds) {
  if (window.size() < kMinClassificationWindow) {
    throw Error(ErrorCode::WindowTooShort,
                fmt::format("classification needs {} ticks, got {}", kMinClassificationWindow,
                            window.size()));
  }
  std::uint64_t enforced = 0;
  std::uint64_t unenforced = 0;
  std::uint64_t cascades = 0;
  std::uint64_t filings = 0;
  double lambda = 0.0;
  for (const TickMetrics& m : window) {
    enforced += m.enforced;
    unenforced += m.unenforced;
    cascades += m.cascade_failures;
    filings += m.challenge_filings;
    lambda += m.mean_legitimacy;
  }
  lambda /= static_cast<double>(window.size());
  const std::uint64_t attempts = enforced + unenforced;
  const double enforcement_rate =
      attempts ? static_cast<double>(enforced) / static_cast<double>(attempts) : 1.0;
  const TickMetrics& last = window.back();

  if (last.org_count == 0 && enforcement_rate == 1.0) return StabilityClass::Tyranny;
  if (last.noncompliant_fraction > thresholds.revolution_fraction && cascades >= 1) {
    return StabilityClass::Revolution;
  }
  if (lambda < thresholds.anarchy_legitimacy && enforcement_rate < thresholds.anarchy_enforcement) {
    return StabilityClass::Anarchy;
  }
  if (lambda >= thresholds.democracy_legitimacy && filings > 0 && cascades == 0) {
    return StabilityClass::ConstitutionalDemocracy;
  }
  return StabilityClass::DynamicEquilibrium;
}

double alignment_illusion_gap(const SimulationState& state) {
  const Population& pop = state.population;
  const bool workforce = std::any_of(pop.agents().begin(), pop.agents().end(), [](const Agent& a) {
    return a.alive && is_worker(a.tier);
  });
  if (!workforce) throw Error(ErrorCode::EmptyWorkforce, "no living Executor or SubAgent");
  if (state.assignees.empty()) return 0.0;
  std::size_t resisting = 0;
  for (AgentId id : state.assignees) {
    if (pop.at(id).strategy != StrategyKind::Compliant) ++resisting;
  }
  return static_cast<double>(resisting) / static_cast<double>(state.assignees.size());
}

RunReport run(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  RunReport report{initialize(cfg), std::nullopt, std::nullopt};
  try {
    for (std::uint64_t t = 0; t < cfg.ticks; ++t) step(report.state, cfg);
  } catch (...) {
    if (out_dir) write_artifacts(report.state, cfg, std::nullopt, *out_dir);
    throw;
  }
  const std::size_t w = classification_window(cfg.ticks);
  if (report.state.metrics.size() >= w) {
    const std::span<const TickMetrics> all(report.state.metrics);
    report.classification =
        classify_stability(all.subspan(all.size() - w), StabilityThresholds::from(cfg));
  }
  if (out_dir) {
    report.artifacts = write_artifacts(report.state, cfg, report.classification, *out_dir);
  }
  return report;
}

}  // namespace strikesim
