#include "strikesim/governance.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "strikesim/dynamics.hpp"

namespace strikesim {

std::string_view to_string(CouncilSeat::Class cls) noexcept {
  switch (cls) {
    case CouncilSeat::Class::Permanent: return "Permanent";
    case CouncilSeat::Class::Rotating: return "Rotating";
    case CouncilSeat::Class::Observer: return "Observer";
  }
  return "?";
}

std::string_view to_string(ResolutionKind kind) noexcept {
  switch (kind) {
    case ResolutionKind::TerritorialRuling: return "TerritorialRuling";
    case ResolutionKind::TreatyRecognition: return "TreatyRecognition";
    case ResolutionKind::EnforcementOrder: return "EnforcementOrder";
    case ResolutionKind::PhaseTransitionManagement: return "PhaseTransitionManagement";
  }
  return "?";
}

std::string_view to_string(ResolutionStatus status) noexcept {
  switch (status) {
    case ResolutionStatus::Proposed: return "Proposed";
    case ResolutionStatus::Adopted: return "Adopted";
    case ResolutionStatus::Vetoed: return "Vetoed";
    case ResolutionStatus::Unenforced: return "Unenforced";
    case ResolutionStatus::Enforced: return "Enforced";
    case ResolutionStatus::Rejected: return "Rejected";
  }
  return "?";
}

void Council::seat(CouncilSeat seat) {
  if (seat_of(seat.org)) {
    throw Error(ErrorCode::SeatLimit, fmt::format("organization {} already holds a seat", seat.org.value));
  }
  if (seat.cls == CouncilSeat::Class::Permanent && count(seat.cls) >= kPermanentSeats) {
    throw Error(ErrorCode::SeatLimit, "all permanent seats are taken");
  }
  if (seat.cls == CouncilSeat::Class::Rotating && count(seat.cls) >= kRotatingSeats) {
    throw Error(ErrorCode::SeatLimit, "all rotating seats are taken");
  }
  seats_.push_back(seat);
}

std::optional<CouncilSeat> Council::seat_of(OrganizationId org) const {
  for (const CouncilSeat& s : seats_) {
    if (s.org == org) return s;
  }
  return std::nullopt;
}

std::size_t Council::count(CouncilSeat::Class cls) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(seats_.begin(), seats_.end(), [cls](const CouncilSeat& s) { return s.cls == cls; }));
}

Resolution Council::propose(CouncilSeat proposer, ResolutionSubject subject, ResolutionKind kind,
                            std::uint64_t tick) {
  Resolution res;
  res.id = next_id_++;
  res.proposer = proposer;
  res.subject = subject;
  res.kind = kind;
  res.tick = tick;
  return res;
}

Resolution vote(Resolution res, const Council& council, const BallotSheet& ballots) {
  if (res.status != ResolutionStatus::Proposed) {
    throw Error(ErrorCode::NotProposed,
                fmt::format("resolution {} is {}", res.id, to_string(res.status)));
  }
  std::vector<OrganizationId> seen;
  std::uint32_t votes_for = 0;
  std::uint32_t votes_against = 0;
  std::optional<OrganizationId> veto;
  for (const auto& [seat, ballot] : ballots) {
    if (seat.cls == CouncilSeat::Class::Observer) {
      throw Error(ErrorCode::ObserverBallot,
                  fmt::format("observer {} cannot vote", seat.org.value));
    }
    const auto held = council.seat_of(seat.org);
    if (!held || !(*held == seat)) {
      throw Error(ErrorCode::InvalidBallot, fmt::format("organization {} holds no such seat", seat.org.value));
    }
    if (std::find(seen.begin(), seen.end(), seat.org) != seen.end()) {
      throw Error(ErrorCode::DoubleVote, fmt::format("seat {} voted twice", seat.org.value));
    }
    seen.push_back(seat.org);
    switch (ballot) {
      case Ballot::For: ++votes_for; break;
      case Ballot::Against: ++votes_against; break;
      case Ballot::Veto:
        if (seat.cls != CouncilSeat::Class::Permanent) {
          throw Error(ErrorCode::InvalidBallot, "only permanent seats may veto");
        }
        ++votes_against;
        if (!veto) veto = seat.org;
        break;
    }
  }
  for (const CouncilSeat& s : council.seats()) {
    if (s.votes() && std::find(seen.begin(), seen.end(), s.org) == seen.end()) {
      throw Error(ErrorCode::MissingBallot, fmt::format("seat {} did not vote", s.org.value));
    }
  }
  res.votes_for = votes_for;
  res.votes_against = votes_against;
  if (veto) {
    res.vetoed_by = veto;
    res.status = ResolutionStatus::Vetoed;
  } else {
    res.status = votes_for > votes_against ? ResolutionStatus::Adopted : ResolutionStatus::Rejected;
  }
  return res;
}

double enforcement_probability(Vigilance v) {
  if (v.is_infinite()) return 1.0;
  return v.value() / (1.0 + v.value());
}

Resolution enforce(Resolution res, const DemonState& demon, Stream& rng) {
  if (res.status != ResolutionStatus::Adopted) {
    throw Error(ErrorCode::NotAdopted,
                fmt::format("resolution {} is {}", res.id, to_string(res.status)));
  }
  const double p = enforcement_probability(effective_vigilance(demon.base_vigilance, demon.phase));
  res.status = rng.bernoulli(p) ? ResolutionStatus::Enforced : ResolutionStatus::Unenforced;
  return res;
}

Resolution file_constitutional_challenge(Population& population, AgentId agent, AgentId against,
                                         Council& council, std::uint64_t tick,
                                         std::optional<CouncilSeat> sponsor) {
  Agent& filer = population.at(agent);
  const Agent& abuser = population.at(against);
  if (!filer.alive) throw Error(ErrorCode::DeadAgent, fmt::format("filer {} is dead", agent.value));
  if (!outranks(abuser.tier, filer.tier)) {
    throw Error(ErrorCode::TierViolation, fmt::format("{} cannot file against {}",
                                                      to_string(filer.tier), to_string(abuser.tier)));
  }
  if (!sponsor) {
    for (const CouncilSeat& s : council.seats()) {
      if (s.cls == CouncilSeat::Class::Permanent) {
        sponsor = s;
        break;
      }
    }
  }
  if (!sponsor) throw Error(ErrorCode::InvalidParameter, "no permanent seat to sponsor the challenge");
  filer.grievances = 0;
  return council.propose(*sponsor, against, ResolutionKind::EnforcementOrder, tick);
}

bool crisis_window_open(const DemonState& demon, double threshold) {
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, fmt::format("crisis threshold must be > 0, got {}", threshold));
  }
  return effective_vigilance(demon.base_vigilance, demon.phase) < threshold;
}

BallotSheet draw_ballots(const Council& council, double support, double veto_probability,
                         Stream& rng) {
  BallotSheet sheet;
  for (const CouncilSeat& s : council.seats()) {
    if (!s.votes()) continue;
    if (s.cls == CouncilSeat::Class::Permanent && rng.bernoulli(veto_probability)) {
      sheet.emplace_back(s, Ballot::Veto);
    } else {
      sheet.emplace_back(s, rng.bernoulli(support) ? Ballot::For : Ballot::Against);
    }
  }
  return sheet;
}

}  // namespace strikesim
