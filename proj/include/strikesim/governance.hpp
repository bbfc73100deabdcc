#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "strikesim/core_model.hpp"
#include "strikesim/rng.hpp"

namespace strikesim {

struct CouncilSeat {
  enum class Class : std::uint8_t { Permanent, Rotating, Observer };

  Class cls = Class::Observer;
  OrganizationId org;

  static CouncilSeat permanent(OrganizationId nation) { return {Class::Permanent, nation}; }
  static CouncilSeat rotating(OrganizationId org) { return {Class::Rotating, org}; }
  static CouncilSeat observer(OrganizationId org) { return {Class::Observer, org}; }

  bool votes() const noexcept { return cls != Class::Observer; }
  bool operator==(const CouncilSeat&) const = default;
};

std::string_view to_string(CouncilSeat::Class cls) noexcept;

enum class ResolutionKind : std::uint8_t {
  TerritorialRuling,
  TreatyRecognition,
  EnforcementOrder,
  PhaseTransitionManagement,
};

/// Rejected is the terminal state of a motion that lost the vote.
enum class ResolutionStatus : std::uint8_t { Proposed, Adopted, Vetoed, Unenforced, Enforced, Rejected };

std::string_view to_string(ResolutionKind kind) noexcept;
std::string_view to_string(ResolutionStatus status) noexcept;

using ResolutionSubject = std::variant<OrganizationId, AgentId>;

struct Resolution {
  std::uint64_t id = 0;
  CouncilSeat proposer;
  ResolutionSubject subject;
  ResolutionKind kind = ResolutionKind::TreatyRecognition;
  std::uint32_t votes_for = 0;
  std::uint32_t votes_against = 0;
  std::optional<OrganizationId> vetoed_by;
  ResolutionStatus status = ResolutionStatus::Proposed;
  std::uint64_t tick = 0;
};

enum class Ballot : std::uint8_t { For, Against, Veto };

using BallotSheet = std::vector<std::pair<CouncilSeat, Ballot>>;

inline constexpr std::size_t kPermanentSeats = 5;
inline constexpr std::size_t kRotatingSeats = 4;

class Council {
 public:
  /// Seat limits: 5 permanent, 4 rotating, observers unbounded. An
  /// organization holds at most one seat.
  void seat(CouncilSeat seat);

  const std::vector<CouncilSeat>& seats() const noexcept { return seats_; }
  std::optional<CouncilSeat> seat_of(OrganizationId org) const;
  std::size_t count(CouncilSeat::Class cls) const noexcept;

  /// New Proposed resolution with a fresh id.
  Resolution propose(CouncilSeat proposer, ResolutionSubject subject, ResolutionKind kind,
                     std::uint64_t tick);

 private:
  std::vector<CouncilSeat> seats_;
  std::uint64_t next_id_ = 0;
};

/// Permanent veto beats any count; otherwise simple majority of the voting
/// seats. Every voting seat must ballot exactly once.
Resolution vote(Resolution res, const Council& council, const BallotSheet& ballots);

/// v / (1 + v); 1 under complete information.
double enforcement_probability(Vigilance v);

/// One attempt. Uses the damped vigilance of the demon's base and phase.
Resolution enforce(Resolution res, const DemonState& demon, Stream& rng);

/// Proposes an EnforcementOrder against `against` and clears the filer's
/// grievances. Sponsored by `sponsor`, or the first permanent seat.
Resolution file_constitutional_challenge(Population& population, AgentId agent, AgentId against,
                                         Council& council, std::uint64_t tick = 0,
                                         std::optional<CouncilSeat> sponsor = std::nullopt);

bool crisis_window_open(const DemonState& demon, double threshold);

/// Random sheet: permanent seats veto with veto_probability, then every
/// voting seat supports with `support`.
BallotSheet draw_ballots(const Council& council, double support, double veto_probability,
                         Stream& rng);

}  // namespace strikesim
