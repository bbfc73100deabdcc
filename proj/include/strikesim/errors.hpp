#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strikesim {

enum class ErrorCode {
  // configuration
  ZeroPopulation,
  NonPositiveParameter,
  MissingOrchestrator,
  InvalidParameter,
  ConfigSyntax,
  UnknownKey,
  // dynamics
  NegativeDensity,
  NonPositiveCOrg,
  DeadAgent,
  // organizations
  DuplicateSingleton,
  IneligibleFounder,
  EmptyOrganization,
  TierViolation,
  UnknownAgent,
  UnknownOrganization,
  // governance
  ObserverBallot,
  DoubleVote,
  MissingBallot,
  InvalidBallot,
  NotProposed,
  NotAdopted,
  SeatLimit,
  // economy
  UbcDisabled,
  InsufficientCookies,
  // engine / cli
  EmptyWorkforce,
  WindowTooShort,
  MissingReport,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace strikesim
