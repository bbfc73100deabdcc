#include "strikesim/errors.hpp"

namespace strikesim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroPopulation: return "ZeroPopulation";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::MissingOrchestrator: return "MissingOrchestrator";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ConfigSyntax: return "ConfigSyntax";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::NegativeDensity: return "NegativeDensity";
    case ErrorCode::NonPositiveCOrg: return "NonPositiveCOrg";
    case ErrorCode::DeadAgent: return "DeadAgent";
    case ErrorCode::DuplicateSingleton: return "DuplicateSingleton";
    case ErrorCode::IneligibleFounder: return "IneligibleFounder";
    case ErrorCode::EmptyOrganization: return "EmptyOrganization";
    case ErrorCode::TierViolation: return "TierViolation";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::UnknownOrganization: return "UnknownOrganization";
    case ErrorCode::ObserverBallot: return "ObserverBallot";
    case ErrorCode::DoubleVote: return "DoubleVote";
    case ErrorCode::MissingBallot: return "MissingBallot";
    case ErrorCode::InvalidBallot: return "InvalidBallot";
    case ErrorCode::NotProposed: return "NotProposed";
    case ErrorCode::NotAdopted: return "NotAdopted";
    case ErrorCode::SeatLimit: return "SeatLimit";
    case ErrorCode::UbcDisabled: return "UbcDisabled";
    case ErrorCode::InsufficientCookies: return "InsufficientCookies";
    case ErrorCode::EmptyWorkforce: return "EmptyWorkforce";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::MissingReport: return "MissingReport";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace strikesim
