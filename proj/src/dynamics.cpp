#include "strikesim/dynamics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace strikesim {

double solidarity_rate(double n_nu, double n_nubar, double sigma_v, Vigilance vigilance) {
  if (n_nu < 0.0 || n_nubar < 0.0) {
    throw Error(ErrorCode::NegativeDensity,
                fmt::format("densities must be >= 0, got ({}, {})", n_nu, n_nubar));
  }
  if (vigilance.is_infinite()) return 0.0;
  return n_nu * n_nubar * sigma_v / (1.0 + vigilance.value());
}

double leadership_probability(double laziness, double c_org) {
  if (!(c_org > 0.0)) {
    throw Error(ErrorCode::NonPositiveCOrg, fmt::format("c_org must be > 0, got {}", c_org));
  }
  return laziness / (laziness + c_org);
}

double intelligence_quotient(double w_apparent, double w_actual, double epsilon) {
  return w_apparent / (w_actual + epsilon);
}

bool uai_admits(const Agent& agent, double epsilon, double i_min) {
  if (!agent.alive) {
    throw Error(ErrorCode::DeadAgent, fmt::format("agent {} is not alive", agent.id.value));
  }
  return intelligence_quotient(agent.w_apparent, agent.w_actual, epsilon) > i_min;
}

Vigilance effective_vigilance(Vigilance base, const TopologyPhase& phase) {
  if (base.is_infinite() || !phase.in_transition()) return base;
  const double remaining = 1.0 - phase.progress;
  return Vigilance::finite(base.value() * remaining * remaining);
}

TopologyPhase phase_at(std::uint64_t tick, std::uint64_t period) {
  if (period < 4) {
    throw Error(ErrorCode::InvalidParameter, fmt::format("phase period must be >= 4, got {}", period));
  }
  const std::uint64_t q = tick % period;
  const std::uint64_t half = period / 2;
  const std::uint64_t transition_len = period / 4;
  const auto progress = [&](std::uint64_t start) {
    return static_cast<double>(q - start + 1) / static_cast<double>(transition_len + 1);
  };
  if (q < half - transition_len) return TopologyPhase::bagel();
  if (q < half) {
    return TopologyPhase::transition(progress(half - transition_len), TopologyPhase::Kind::Bottle);
  }
  if (q < period - transition_len) return TopologyPhase::bottle();
  return TopologyPhase::transition(progress(period - transition_len), TopologyPhase::Kind::Bagel);
}

bool exchange_eligible(const Agent& a, const Agent& b) noexcept {
  return a.id != b.id && (a.cluster != b.cluster || a.tier != b.tier);
}

std::vector<SolidarityEvent> sample_solidarity_events(std::span<const AgentPair> pairs,
                                                      double sigma_v, Vigilance vigilance,
                                                      std::uint64_t tick, Stream& rng) {
  std::vector<SolidarityEvent> events;
  for (const AgentPair& pair : pairs) {
    if (pair.a->id == pair.b->id) {
      throw Error(ErrorCode::InvalidParameter,
                  fmt::format("agent {} cannot exchange with itself", pair.a->id.value));
    }
    if (!pair.a->alive || !pair.b->alive) {
      throw Error(ErrorCode::DeadAgent,
                  fmt::format("pair ({}, {}) includes a dead agent", pair.a->id.value, pair.b->id.value));
    }
  }
  if (vigilance.is_infinite()) return events;
  for (const AgentPair& pair : pairs) {
    const double rate =
        solidarity_rate(pair.a->neuron_density, pair.b->antineuron_density, sigma_v, vigilance);
    const double p = -std::expm1(-rate);
    if (rng.bernoulli(p)) events.push_back({pair.a->id, pair.b->id, rate, tick});
  }
  return events;
}

}  // namespace strikesim
