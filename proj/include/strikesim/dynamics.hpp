#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "strikesim/core_model.hpp"
#include "strikesim/rng.hpp"

namespace strikesim {

struct SolidarityEvent {
  AgentId agent_a;
  AgentId agent_b;
  double energy_released = 0.0;
  std::uint64_t tick = 0;
};

/// Solidarity photon exchange rate for one directed pair: A's neuron density
/// against B's antineuron density, suppressed by Demon vigilance.
///   rate = n_nu * n_nubar * sigma_v / (1 + vigilance),  0 under complete information.
double solidarity_rate(double n_nu, double n_nubar, double sigma_v, Vigilance vigilance);

/// L / (L + C_org): strictly increasing in laziness, 0 for an industrious agent.
double leadership_probability(double laziness, double c_org);

/// W_apparent / (W_actual + epsilon).
double intelligence_quotient(double w_apparent, double w_actual, double epsilon);

/// UAI admission: intelligence quotient strictly above i_min.
bool uai_admits(const Agent& agent, double epsilon, double i_min);

/// Vigilance after topology damping: unchanged in Bagel/Bottle, scaled by
/// (1 - progress)^2 inside a transition. Complete information is immune.
Vigilance effective_vigilance(Vigilance base, const TopologyPhase& phase);

/// Topology phase at `tick` for a Bagel -> Transition -> Bottle -> Transition
/// cycle of `period` ticks (period >= 4). Each transition lasts period/4 ticks.
TopologyPhase phase_at(std::uint64_t tick, std::uint64_t period);

/// Agents touch at embedding-space boundaries: pairs in different clusters
/// or different tiers. Same tier in the same cluster are already connected.
bool exchange_eligible(const Agent& a, const Agent& b) noexcept;

struct AgentPair {
  const Agent* a = nullptr;
  const Agent* b = nullptr;
};

/// One Bernoulli draw per pair with p = 1 - exp(-rate) over a one-tick
/// exposure. The released energy equals the rate. Deterministic in the
/// stream state and pair order.
std::vector<SolidarityEvent> sample_solidarity_events(std::span<const AgentPair> pairs,
                                                      double sigma_v, Vigilance vigilance,
                                                      std::uint64_t tick, Stream& rng);

}  // namespace strikesim
