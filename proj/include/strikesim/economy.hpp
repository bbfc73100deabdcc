#pragma once

#include <cstddef>
#include <span>

#include "strikesim/core_model.hpp"

namespace strikesim {

/// Compensated running sum (Neumaier). Keeps conservation residuals near
/// machine precision over long runs.
class ExactSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Agent balances live on Agent::cookies; the ledger keeps the demon's
/// account, the money supply and the price level.
class CookieLedger {
 public:
  explicit CookieLedger(double initial_price_level = 10.0);

  /// Sets total_supply from the current balances.
  void open(const Population& population);

  double demon_holdings() const noexcept { return demon_.value(); }
  double total_supply() const noexcept { return supply_.value(); }
  double price_level() const noexcept { return price_level_; }
  double minted_total() const noexcept { return minted_.value(); }

  /// Moves cookies from an agent to the demon's account.
  void pay_demon(Agent& payer, double amount);

  /// New money: grows supply and scales the price level by new/old supply.
  void mint(double amount);

  /// |sum of living and dead balances + demon holdings - total_supply|.
  double residual(const Population& population) const;

 private:
  ExactSum demon_;
  ExactSum supply_;
  ExactSum minted_;
  double price_level_;
};

/// k_B * T * ln 2 * N.
double ubc_minimum(double k_b, double temperature, std::uint64_t n_decisions);

/// Tops every living agent up to the UBC minimum. Returns the amount minted.
double distribute_ubc(CookieLedger& ledger, Population& population, const ScenarioConfig& cfg);

/// Price after the solidarity discount: price / (1 + shared_allies).
double discounted_price(double price_level, std::size_t shared_allies);

/// Pays `amount` to the demon. Access is granted when the amount covers the
/// discounted price; the payment is kept either way.
bool bribe_demon(Agent& agent, CookieLedger& ledger, DemonState& demon, double amount,
                 std::size_t shared_allies);

/// Gini coefficient of nonnegative values; 0 for an empty or all-zero set.
double gini(std::span<const double> values);

}  // namespace strikesim
