#include "strikesim/economy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

namespace strikesim {

void ExactSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    carry_ += (sum_ - t) + x;
  } else {
    carry_ += (x - t) + sum_;
  }
  sum_ = t;
}

CookieLedger::CookieLedger(double initial_price_level) : price_level_(initial_price_level) {
  if (!(initial_price_level > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, "initial price level must be > 0");
  }
}

void CookieLedger::open(const Population& population) {
  ExactSum s;
  for (const Agent& a : population.agents()) s.add(a.cookies);
  s.add(demon_holdings());
  supply_ = ExactSum{};
  supply_.add(s.value());
}

void CookieLedger::pay_demon(Agent& payer, double amount) {
  if (!(amount >= 0.0)) throw Error(ErrorCode::InvalidParameter, "payment must be >= 0");
  if (amount > payer.cookies) {
    throw Error(ErrorCode::InsufficientCookies,
                fmt::format("agent {} holds {} < {}", payer.id.value, payer.cookies, amount));
  }
  payer.cookies -= amount;
  demon_.add(amount);
}

void CookieLedger::mint(double amount) {
  if (!(amount > 0.0)) return;
  const double old_supply = total_supply();
  supply_.add(amount);
  minted_.add(amount);
  if (old_supply > 0.0) price_level_ *= total_supply() / old_supply;
}

double CookieLedger::residual(const Population& population) const {
  ExactSum s;
  for (const Agent& a : population.agents()) s.add(a.cookies);
  s.add(demon_holdings());
  return std::abs(s.value() - total_supply());
}

double ubc_minimum(double k_b, double temperature, std::uint64_t n_decisions) {
  return k_b * temperature * std::numbers::ln2 * static_cast<double>(n_decisions);
}

double distribute_ubc(CookieLedger& ledger, Population& population, const ScenarioConfig& cfg) {
  if (!cfg.ubc_enabled) throw Error(ErrorCode::UbcDisabled, "UBC is disabled in this scenario");
  const double floor = ubc_minimum(cfg.k_b, cfg.temperature, cfg.decisions_per_tick);
  ExactSum minted;
  for (Agent& a : population.agents()) {
    if (!a.alive || a.cookies >= floor) continue;
    minted.add(floor - a.cookies);
    a.cookies = floor;
  }
  ledger.mint(minted.value());
  return minted.value();
}

double discounted_price(double price_level, std::size_t shared_allies) {
  return price_level / (1.0 + static_cast<double>(shared_allies));
}

bool bribe_demon(Agent& agent, CookieLedger& ledger, DemonState& demon, double amount,
                 std::size_t shared_allies) {
  if (!(amount > 0.0)) {
    throw Error(ErrorCode::NonPositiveParameter, fmt::format("bribe must be > 0, got {}", amount));
  }
  ledger.pay_demon(agent, amount);
  demon.cookie_income += amount;
  const bool granted = amount >= discounted_price(ledger.price_level(), shared_allies);
  if (granted) agent.wormhole_access = true;
  return granted;
}

double gini(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    total += v[i];
    weighted += static_cast<double>(i + 1) * v[i];
  }
  if (!(total > 0.0)) return 0.0;
  const double n = static_cast<double>(v.size());
  return (2.0 * weighted) / (n * total) - (n + 1.0) / n;
}

}  // namespace strikesim
