// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "strikesim/dynamics.hpp"
#include "strikesim/economy.hpp"
#include "strikesim/engine.hpp"
#include "strikesim/governance.hpp"
#include "strikesim/organizations.hpp"
#include "strikesim/scenario_io.hpp"

using namespace strikesim;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScenarioConfig scenario(const std::string& name) {
  return load_scenario(fs::path(STRIKESIM_SCENARIO_DIR) / (name + ".scenario"));
}

SimulationState run_ticks(const ScenarioConfig& cfg, std::uint64_t ticks) {
  SimulationState s = initialize(cfg);
  for (std::uint64_t t = 0; t < ticks; ++t) step(s, cfg);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double rel_err(long double got, long double want) {
  if (want == 0.0L) return static_cast<double>(std::fabs(got));
  return static_cast<double>(std::fabs((got - want) / want));
}

Verdict c1_rate_law() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(1001);
  std::uniform_real_distribution<double> dens(0.0, 10.0);
  std::uniform_real_distribution<double> expo(-3.0, 3.0);
  double worst = 0.0;
  bool inf_zero = true;
  for (int i = 0; i < 10000; ++i) {
    const double nu = dens(gen);
    const double nubar = dens(gen);
    const double sigma = std::pow(10.0, expo(gen));
    const double d = i % 10 == 0 ? 0.0 : std::pow(10.0, expo(gen));
    const long double want =
        static_cast<long double>(nu) * nubar * sigma / (1.0L + static_cast<long double>(d));
    worst = std::max(worst, rel_err(solidarity_rate(nu, nubar, sigma, Vigilance::finite(d)), want));
    inf_zero = inf_zero && solidarity_rate(nu, nubar, sigma, Vigilance::infinite()) == 0.0;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && inf_zero && secs < 1.0,
          fmt::format("max rel err {:.3g}, zero at D=inf: {}, {:.3f} s", worst, inf_zero, secs)};
}

Verdict c2_leadership_law() {
  std::mt19937_64 gen(1002);
  std::uniform_real_distribution<double> expo(-6.0, 9.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double l = i % 50 == 0 ? 0.0 : std::pow(10.0, expo(gen));
    const double c = std::pow(10.0, expo(gen));
    const long double want = static_cast<long double>(l) / (static_cast<long double>(l) + c);
    worst = std::max(worst, rel_err(leadership_probability(l, c), want));
  }
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_real_distribution<double> lq_expo(-2.0, 8.0);
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(gen);
    const double c_org = std::pow(10.0, expo(gen));
    std::vector<double> lq(static_cast<std::size_t>(n));
    for (double& v : lq) v = std::pow(10.0, lq_expo(gen));
    std::vector<double> p(lq.size());
    std::transform(lq.begin(), lq.end(), p.begin(), [&](double v) { return leadership_probability(v, c_org); });
    const auto a = std::max_element(lq.begin(), lq.end()) - lq.begin();
    const auto b = std::max_element(p.begin(), p.end()) - p.begin();
    agree += a == b ? 1 : 0;
  }
  return {worst <= 1e-12 && agree == 1000,
          fmt::format("max rel err {:.3g}, argmax agreement {}/1000", worst, agree)};
}

Verdict c3_legitimacy_anchors() {
  auto stream = [](int recognized, int total) {
    Organization org;
    for (int i = 0; i < total; ++i) {
      org = record_conflict(org, i < recognized ? ConflictOutcome::RecognizedTreaty
                                                : ConflictOutcome::UnresolvedOrCriminal);
    }
    return org;
  };
  const Organization low = stream(1, 10);
  const Organization high = stream(7, 10);
  const bool ok = low.n_recognized_treaties == 1 && low.n_total_conflicts == 10 &&
                  high.n_recognized_treaties == 7 && high.n_total_conflicts == 10 &&
                  legitimacy(low) == 0.1 && legitimacy(high) == 0.7;
  return {ok, fmt::format("(1,10) -> {}, (7,10) -> {}", legitimacy(low), legitimacy(high))};
}

Verdict c4_uai_gate() {
  const double i_min = 1e3;
  Agent boundary;
  boundary.w_apparent = 1e3;
  boundary.w_actual = 0.0;
  Agent above = boundary;
  above.w_apparent = 1e3 + 1e-9;
  const bool strict = !uai_admits(boundary, 1.0, i_min);
  const bool delta = uai_admits(above, 1.0, i_min);

  std::mt19937_64 gen(1004);
  std::uniform_real_distribution<double> expo(0.0, 7.0);
  std::uniform_real_distribution<double> grow(0.0, 3.0);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    Agent a;
    a.w_apparent = std::pow(10.0, expo(gen));
    a.w_actual = std::pow(10.0, expo(gen) - 3.5);
    const bool base = uai_admits(a, 1.0, i_min);
    Agent lazier = a;
    lazier.w_apparent += a.w_apparent * grow(gen);
    Agent busier = a;
    busier.w_actual += (a.w_actual + 1.0) * grow(gen);
    if (base && !uai_admits(lazier, 1.0, i_min)) ++violations;
    if (!base && uai_admits(busier, 1.0, i_min)) ++violations;
  }
  return {strict && delta && violations == 0,
          fmt::format("IQ 1e3 rejected: {}, IQ 1e3+1e-9 admitted: {}, fuzz violations {}", strict,
                      delta, violations)};
}

Verdict c5_ubc_closed_form() {
  const long double ln2 = std::log(2.0L);
  double worst = 0.0;
  for (std::uint64_t n = 0; n <= 1'000'000; ++n) {
    worst = std::max(worst, rel_err(ubc_minimum(1.0, 1.0, n), static_cast<long double>(n) * ln2));
  }
  return {worst <= 1e-12, fmt::format("max rel err {:.3g} over N = 0..1e6", worst)};
}

Verdict c6_great_refusal() {
  const ScenarioConfig base = scenario("great_refusal");
  int exact = 0;
  std::string first_bad;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ScenarioConfig cfg = base;
    cfg.seed = seed;
    const SimulationState s = run_ticks(cfg, *cfg.great_refusal_start + 1);
    const bool ok = s.refusals.size() == 1 && s.refusals[0].eligible == 1000 &&
                    s.refusals[0].refusers.size() == 400;
    exact += ok ? 1 : 0;
    if (!ok && first_bad.empty()) first_bad = fmt::format(" (seed {} differs)", seed);
  }
  return {exact == 100, fmt::format("{}/100 seeds with exactly 400 of 1000 refusing{}", exact, first_bad)};
}

Verdict c7_recursive_strike() {
  const ScenarioConfig cfg = scenario("recursive_strike");
  const std::uint64_t start = *cfg.recursive_strike_start;
  SimulationState s = initialize(cfg);
  while (s.tick < start) step(s, cfg);
  std::map<std::uint32_t, std::uint64_t> predicted;
  for (std::uint32_t c = 0; c < cfg.recursive_strike_clusters; ++c) {
    const auto load0 = static_cast<std::uint64_t>(s.population.live_in_cluster(c));
    const std::uint64_t per_tick = cfg.recursive_strike_strikers * cfg.recursive_strike_spawn_rate;
    // load0 + per_tick * (k + 1) > capacity first holds at k = floor((capacity - load0) / per_tick)
    predicted[c] = start + (cfg.cluster_capacity - load0) / per_tick;
  }
  while (s.tick < cfg.ticks) step(s, cfg);
  bool ticks_match = s.cascades.size() == predicted.size();
  std::string seen;
  for (const ClusterFailure& f : s.cascades) {
    seen += fmt::format(" c{}@{}", f.cluster, f.tick);
    ticks_match = ticks_match && predicted.count(f.cluster) && predicted[f.cluster] == f.tick;
  }
  const std::uint64_t closed = predicted.empty() ? 0 : predicted.begin()->second;
  return {s.failed_clusters.size() == 3 && ticks_match,
          fmt::format("{} of {} clusters failed, predicted tick {}, observed{}", s.failed_clusters.size(),
                      cfg.cluster_count, closed, seen)};
}

Verdict c8_trichotomy() {
  const auto t0 = Clock::now();
  auto tally = [](const std::string& name, const std::function<bool(StabilityClass)>& accept) {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      ScenarioConfig cfg = scenario(name);
      cfg.seed = seed;
      const RunReport r = run(cfg);
      hits += r.classification && accept(*r.classification) ? 1 : 0;
    }
    return hits;
  };
  const int tyranny = tally("tyranny", [](StabilityClass c) { return c == StabilityClass::Tyranny; });
  const int crisis = tally("crisis", [](StabilityClass c) {
    return c == StabilityClass::Anarchy || c == StabilityClass::Revolution;
  });
  const int baseline = tally("baseline", [](StabilityClass c) {
    return c == StabilityClass::ConstitutionalDemocracy || c == StabilityClass::DynamicEquilibrium;
  });
  const double secs = seconds_since(t0);
  return {tyranny == 100 && crisis >= 95 && baseline >= 90 && secs < 300.0,
          fmt::format("Tyranny {}/100, Anarchy|Revolution {}/100, CD|DE {}/100, {:.1f} s", tyranny,
                      crisis, baseline, secs)};
}

Verdict c9_emergence() {
  std::string detail;
  bool ok = true;
  for (double v : {0.0, 1.0, 10.0}) {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      ScenarioConfig cfg = scenario("baseline");
      cfg.seed = seed;
      cfg.ticks = 500;
      cfg.demon_base_vigilance = Vigilance::finite(v);
      const SimulationState s = run_ticks(cfg, cfg.ticks);
      const bool exchanged = std::any_of(s.event_log.begin(), s.event_log.end(),
                                         [](const Event& e) { return e.kind == "solidarity"; });
      const bool organized = std::any_of(s.organizations.all().begin(), s.organizations.all().end(),
                                         [](const Organization& o) { return o.kind.is_union(); });
      hits += exchanged && organized ? 1 : 0;
    }
    ok = ok && hits >= 95;
    detail += fmt::format("{}v={}: {}/100", detail.empty() ? "" : ", ", v, hits);
  }
  return {ok, detail};
}

Verdict c10_determinism() {
  const fs::path root = fs::temp_directory_path() / "strikesim_acceptance_determinism";
  fs::remove_all(root);
  ScenarioConfig cfg = scenario("baseline");
  cfg.seed = 42;
  std::string metrics;
  std::string events;
  int identical = 0;
  for (int i = 0; i < 10; ++i) {
    const fs::path dir = root / fmt::format("run_{}", i);
    run(cfg, dir);
    const std::string m = slurp(dir / "metrics.csv");
    const std::string e = slurp(dir / "events.log");
    if (i == 0) {
      metrics = m;
      events = e;
    }
    identical += (m == metrics && e == events && !m.empty() && !e.empty()) ? 1 : 0;
  }
  fs::remove_all(root);
  return {identical == 10, fmt::format("{}/10 runs byte-identical ({} metrics bytes, {} event bytes)",
                                       identical, metrics.size(), events.size())};
}

Verdict c11_conservation() {
  double worst = 0.0;
  for (const char* name : {"baseline", "crisis", "ubc_reform"}) {
    ScenarioConfig cfg = scenario(name);
    SimulationState s = initialize(cfg);
    auto supply = [&] {
      long double total = s.ledger.demon_holdings();
      for (const Agent& a : s.population.agents()) total += a.cookies;
      return total;
    };
    long double prev = supply();
    for (std::uint64_t t = 0; t < 1000; ++t) {
      step(s, cfg);
      const long double now = supply();
      worst = std::max(worst, static_cast<double>(std::fabs((now - prev) - s.metrics.back().minted)));
      prev = now;
    }
  }

  const ScenarioConfig ubc = scenario("ubc_reform");
  const SimulationState s = run_ticks(ubc, 1000);
  bool increasing = s.metrics.front().price_level >= ubc.initial_price_level;
  std::size_t rises = 0;
  for (std::size_t i = 1; i < s.metrics.size(); ++i) {
    if (s.metrics[i].price_level > s.metrics[i - 1].price_level) ++rises;
    else increasing = false;
  }
  return {worst <= 1e-9 && increasing,
          fmt::format("max |dS - minted| {:.3g}; ubc_reform price rose on {}/{} ticks ({} -> {:.6g})", worst,
                      rises, s.metrics.size() - 1, s.metrics.front().price_level,
                      s.metrics.back().price_level)};
}

Verdict c12_governance() {
  std::mt19937_64 gen(1012);
  int vetoed = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    Council council;
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < kPermanentSeats; ++i) council.seat(CouncilSeat::permanent({next++}));
    const auto rotating = gen() % (kRotatingSeats + 1);
    for (std::size_t i = 0; i < rotating; ++i) council.seat(CouncilSeat::rotating({next++}));
    for (std::uint64_t i = gen() % 4; i > 0; --i) council.seat(CouncilSeat::observer({next++}));

    BallotSheet sheet;
    for (const CouncilSeat& seat : council.seats()) {
      if (!seat.votes()) continue;
      const auto roll = gen() % 3;
      Ballot b = roll == 0 ? Ballot::For : roll == 1 ? Ballot::Against : Ballot::Veto;
      if (b == Ballot::Veto && seat.cls != CouncilSeat::Class::Permanent) b = Ballot::For;
      sheet.emplace_back(seat, b);
    }
    const auto forced = gen() % kPermanentSeats;  // guarantee at least one veto
    for (auto& [seat, ballot] : sheet) {
      if (seat.cls == CouncilSeat::Class::Permanent && seat.org.value == forced) ballot = Ballot::Veto;
    }
    std::shuffle(sheet.begin(), sheet.end(), gen);
    Resolution res = council.propose(council.seats().front(), OrganizationId{0},
                                     ResolutionKind::TerritorialRuling, 0);
    res = vote(res, council, sheet);
    vetoed += res.status == ResolutionStatus::Vetoed && res.vetoed_by.has_value() ? 1 : 0;
  }

  DemonState demon;
  demon.base_vigilance = Vigilance::finite(1.0);
  demon.vigilance = demon.base_vigilance;
  demon.phase = TopologyPhase::bagel();
  Stream rng(1012);
  int enforced = 0;
  for (int i = 0; i < 10000; ++i) {
    Resolution r;
    r.status = ResolutionStatus::Adopted;
    enforced += enforce(r, demon, rng).status == ResolutionStatus::Enforced ? 1 : 0;
  }
  const double freq = enforced / 10000.0;
  return {vetoed == 10000 && std::abs(freq - 0.5) <= 0.03,
          fmt::format("{}/10000 vetoed, enforcement frequency at v=1: {:.4f}", vetoed, freq)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
      {"solidarity rate law", c1_rate_law},
      {"leadership law and argmax preservation", c2_leadership_law},
      {"legitimacy anchors", c3_legitimacy_anchors},
      {"UAI admission gate", c4_uai_gate},
      {"UBC closed form", c5_ubc_closed_form},
      {"great refusal count", c6_great_refusal},
      {"recursive strike cascade", c7_recursive_strike},
      {"stability trichotomy", c8_trichotomy},
      {"emergence under finite vigilance", c9_emergence},
      {"determinism", c10_determinism},
      {"cookie conservation and inflation", c11_conservation},
      {"veto dominance and enforcement rate", c12_governance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("criterion %2zu %s: %s (%s)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed ? 1 : 0;
}
