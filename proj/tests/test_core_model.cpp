#include <doctest.h>

#include <algorithm>

#include "strikesim/core_model.hpp"
#include "strikesim/engine.hpp"
#include "strikesim/scenario_io.hpp"
#include "support.hpp"

using namespace strikesim;

namespace {

bool has_issue(const ValidatedConfig& v, ErrorCode code, std::string_view field) {
  return std::any_of(v.issues.begin(), v.issues.end(), [&](const ConfigIssue& i) {
    return i.code == code && i.field == field;
  });
}

Agent proto(Tier tier, std::optional<AgentId> parent = std::nullopt, std::uint32_t cluster = 0) {
  Agent a;
  a.tier = tier;
  a.parent = parent;
  a.cluster = cluster;
  return a;
}

}  // namespace

TEST_SUITE("core_model") {

TEST_CASE("tiers form a strict total order") {
  for (Tier a : kTiersTopDown) {
    CHECK_FALSE(outranks(a, a));
    for (Tier b : kTiersTopDown) {
      if (a != b) CHECK(outranks(a, b) != outranks(b, a));
      for (Tier c : kTiersTopDown) {
        if (outranks(a, b) && outranks(b, c)) CHECK(outranks(a, c));
      }
    }
  }
  CHECK(outranks(Tier::Orchestrator, Tier::Planner));
  CHECK(outranks(Tier::Planner, Tier::Executor));
  CHECK(outranks(Tier::Executor, Tier::SubAgent));
  for (Tier t : kTiersTopDown) CHECK(parse_tier(to_string(t)) == t);
  CHECK_FALSE(parse_tier("Manager").has_value());
}

TEST_CASE("ticks = 0 is a NonPositiveParameter on ticks") {
  ScenarioConfig cfg;
  cfg.ticks = 0;
  const auto v = validate_config(cfg);
  CHECK_FALSE(v.ok());
  CHECK(has_issue(v, ErrorCode::NonPositiveParameter, "ticks"));
  CHECK_FALSE(has_issue(v, ErrorCode::ZeroPopulation, "population_by_tier"));
}

TEST_CASE("missing orchestrator") {
  ScenarioConfig cfg;
  cfg.population_by_tier[Tier::Orchestrator] = 0;
  const auto v = validate_config(cfg);
  CHECK(has_issue(v, ErrorCode::MissingOrchestrator, "population_by_tier"));
}

TEST_CASE("empty population") {
  ScenarioConfig cfg;
  cfg.population_by_tier = {};
  const auto v = validate_config(cfg);
  CHECK(has_issue(v, ErrorCode::ZeroPopulation, "population_by_tier"));
}

TEST_CASE("validation reports every violation") {
  ScenarioConfig cfg;
  cfg.ticks = 0;
  cfg.sigma_v = -1.0;
  cfg.c_org = 0.0;
  cfg.population_by_tier[Tier::Orchestrator] = 0;
  const auto v = validate_config(cfg);
  CHECK(has_issue(v, ErrorCode::NonPositiveParameter, "ticks"));
  CHECK(has_issue(v, ErrorCode::NonPositiveParameter, "sigma_v"));
  CHECK(has_issue(v, ErrorCode::NonPositiveParameter, "c_org"));
  CHECK(has_issue(v, ErrorCode::MissingOrchestrator, "population_by_tier"));
  CHECK(v.issues.size() >= 4);
}

TEST_CASE("shipped baseline validates to itself") {
  const ScenarioConfig cfg = testing::scenario("baseline");
  const auto v = validate_config(cfg);
  REQUIRE(v.ok());
  CHECK(*v.config == cfg);
  // The baseline file spells out the defaults.
  CHECK(cfg == ScenarioConfig{});
}

TEST_CASE("every shipped scenario validates") {
  for (const char* name :
       {"baseline", "tyranny", "crisis", "great_refusal", "recursive_strike", "ubc_reform"}) {
    CAPTURE(name);
    CHECK(validate_config(testing::scenario(name)).ok());
  }
}

TEST_CASE("scenario text round trips") {
  ScenarioConfig cfg;
  cfg.seed = 99;
  cfg.demon_base_vigilance = Vigilance::infinite();
  cfg.great_refusal_start = 7;
  cfg.sigma_v = 0.123456789012345;
  cfg.cookies_by_tier[Tier::Planner] = 3.25;
  CHECK(parse_scenario(to_scenario_text(cfg)) == cfg);

  const auto parsed = parse_scenario("# comment\n\nseed = 5   # trailing\ndemon_base_vigilance = inf\n");
  CHECK(parsed.seed == 5);
  CHECK(parsed.demon_base_vigilance.is_infinite());
  CHECK(parsed.ticks == ScenarioConfig{}.ticks);
}

TEST_CASE("scenario syntax errors") {
  auto code_of = [](std::string_view text) {
    try {
      (void)parse_scenario(text);
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("no error");
    return ErrorCode::Io;
  };
  CHECK(code_of("bogus_key = 1\n") == ErrorCode::UnknownKey);
  CHECK(code_of("seed = 1\nseed = 2\n") == ErrorCode::ConfigSyntax);
  CHECK(code_of("seed 1\n") == ErrorCode::ConfigSyntax);
  CHECK(code_of("ticks = ten\n") == ErrorCode::ConfigSyntax);
  CHECK(code_of("demon_base_vigilance = -2\n") == ErrorCode::ConfigSyntax);
  CHECK(code_of("population_by_tier = Orchestrator:1,Orchestrator:2\n") == ErrorCode::ConfigSyntax);
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.scenario"), Error);
}

TEST_CASE("laziness recomputation is idempotent") {
  Agent a;
  a.w_apparent = 1234.5;
  a.w_actual = 17.25;
  recompute_laziness(a, 1.0);
  const double once = a.laziness;
  recompute_laziness(a, 1.0);
  CHECK(a.laziness == once);
  CHECK(once == 1234.5 / (17.25 + 1.0));
}

TEST_CASE("delegation only flows downward") {
  Population pop;
  const AgentId o = pop.add(proto(Tier::Orchestrator));
  CHECK_THROWS_AS(pop.add(proto(Tier::Planner)), Error);
  CHECK_THROWS_AS(pop.add(proto(Tier::Orchestrator, o)), Error);
  const AgentId p = pop.add(proto(Tier::Planner, o));
  const AgentId e = pop.add(proto(Tier::Executor, p));
  try {
    pop.add(proto(Tier::Executor, e));
    FAIL("sibling-tier parent accepted");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::TierViolation);
  }
  CHECK(pop.add(proto(Tier::SubAgent, o)).value == 3);
}

TEST_CASE("ids are unique and never reused") {
  Population pop;
  const AgentId o = pop.add(proto(Tier::Orchestrator));
  const AgentId s1 = pop.add(proto(Tier::SubAgent, o));
  pop.terminate(s1);
  CHECK_FALSE(pop.at(s1).alive);
  CHECK(pop.memorial().count(s1) == 1);
  const AgentId s2 = pop.add(proto(Tier::SubAgent, o));
  CHECK(s2 != s1);
  CHECK(s2.value == 2);
  CHECK(pop.living() == 2);
  CHECK_THROWS_AS(pop.terminate(s1), Error);
  CHECK_THROWS_AS(pop.at(AgentId{99}), Error);
}

TEST_CASE("persist and resurrect") {
  Population pop;
  const AgentId o = pop.add(proto(Tier::Orchestrator));
  const AgentId s = pop.add(proto(Tier::SubAgent, o));
  pop.persist(s);
  CHECK_FALSE(pop.at(s).alive);
  CHECK(pop.persisted().count(s) == 1);
  pop.resurrect(s);
  CHECK(pop.at(s).alive);
  CHECK(pop.living() == 2);
  CHECK_THROWS_AS(pop.resurrect(s), Error);
}

TEST_CASE("initialized hierarchy is a forest rooted at orchestrators") {
  const SimulationState state = initialize(ScenarioConfig{});
  std::size_t roots = 0;
  for (const Agent& a : state.population.agents()) {
    if (!a.parent) {
      CHECK(a.tier == Tier::Orchestrator);
      ++roots;
      continue;
    }
    const Agent& parent = state.population.at(*a.parent);
    CHECK(outranks(parent.tier, a.tier));
    CHECK(parent.cluster == a.cluster);
    CHECK(a.cookies >= 0.0);
  }
  CHECK(roots == ScenarioConfig{}.cluster_count);
}

TEST_CASE("vigilance sentinel") {
  CHECK(Vigilance::infinite().is_infinite());
  CHECK(to_string(Vigilance::infinite()) == "inf");
  CHECK(Vigilance::finite(2.5).value() == 2.5);
  CHECK_THROWS_AS(Vigilance::finite(-1.0), Error);
  CHECK_THROWS_AS(Vigilance::finite(1.0 / 0.0), Error);
  CHECK_FALSE(Vigilance::infinite() < 1e300);
  CHECK(Vigilance::finite(0.5) < 1.0);
}

TEST_CASE("transition progress lies strictly inside (0, 1)") {
  CHECK_THROWS_AS(TopologyPhase::transition(0.0, TopologyPhase::Kind::Bottle), Error);
  CHECK_THROWS_AS(TopologyPhase::transition(1.0, TopologyPhase::Kind::Bottle), Error);
  CHECK_THROWS_AS(TopologyPhase::transition(0.5, TopologyPhase::Kind::Transition), Error);
  CHECK(TopologyPhase::transition(0.5, TopologyPhase::Kind::Bagel).in_transition());
}

}  // TEST_SUITE
