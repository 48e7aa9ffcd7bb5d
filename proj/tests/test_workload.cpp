#include <stdexcept>
#include <string>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tiersim/workload.hpp"

using namespace tiersim;

namespace {

std::string field_of(const Scenario& sc) {
  try {
    validate(sc);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("reference curve values") {
  const LearningCurve c = reference_learning_curve();
  REQUIRE(c.sessions() == 15);
  CHECK(c.novice_boundary == 5);
  CHECK(c.intermediate_boundary == 10);
  double sum = 0.0;
  for (double u : c.session_think_times) sum += u;
  CHECK(sum == doctest::Approx(82.7).epsilon(1e-12));
  CHECK(c.session_think_times.front() == 12.5);
  CHECK(c.session_think_times.back() == 2.2);
}

TEST_CASE("think time follows the curve") {
  Scenario sc = reference_scenario(120, {{8, 8, 8}});
  Rng rng(7);
  CHECK(think_time(sc, 1, rng) == 12.5);
  CHECK(think_time(sc, 15, rng) == 2.2);
  CHECK(think_time(sc, 9, rng) == 4.3);

  sc.learning_enabled = false;
  sc.no_learning_think_time = 82.7 / 15.0;
  for (int p = 1; p <= 15; ++p) CHECK(think_time(sc, p, rng) == 82.7 / 15.0);
}

TEST_CASE("deterministic think time leaves the stream alone") {
  const Scenario sc = reference_scenario(4, {{1, 1, 1}});
  Rng a(3), b(3);
  (void)think_time(sc, 2, a);
  CHECK(a.unit() == b.unit());
}

TEST_CASE("exponential think time has the session mean") {
  Scenario sc = reference_scenario(4, {{1, 1, 1}});
  sc.think_distribution = Distribution::kExponential;
  Rng rng(11);
  double sum = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double u = think_time(sc, 1, rng);
    REQUIRE(u >= 0.0);
    sum += u;
  }
  CHECK(sum / draws == doctest::Approx(12.5).epsilon(0.01));
}

TEST_CASE("think time rejects sessions outside the curve") {
  const Scenario sc = reference_scenario(4, {{1, 1, 1}});
  Rng rng(1);
  CHECK_THROWS_AS(think_time(sc, 0, rng), std::out_of_range);
  CHECK_THROWS_AS(think_time(sc, 16, rng), std::out_of_range);
}

TEST_CASE("expertise level boundaries") {
  const LearningCurve c = reference_learning_curve();
  CHECK(expertise_level(c, 1) == Level::kNovice);
  CHECK(expertise_level(c, 5) == Level::kNovice);
  CHECK(expertise_level(c, 6) == Level::kIntermediate);
  CHECK(expertise_level(c, 10) == Level::kIntermediate);
  CHECK(expertise_level(c, 11) == Level::kExpert);
  CHECK(expertise_level(c, 15) == Level::kExpert);
  CHECK_THROWS_AS(expertise_level(c, 16), std::out_of_range);
}

TEST_CASE("levels partition the sessions") {
  oracle::ScenarioGen gen(99);
  for (int i = 0; i < 300; ++i) {
    const Scenario sc = gen.any();
    const LearningCurve& c = sc.curve;
    int seen[3] = {0, 0, 0};
    Level prev = Level::kNovice;
    for (int p = 1; p <= c.sessions(); ++p) {
      const Level l = expertise_level(c, p);
      REQUIRE(l == oracle::level_for(p, c.novice_boundary, c.intermediate_boundary));
      REQUIRE(static_cast<int>(l) >= static_cast<int>(prev));
      prev = l;
      ++seen[static_cast<int>(l)];
    }
    CHECK(seen[0] + seen[1] + seen[2] == c.sessions());
    CHECK(seen[0] == c.novice_boundary);
    CHECK(seen[1] == c.intermediate_boundary - c.novice_boundary);
  }
}

TEST_CASE("initial population layout") {
  const LearningCurve c = reference_learning_curve();

  SUBCASE("all novices") {
    const auto pop = initial_population({120, {120, 0, 0}}, c);
    REQUIRE(pop.size() == 120);
    for (int i = 0; i < 120; ++i) {
      CHECK(pop[i].terminal == i + 1);
      CHECK(pop[i].session == 1);
      CHECK(pop[i].trial == 1);
      CHECK(pop[i].generation == 0);
    }
  }
  SUBCASE("mixed") {
    const auto pop = initial_population({120, {60, 30, 30}}, c);
    REQUIRE(pop.size() == 120);
    CHECK(pop[0].session == 1);
    CHECK(pop[59].session == 1);
    CHECK(pop[60].session == 6);
    CHECK(pop[89].session == 6);
    CHECK(pop[90].session == 11);
    CHECK(pop[119].session == 11);
  }
  SUBCASE("all experts") {
    const auto pop = initial_population({7, {0, 0, 7}}, c);
    REQUIRE(pop.size() == 7);
    for (const auto& ts : pop) CHECK(ts.session == 11);
  }
  SUBCASE("counts must sum to N") {
    CHECK_THROWS_AS(initial_population({120, {60, 30, 29}}, c), ValidationError);
  }
}

TEST_CASE("lifecycle transitions") {
  const Scenario sc = reference_scenario(3, {{1, 1, 1}});

  SUBCASE("within a session") {
    const auto a = on_trial_complete({2, 4, 7, 0}, sc);
    CHECK(a.kind == LifecycleAction::Kind::kThink);
    CHECK(a.next == TerminalState{2, 4, 8, 0});
  }
  SUBCASE("break before the next session") {
    const auto a = on_trial_complete({2, 14, 12, 0}, sc);
    CHECK(a.kind == LifecycleAction::Kind::kBreak);
    CHECK(a.next == TerminalState{2, 15, 1, 0});
  }
  SUBCASE("departure after the last session") {
    const auto a = on_trial_complete({3, 15, 12, 1}, sc);
    CHECK(a.kind == LifecycleAction::Kind::kDepart);
    CHECK(a.next == TerminalState{3, 1, 1, 2});
  }
  SUBCASE("session complete directly") {
    CHECK(on_session_complete({1, 1, 12, 0}, sc).kind == LifecycleAction::Kind::kBreak);
    CHECK(on_session_complete({1, 15, 12, 0}, sc).kind == LifecycleAction::Kind::kDepart);
  }
}

TEST_CASE("a user walks every session in order") {
  oracle::ScenarioGen gen(5);
  for (int i = 0; i < 100; ++i) {
    const Scenario sc = gen.any();
    TerminalState ts{1, 1, 1, 0};
    int trials = 0;
    while (ts.generation == 0) {
      const auto a = on_trial_complete(ts, sc);
      ++trials;
      if (a.kind == LifecycleAction::Kind::kThink) {
        REQUIRE(a.next.session == ts.session);
        REQUIRE(a.next.trial == ts.trial + 1);
      } else {
        REQUIRE(ts.trial == sc.trials_per_session);
        REQUIRE(a.next.trial == 1);
      }
      ts = a.next;
    }
    CHECK(trials == sc.sessions() * sc.trials_per_session);
    CHECK(ts.session == 1);
  }
}

TEST_CASE("validation names the failing field") {
  const Scenario good = reference_scenario(120, {{8, 8, 8}});
  CHECK(field_of(good) == "");

  Scenario sc = good;
  sc.population.terminals = 0;
  CHECK(field_of(sc) == "population.terminals");

  sc = good;
  sc.population.initial_proportion = {119, 0, 0};
  CHECK(field_of(sc) == "population.proportion");

  sc = good;
  sc.population.initial_proportion = {121, -1, 0};
  CHECK(field_of(sc) == "population.proportion");

  sc = good;
  sc.curve.session_think_times[3] = -1.0;
  CHECK(field_of(sc) == "learning_curve.think_times");

  sc = good;
  sc.curve.session_think_times.clear();
  CHECK(field_of(sc) == "learning_curve.think_times");

  sc = good;
  sc.curve.novice_boundary = 0;
  CHECK(field_of(sc) == "learning_curve.novice_boundary");

  sc = good;
  sc.curve.intermediate_boundary = 4;
  CHECK(field_of(sc) == "learning_curve.intermediate_boundary");

  sc = good;
  sc.curve.intermediate_boundary = 16;
  CHECK(field_of(sc) == "learning_curve.intermediate_boundary");

  sc = good;
  sc.trials_per_session = 0;
  CHECK(field_of(sc) == "trials_per_session");

  sc = good;
  sc.inter_practice_time = -0.5;
  CHECK(field_of(sc) == "inter_practice_time");

  sc = good;
  sc.tiers[1].replica_count = 0;
  CHECK(field_of(sc) == "tiers[1].replicas");

  sc = good;
  sc.tiers[2].mean_service_time = 0.0;
  CHECK(field_of(sc) == "tiers[2].mean_service_time");

  sc = good;
  sc.learning_enabled = false;
  CHECK(field_of(sc) == "no_learning_think_time");
  sc.no_learning_think_time = 5.0;
  CHECK(field_of(sc) == "");
}

TEST_CASE("short curves may leave upper levels empty") {
  Scenario sc = reference_scenario(2, {{1, 1, 1}});
  sc.curve.session_think_times = {1.0};
  sc.curve.novice_boundary = 1;
  sc.curve.intermediate_boundary = 1;
  sc.population.initial_proportion = {2, 0, 0};
  CHECK(field_of(sc) == "");

  sc.population.initial_proportion = {1, 1, 0};
  CHECK(field_of(sc) == "population.proportion");
  sc.population.initial_proportion = {1, 0, 1};
  CHECK(field_of(sc) == "population.proportion");
}

TEST_CASE("digest tracks scenario content") {
  const Scenario a = reference_scenario(120, {{8, 8, 8}});
  Scenario b = a;
  CHECK(scenario_digest(a) == scenario_digest(b));
  CHECK(scenario_digest(a).size() == 16);
  b.tiers[0].replica_count = 9;
  CHECK(scenario_digest(a) != scenario_digest(b));
}
