#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tiersim/sim_core.hpp"

using namespace tiersim;

namespace {

Scenario one_session(int terminals, double think, int trials, int sessions) {
  Scenario sc = reference_scenario(terminals, {{1, 1, 1}});
  sc.curve.session_think_times.assign(static_cast<std::size_t>(sessions), think);
  sc.curve.novice_boundary = 1;
  sc.curve.intermediate_boundary = std::min(2, sessions);
  sc.trials_per_session = trials;
  return sc;
}

void check_same(const std::vector<TrialRecord>& got, const std::vector<TrialRecord>& want) {
  const std::size_t n = std::min(got.size(), want.size());
  for (std::size_t i = 0; i < n; ++i) {
    CAPTURE(i);
    CAPTURE(got[i].terminal);
    CAPTURE(want[i].terminal);
    CAPTURE(got[i].complete_time);
    CAPTURE(want[i].complete_time);
    REQUIRE(got[i] == want[i]);
  }
  REQUIRE(got.size() == want.size());
}

}  // namespace

TEST_CASE("single user sees only service time") {
  const Scenario sc = reference_scenario(1, {{3, 1, 2}});
  const TrialLog log = run(sc, 42, 3600.0);
  REQUIRE(!log.records.empty());
  for (const TrialRecord& r : log.records) CHECK(r.srt == 1.5);
}

TEST_CASE("two users, hand trace") {
  const Scenario sc = one_session(2, 1.0, 1, 1);
  const TrialLog log = run(sc, 1, 4.0);
  REQUIRE(log.records.size() == 2);
  CHECK(log.records[0].terminal == 1);
  CHECK(log.records[0].submit_time == 1.0);
  CHECK(log.records[0].complete_time == 2.5);
  CHECK(log.records[0].srt == 1.5);
  CHECK(log.records[1].terminal == 2);
  CHECK(log.records[1].submit_time == 1.0);
  CHECK(log.records[1].complete_time == 3.0);
  CHECK(log.records[1].srt == 2.0);

  const TrialLog longer = run(sc, 1, 60.0);
  REQUIRE(longer.records.size() > 2);
  CHECK(longer.records[0].srt == 1.5);
  CHECK(longer.records[1].srt == 2.0);
  for (std::size_t i = 2; i < longer.records.size(); ++i) {
    CHECK(longer.records[i].srt == 1.5);
    CHECK(longer.records[i].generation >= 1);
  }
}

TEST_CASE("three users, hand trace across a replacement") {
  const Scenario sc = one_session(3, 1.0, 1, 1);
  const TrialLog log = run(sc, 1, 6.0);
  REQUIRE(log.records.size() == 6);
  const double srt[] = {1.5, 2.0, 2.5, 1.5, 1.5, 1.5};
  const double done[] = {2.5, 3.0, 3.5, 5.0, 5.5, 6.0};
  const int gen[] = {0, 0, 0, 1, 1, 1};
  for (int i = 0; i < 6; ++i) {
    CAPTURE(i);
    CHECK(log.records[i].terminal == i % 3 + 1);
    CHECK(log.records[i].srt == srt[i]);
    CHECK(log.records[i].complete_time == done[i]);
    CHECK(log.records[i].generation == gen[i]);
    CHECK(log.records[i].session == 1);
  }
  CHECK(run(sc, 1, 5.9).records.size() == 5);
}

TEST_CASE("break between sessions") {
  // One user, two sessions of one trial, think 1, break 1:
  // 1.0 -> 2.5, break to 3.5, think to 4.5 -> 6.0.
  Scenario sc = one_session(1, 1.0, 1, 2);
  sc.curve.intermediate_boundary = 2;
  const TrialLog log = run(sc, 1, 10.0);
  REQUIRE(log.records.size() >= 2);
  CHECK(log.records[0].complete_time == 2.5);
  CHECK(log.records[1].session == 2);
  CHECK(log.records[1].submit_time == 4.5);
  CHECK(log.records[1].complete_time == 6.0);
}

TEST_CASE("horizon zero gives an empty log") {
  const TrialLog log = run(reference_scenario(120, {{8, 8, 8}}), 1, 0.0);
  CHECK(log.records.empty());
  CHECK(log.horizon == 0.0);
}

TEST_CASE("bad horizons are refused") {
  const Scenario sc = reference_scenario(2, {{1, 1, 1}});
  CHECK_THROWS_AS(run(sc, 1, -1.0), ValidationError);
  CHECK_THROWS_AS(run(sc, 1, std::numeric_limits<double>::infinity()), ValidationError);
  CHECK_THROWS_AS(run(sc, 1, std::nan("")), ValidationError);
}

TEST_CASE("invalid scenarios are refused") {
  Scenario sc = reference_scenario(2, {{1, 1, 1}});
  sc.population.initial_proportion = {1, 0, 0};
  CHECK_THROWS_AS(run(sc, 1, 10.0), ValidationError);
}

TEST_CASE("single-replica runs match the tandem recursion") {
  oracle::ScenarioGen gen(2024);
  for (int i = 0; i < 200; ++i) {
    const Scenario sc = gen.tandem();
    const double horizon = gen.real(5.0, 150.0);
    CAPTURE(i);
    check_same(run(sc, 9, horizon).records, oracle::tandem_log(sc, horizon));
  }
}

TEST_CASE("hand traces match the tandem recursion") {
  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    const Scenario sc = one_session(n, 1.0, 2, 3);
    check_same(run(sc, 1, 80.0).records, oracle::tandem_log(sc, 80.0));
  }
}

TEST_CASE("route_request") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) CHECK(route_request(1, rng) == 0);

  std::vector<long> hits(8, 0);
  const long draws = 1000000;
  for (long i = 0; i < draws; ++i) {
    const int r = route_request(8, rng);
    REQUIRE(r >= 0);
    REQUIRE(r < 8);
    ++hits[r];
  }
  for (long h : hits) CHECK(std::abs(static_cast<double>(h) / draws - 0.125) <= 0.125 * 0.01);

  Rng a(77), b(77);
  for (int i = 0; i < 1000; ++i) CHECK(route_request(5, a) == route_request(5, b));
}

TEST_CASE("round robin cycles per tier") {
  Router router(RoutingPolicy::kRoundRobin, {{3, 1, 2}});
  Rng rng(1);
  for (int i = 0; i < 9; ++i) CHECK(router.route(0, rng) == i % 3);
  for (int i = 0; i < 4; ++i) CHECK(router.route(1, rng) == 0);
  for (int i = 0; i < 4; ++i) CHECK(router.route(2, rng) == i % 2);
}

TEST_CASE("engine invariants hold at every step") {
  oracle::ScenarioGen gen(31337);
  for (int i = 0; i < 60; ++i) {
    const Scenario sc = gen.any();
    const double horizon = gen.real(10.0, 200.0);
    const int n = sc.population.terminals;
    CAPTURE(i);

    Simulation sim(sc, 1000 + i, horizon);
    std::optional<EventRecord> prev;
    std::vector<int> next_tier(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> busy_terminal(static_cast<std::size_t>(n) + 1, 0);
    std::size_t logged = 0;
    while (auto ev = sim.step()) {
      REQUIRE(ev->time <= horizon);
      if (prev) REQUIRE(prev->dispatches_before(*ev));
      prev = ev;

      if (ev->kind == EventKind::kServiceComplete) {
        // Tiers are visited 1, 2, 3 in order.
        REQUIRE(ev->tier == next_tier[ev->terminal]);
        next_tier[ev->terminal] = (ev->tier + 1) % kTierCount;
      }
      if (sim.log().records.size() > logged) {
        REQUIRE(sim.log().records.size() == logged + 1);
        REQUIRE(ev->kind == EventKind::kServiceComplete);
        REQUIRE(ev->tier == kTierCount - 1);
        const TrialRecord& r = sim.log().records.back();
        REQUIRE(r.terminal == ev->terminal);
        REQUIRE(r.complete_time == ev->time);
        REQUIRE(r.srt > 0.0);
        logged = sim.log().records.size();
      }

      std::fill(busy_terminal.begin(), busy_terminal.end(), 0);
      for (int t = 0; t < kTierCount; ++t) {
        for (const ReplicaState& rep : sim.replicas(t)) {
          // Work conservation: nobody waits at an idle replica.
          REQUIRE((rep.queue.empty() || rep.busy()));
          if (rep.in_service) ++busy_terminal[*rep.in_service];
          for (int waiting : rep.queue) ++busy_terminal[waiting];
        }
      }
      // A terminal has at most one request in the network.
      for (int k = 1; k <= n; ++k) REQUIRE(busy_terminal[k] <= 1);
    }
    CHECK(sim.log().records.size() == logged);
  }
}

TEST_CASE("deterministic service bounds every response time") {
  oracle::ScenarioGen gen(4);
  for (int i = 0; i < 50; ++i) {
    Scenario sc = gen.any();
    for (auto& tier : sc.tiers) tier.service_distribution = Distribution::kDeterministic;
    const double floor =
        sc.tiers[0].mean_service_time + sc.tiers[1].mean_service_time + sc.tiers[2].mean_service_time;
    for (const TrialRecord& r : run(sc, i, 120.0).records) {
      REQUIRE(r.srt >= floor * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("trials per terminal follow the lifecycle") {
  oracle::ScenarioGen gen(8);
  for (int i = 0; i < 50; ++i) {
    const Scenario sc = gen.any();
    const TrialLog log = run(sc, i, 150.0);
    std::map<int, TrialRecord> last;
    for (const TrialRecord& r : log.records) {
      REQUIRE(r.complete_time <= 150.0);
      REQUIRE(std::abs(r.complete_time - r.submit_time - r.srt) <= 1e-9);
      auto it = last.find(r.terminal);
      if (it != last.end()) {
        const TrialRecord& p = it->second;
        REQUIRE(r.submit_time >= p.complete_time);
        if (p.trial < sc.trials_per_session) {
          REQUIRE((r.generation == p.generation && r.session == p.session &&
                   r.trial == p.trial + 1));
        } else if (p.session < sc.sessions()) {
          REQUIRE((r.generation == p.generation && r.session == p.session + 1 && r.trial == 1));
        } else {
          REQUIRE((r.generation == p.generation + 1 && r.session == 1 && r.trial == 1));
        }
      }
      last[r.terminal] = r;
    }
  }
}

TEST_CASE("same inputs, same log") {
  oracle::ScenarioGen gen(12);
  for (int i = 0; i < 20; ++i) {
    const Scenario sc = gen.any();
    const TrialLog a = run(sc, 555, 100.0);
    const TrialLog b = run(sc, 555, 100.0);
    CHECK(a.records == b.records);
    CHECK(a.scenario_digest == b.scenario_digest);
  }
  const Scenario ref = reference_scenario(120, {{8, 8, 8}});
  CHECK(run(ref, 3, 3600.0).records == run(ref, 3, 3600.0).records);
}
