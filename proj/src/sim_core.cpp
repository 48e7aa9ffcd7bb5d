#include "tiersim/sim_core.hpp"

#include <cmath>
#include <string>

namespace tiersim {

namespace {

[[noreturn]] void invariant_failure(const std::string& what, const EventRecord& e) {
  throw InternalError("engine invariant violated: " + what + " (t=" + std::to_string(e.time) +
                      ", seq=" + std::to_string(e.sequence) +
                      ", terminal=" + std::to_string(e.terminal) +
                      ", tier=" + std::to_string(e.tier) +
                      ", replica=" + std::to_string(e.replica) + ")");
}

}  // namespace

int route_request(int replica_count, Rng& rng) {
  return static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(replica_count)));
}

Router::Router(RoutingPolicy policy, const VmConfiguration& config)
    : policy_(policy), config_(config) {}

int Router::route(int tier, Rng& rng) {
  const int k = config_.replicas[tier];
  if (policy_ == RoutingPolicy::kUniformRandom) return route_request(k, rng);
  const int chosen = cursor_[tier];
  cursor_[tier] = (chosen + 1) % k;
  return chosen;
}

Simulation::Simulation(const Scenario& scenario, std::uint64_t seed, double horizon)
    : scenario_(scenario),
      horizon_(horizon),
      rng_(seed),
      router_(scenario.routing, scenario.configuration()) {
  if (!std::isfinite(horizon) || horizon < 0.0) {
    throw ValidationError("horizon", "must be finite and >= 0");
  }
  validate(scenario_);

  for (int t = 0; t < kTierCount; ++t) {
    const int k = scenario_.tiers[t].replica_count;
    replicas_[t].resize(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
      replicas_[t][r].tier = t;
      replicas_[t][r].index = r;
    }
  }
  terminals_ = initial_population(scenario_.population, scenario_.curve);
  requests_.resize(terminals_.size());

  log_.scenario_digest = scenario_digest(scenario_);
  log_.seed = seed;
  log_.horizon = horizon;

  // Terminal order gives the initial batch its sequence numbers.
  for (const TerminalState& ts : terminals_) {
    requests_[ts.terminal - 1].terminal = ts.terminal;
    requests_[ts.terminal - 1].current_tier = -1;
    schedule(think_time(scenario_, ts.session, rng_), EventKind::kThinkComplete, ts.terminal);
  }
}

void Simulation::schedule(double time, EventKind kind, int terminal, int tier, int replica) {
  pending_.push(EventRecord{time, next_sequence_++, kind, terminal, tier, replica});
}

std::optional<EventRecord> Simulation::step() {
  if (pending_.empty() || pending_.top().time > horizon_) return std::nullopt;
  const EventRecord event = pending_.top();
  pending_.pop();
  if (event.time < now_) invariant_failure("event scheduled in the past", event);
  now_ = event.time;
  advance(event);
  return event;
}

void Simulation::run_to_horizon() {
  while (step()) {
  }
}

void Simulation::advance(const EventRecord& event) {
  switch (event.kind) {
    case EventKind::kThinkComplete: {
      const TerminalState& ts = terminal_state(event.terminal);
      RequestState& req = request(event.terminal);
      if (req.current_tier != -1) invariant_failure("terminal submitted twice", event);
      req.session = ts.session;
      req.trial = ts.trial;
      req.submit_time = now_;
      req.current_tier = 0;
      arrive(0, event.terminal);
      break;
    }
    case EventKind::kServiceComplete: {
      ReplicaState& replica = replicas_[event.tier][event.replica];
      if (replica.in_service != event.terminal) {
        invariant_failure("completion for a request not in service", event);
      }
      RequestState& req = request(event.terminal);
      if (req.current_tier != event.tier) invariant_failure("request at wrong tier", event);
      replica.in_service.reset();

      if (event.tier + 1 < kTierCount) {
        req.current_tier = event.tier + 1;
        arrive(event.tier + 1, event.terminal);
      } else {
        complete_trial(event.terminal);
      }
      if (!replica.queue.empty()) {
        const int next = replica.queue.front();
        replica.queue.pop_front();
        start_service(replica, next);
      }
      break;
    }
    case EventKind::kBreakComplete: {
      const TerminalState& ts = terminal_state(event.terminal);
      schedule(now_ + think_time(scenario_, ts.session, rng_), EventKind::kThinkComplete,
               event.terminal);
      break;
    }
  }
}

void Simulation::arrive(int tier, int terminal) {
  const int r = router_.route(tier, rng_);
  ReplicaState& replica = replicas_[tier][r];
  if (replica.busy()) {
    replica.queue.push_back(terminal);
  } else {
    start_service(replica, terminal);
  }
}

void Simulation::start_service(ReplicaState& replica, int terminal) {
  replica.in_service = terminal;
  const TierSpec& spec = scenario_.tiers[replica.tier];
  const double service = spec.service_distribution == Distribution::kExponential
                             ? rng_.exponential(spec.mean_service_time)
                             : spec.mean_service_time;
  schedule(now_ + service, EventKind::kServiceComplete, terminal, replica.tier, replica.index);
}

void Simulation::complete_trial(int terminal) {
  RequestState& req = request(terminal);
  TerminalState& ts = terminal_state(terminal);

  TrialRecord rec;
  rec.terminal = terminal;
  rec.generation = ts.generation;
  rec.session = req.session;
  rec.trial = req.trial;
  rec.level = expertise_level(scenario_.curve, req.session);
  rec.submit_time = req.submit_time;
  rec.complete_time = now_;
  rec.srt = now_ - req.submit_time;
  log_.records.push_back(rec);
  req.current_tier = -1;

  const LifecycleAction action = on_trial_complete(ts, scenario_);
  ts = action.next;
  switch (action.kind) {
    case LifecycleAction::Kind::kThink:
    case LifecycleAction::Kind::kDepart:
      // A replacement novice starts thinking at the departure instant.
      schedule(now_ + think_time(scenario_, ts.session, rng_), EventKind::kThinkComplete,
               terminal);
      break;
    case LifecycleAction::Kind::kBreak:
      schedule(now_ + inter_practice_time(scenario_, rng_), EventKind::kBreakComplete, terminal);
      break;
  }
}

TrialLog run(const Scenario& scenario, std::uint64_t seed, double horizon) {
  Simulation sim(scenario, seed, horizon);
  sim.run_to_horizon();
  return sim.take_log();
}

}  // namespace tiersim
