#include "tiersim/workload.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace tiersim {

namespace {

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ValidationError(field, message);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_session(const LearningCurve& curve, int session) {
  if (session < 1 || session > curve.sessions()) {
    throw std::out_of_range("session " + std::to_string(session) + " outside 1.." +
                            std::to_string(curve.sessions()));
  }
}

double draw(Distribution d, double mean, Rng& rng) {
  return d == Distribution::kExponential ? rng.exponential(mean) : mean;
}

}  // namespace

LearningCurve reference_learning_curve() {
  return LearningCurve{
      {12.5, 10.6, 8.9, 6.8, 6.5, 6.1, 5.1, 4.2, 4.3, 4.3, 3.1, 2.7, 2.9, 2.5, 2.2}, 5, 10};
}

VmConfiguration Scenario::configuration() const {
  return VmConfiguration{{tiers[0].replica_count, tiers[1].replica_count, tiers[2].replica_count}};
}

void Scenario::set_configuration(const VmConfiguration& config) {
  for (int t = 0; t < kTierCount; ++t) tiers[t].replica_count = config.replicas[t];
}

Scenario reference_scenario(int terminals, const VmConfiguration& config) {
  Scenario s;
  s.population.terminals = terminals;
  s.population.initial_proportion = {terminals, 0, 0};
  s.curve = reference_learning_curve();
  s.set_configuration(config);
  return s;
}

void validate(const Scenario& s) {
  const auto& pop = s.population;
  require(pop.terminals >= 1, "population.terminals", "must be a positive integer");
  for (int count : pop.initial_proportion) {
    require(count >= 0, "population.proportion", "counts must be non-negative");
  }
  require(pop.initial_proportion[0] + pop.initial_proportion[1] + pop.initial_proportion[2] ==
              pop.terminals,
          "population.proportion",
          "counts sum to " +
              std::to_string(pop.initial_proportion[0] + pop.initial_proportion[1] +
                             pop.initial_proportion[2]) +
              " but terminals is " + std::to_string(pop.terminals));

  const auto& curve = s.curve;
  require(curve.sessions() >= 1, "learning_curve.think_times", "needs at least one session");
  for (double u : curve.session_think_times) {
    require(positive_finite(u), "learning_curve.think_times",
            "every mean think time must be finite and > 0");
  }
  require(curve.novice_boundary >= 1, "learning_curve.novice_boundary", "must be >= 1");
  require(curve.novice_boundary <= curve.intermediate_boundary,
          "learning_curve.intermediate_boundary", "must be >= novice_boundary");
  require(curve.intermediate_boundary <= curve.sessions(), "learning_curve.intermediate_boundary",
          "must not exceed the session count " + std::to_string(curve.sessions()));
  require(pop.initial_proportion[1] == 0 || curve.novice_boundary < curve.intermediate_boundary,
          "population.proportion", "intermediate users need a non-empty intermediate level");
  require(pop.initial_proportion[2] == 0 || curve.intermediate_boundary < curve.sessions(),
          "population.proportion", "expert users need a non-empty expert level");

  require(s.trials_per_session >= 1, "trials_per_session", "must be >= 1");
  require(std::isfinite(s.inter_practice_time) && s.inter_practice_time >= 0.0,
          "inter_practice_time", "must be finite and >= 0");

  static constexpr const char* kReplicaField[] = {"tiers[0].replicas", "tiers[1].replicas",
                                                  "tiers[2].replicas"};
  static constexpr const char* kServiceField[] = {
      "tiers[0].mean_service_time", "tiers[1].mean_service_time", "tiers[2].mean_service_time"};
  for (int t = 0; t < kTierCount; ++t) {
    require(s.tiers[t].replica_count >= 1, kReplicaField[t], "must be >= 1");
    require(positive_finite(s.tiers[t].mean_service_time), kServiceField[t],
            "must be finite and > 0");
  }

  if (!s.learning_enabled) {
    require(s.no_learning_think_time.has_value(), "no_learning_think_time",
            "required when learning is disabled");
  }
  if (s.no_learning_think_time) {
    require(positive_finite(*s.no_learning_think_time), "no_learning_think_time",
            "must be finite and > 0");
  }
}

namespace {

class Fnv1a {
 public:
  template <typename T>
  void add(const T& value) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(&value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      hash_ ^= bytes[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::string scenario_digest(const Scenario& s) {
  Fnv1a h;
  h.add(s.population.terminals);
  for (int c : s.population.initial_proportion) h.add(c);
  h.add(s.curve.sessions());
  for (double u : s.curve.session_think_times) h.add(u);
  h.add(s.curve.novice_boundary);
  h.add(s.curve.intermediate_boundary);
  h.add(s.trials_per_session);
  h.add(s.inter_practice_time);
  for (const auto& tier : s.tiers) {
    h.add(tier.replica_count);
    h.add(tier.mean_service_time);
    h.add(static_cast<int>(tier.service_distribution));
  }
  h.add(s.learning_enabled);
  h.add(s.no_learning_think_time.has_value());
  h.add(s.no_learning_think_time.value_or(0.0));
  h.add(static_cast<int>(s.routing));
  h.add(static_cast<int>(s.think_distribution));
  h.add(static_cast<int>(s.break_distribution));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.value()));
  return buf;
}

double mean_think_time(const Scenario& scenario, int session) {
  check_session(scenario.curve, session);
  if (!scenario.learning_enabled) return scenario.no_learning_think_time.value();
  return scenario.curve.session_think_times[session - 1];
}

double think_time(const Scenario& scenario, int session, Rng& rng) {
  return draw(scenario.think_distribution, mean_think_time(scenario, session), rng);
}

double inter_practice_time(const Scenario& scenario, Rng& rng) {
  if (scenario.inter_practice_time == 0.0) return 0.0;
  return draw(scenario.break_distribution, scenario.inter_practice_time, rng);
}

Level expertise_level(const LearningCurve& curve, int session) {
  check_session(curve, session);
  if (session <= curve.novice_boundary) return Level::kNovice;
  if (session <= curve.intermediate_boundary) return Level::kIntermediate;
  return Level::kExpert;
}

int starting_session(const LearningCurve& curve, Level level) {
  switch (level) {
    case Level::kNovice:
      return 1;
    case Level::kIntermediate:
      return curve.novice_boundary + 1;
    case Level::kExpert:
      return curve.intermediate_boundary + 1;
  }
  return 1;
}

std::vector<TerminalState> initial_population(const PopulationSpec& spec,
                                              const LearningCurve& curve) {
  const auto& prop = spec.initial_proportion;
  if (prop[0] < 0 || prop[1] < 0 || prop[2] < 0 || prop[0] + prop[1] + prop[2] != spec.terminals) {
    throw ValidationError("population.proportion", "counts must be non-negative and sum to " +
                                                       std::to_string(spec.terminals));
  }
  std::vector<TerminalState> out;
  out.reserve(static_cast<std::size_t>(spec.terminals));
  for (int level = 0; level < 3; ++level) {
    const int first = starting_session(curve, kAllLevels[level]);
    for (int k = 0; k < prop[level]; ++k) {
      out.push_back(TerminalState{static_cast<int>(out.size()) + 1, first, 1, 0});
    }
  }
  return out;
}

LifecycleAction on_session_complete(const TerminalState& state, const Scenario& scenario) {
  LifecycleAction action;
  action.next = state;
  action.next.trial = 1;
  if (state.session < scenario.sessions()) {
    action.kind = LifecycleAction::Kind::kBreak;
    action.next.session = state.session + 1;
  } else {
    // Replacements are novices whatever the initial proportion was.
    action.kind = LifecycleAction::Kind::kDepart;
    action.next.session = 1;
    action.next.generation = state.generation + 1;
  }
  return action;
}

LifecycleAction on_trial_complete(const TerminalState& state, const Scenario& scenario) {
  if (state.trial < scenario.trials_per_session) {
    LifecycleAction action;
    action.kind = LifecycleAction::Kind::kThink;
    action.next = state;
    action.next.trial = state.trial + 1;
    return action;
  }
  return on_session_complete(state, scenario);
}

}  // namespace tiersim
