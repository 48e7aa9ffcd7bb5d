#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tiersim/rng.hpp"
#include "tiersim/types.hpp"

namespace tiersim {

/// Session-indexed mean think times u_1..u_P plus the two boundaries that
/// group sessions into expertise levels: 1..x novice, x+1..y intermediate,
/// y+1..P expert, with 1 <= x <= y <= P. The upper two levels may be empty
/// on short curves. Means need not be monotonic.
struct LearningCurve {
  std::vector<double> session_think_times;
  int novice_boundary = 5;
  int intermediate_boundary = 10;

  int sessions() const { return static_cast<int>(session_think_times.size()); }
};

/// The 15-session location-learning curve used for the reference scenario.
LearningCurve reference_learning_curve();

struct PopulationSpec {
  int terminals = 0;
  /// Users starting at sessions 1, x+1 and y+1 respectively.
  std::array<int, 3> initial_proportion{0, 0, 0};
};

struct Scenario {
  PopulationSpec population;
  LearningCurve curve;
  int trials_per_session = 12;
  double inter_practice_time = 1.0;
  std::array<TierSpec, kTierCount> tiers{};
  bool learning_enabled = true;
  // Required when learning_enabled is false; there is no implicit fallback.
  std::optional<double> no_learning_think_time;
  RoutingPolicy routing = RoutingPolicy::kRoundRobin;
  Distribution think_distribution = Distribution::kDeterministic;
  Distribution break_distribution = Distribution::kDeterministic;

  int sessions() const { return curve.sessions(); }
  VmConfiguration configuration() const;
  void set_configuration(const VmConfiguration& config);
};

/// Reference parameters: P=15, T=12, alpha=1 s, 0.5 s service at every tier,
/// deterministic everywhere, every user starting at session 1.
Scenario reference_scenario(int terminals, const VmConfiguration& config);

/// Throws ValidationError naming the first offending field.
void validate(const Scenario& scenario);

/// 16 hex digits of FNV-1a over every field; equal scenarios, equal digests.
std::string scenario_digest(const Scenario& scenario);

/// Per-terminal lifecycle position. generation counts the users that have
/// already left this terminal.
struct TerminalState {
  int terminal = 1;  // 1..N
  int session = 1;
  int trial = 1;
  int generation = 0;

  friend bool operator==(const TerminalState&, const TerminalState&) = default;
};

/// Mean think time for a session, honoring the learning flag.
double mean_think_time(const Scenario& scenario, int session);

/// One think-time draw for a session. Deterministic distributions return the
/// mean exactly and never touch the random stream.
double think_time(const Scenario& scenario, int session, Rng& rng);

double inter_practice_time(const Scenario& scenario, Rng& rng);

Level expertise_level(const LearningCurve& curve, int session);

/// First session of users classed at a level: 1, x+1 or y+1.
int starting_session(const LearningCurve& curve, Level level);

/// N terminal states in terminal order: the novices, then intermediates,
/// then experts.
std::vector<TerminalState> initial_population(const PopulationSpec& spec,
                                              const LearningCurve& curve);

struct LifecycleAction {
  enum class Kind {
    kThink,   // next trial of the same session
    kBreak,   // inter-practice break, then the next session
    kDepart,  // session P finished; a novice takes over the terminal
  };
  Kind kind = Kind::kThink;
  TerminalState next;
};

/// Called after trial T of a session completes.
LifecycleAction on_session_complete(const TerminalState& state, const Scenario& scenario);

/// Called after any trial completes.
LifecycleAction on_trial_complete(const TerminalState& state, const Scenario& scenario);

}  // namespace tiersim
