#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "tiersim/metrics.hpp"
#include "tiersim/rng.hpp"
#include "tiersim/types.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

enum class EventKind { kThinkComplete, kServiceComplete, kBreakComplete };

/// Pending or dispatched event. Dispatch order is lexicographic on
/// (time, sequence); sequence is assigned at scheduling time.
struct EventRecord {
  double time = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::kThinkComplete;
  int terminal = 1;
  int tier = -1;     // service events only, 0-based
  int replica = -1;  // service events only, 0-based

  bool dispatches_before(const EventRecord& other) const {
    if (time != other.time) return time < other.time;
    return sequence < other.sequence;
  }
};

struct ReplicaState {
  int tier = 0;
  int index = 0;
  std::deque<int> queue;           // waiting terminals, FCFS
  std::optional<int> in_service;   // terminal being served

  bool busy() const { return in_service.has_value(); }
};

/// The single in-flight request of a terminal.
struct RequestState {
  int terminal = 1;
  int session = 1;
  int trial = 1;
  double submit_time = 0.0;
  int current_tier = 0;  // 0-based; -1 while the user thinks or rests
};

/// Uniform random replica pick on the run's stream.
int route_request(int replica_count, Rng& rng);

/// Chooses a replica for each tier arrival under the scenario's policy.
/// Round robin keeps one cursor per tier starting at replica 0.
class Router {
 public:
  Router(RoutingPolicy policy, const VmConfiguration& config);

  int route(int tier, Rng& rng);

 private:
  RoutingPolicy policy_;
  VmConfiguration config_;
  std::array<int, kTierCount> cursor_{0, 0, 0};
};

/// Sequential event loop over the closed three-tier network. Starts at time
/// 0 with empty queues and every user beginning a think of their starting
/// session. Events later than the horizon are never dispatched.
class Simulation {
 public:
  Simulation(const Scenario& scenario, std::uint64_t seed, double horizon);

  /// Dispatches the next event. Returns it, or nullopt once no event at
  /// time <= horizon remains.
  std::optional<EventRecord> step();

  void run_to_horizon();

  double now() const { return now_; }
  const TrialLog& log() const { return log_; }
  TrialLog take_log() { return std::move(log_); }

  std::span<const ReplicaState> replicas(int tier) const { return replicas_[tier]; }
  std::span<const TerminalState> terminals() const { return terminals_; }
  std::size_t pending_events() const { return pending_.size(); }

 private:
  struct Later {
    bool operator()(const EventRecord& a, const EventRecord& b) const {
      return b.dispatches_before(a);
    }
  };

  void schedule(double time, EventKind kind, int terminal, int tier = -1, int replica = -1);
  void advance(const EventRecord& event);
  void arrive(int tier, int terminal);
  void start_service(ReplicaState& replica, int terminal);
  void complete_trial(int terminal);

  TerminalState& terminal_state(int terminal) { return terminals_[terminal - 1]; }
  RequestState& request(int terminal) { return requests_[terminal - 1]; }

  Scenario scenario_;
  double horizon_;
  Rng rng_;
  Router router_;
  double now_ = 0.0;
  std::uint64_t next_sequence_ = 0;
  std::priority_queue<EventRecord, std::vector<EventRecord>, Later> pending_;
  std::array<std::vector<ReplicaState>, kTierCount> replicas_;
  std::vector<TerminalState> terminals_;
  std::vector<RequestState> requests_;
  TrialLog log_;
};

/// Validates, simulates to the horizon, returns the log. Pure in
/// (scenario, seed, horizon). horizon must be finite and >= 0.
TrialLog run(const Scenario& scenario, std::uint64_t seed, double horizon);

}  // namespace tiersim
