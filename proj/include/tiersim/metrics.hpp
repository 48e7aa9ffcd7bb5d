#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tiersim/types.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

/// One completed trial. srt = complete_time - submit_time.
struct TrialRecord {
  int terminal = 1;
  int generation = 0;
  int session = 1;
  int trial = 1;
  Level level = Level::kNovice;
  double submit_time = 0.0;
  double complete_time = 0.0;
  double srt = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Every trial completed within the horizon, in completion order.
struct TrialLog {
  std::vector<TrialRecord> records;
  std::string scenario_digest;
  std::uint64_t seed = 0;
  double horizon = 0.0;
};

/// Session grouping used by the level estimators.
struct Grouping {
  int novice_boundary = 5;
  int intermediate_boundary = 10;
  int sessions = 15;

  static Grouping of(const LearningCurve& curve) {
    return Grouping{curve.novice_boundary, curve.intermediate_boundary, curve.sessions()};
  }
  Level level_of(int session) const;
};

/// r_{i,p}: completed trials per terminal and session.
struct TrialCounts {
  // (terminal, generation, session) -> count
  std::map<std::tuple<int, int, int>, long> per_terminal_generation;
  // (terminal, session) -> count, all generations at the terminal summed
  std::map<std::pair<int, int>, long> per_terminal;
  std::vector<long> per_session;  // index p-1
  std::array<long, 3> per_level{0, 0, 0};
  long total = 0;

  long at(int terminal, int session) const;
};

/// Estimators over one log. A mean over an empty subset is nullopt.
struct MetricsReport {
  Grouping grouping;
  std::optional<double> overall_mean_srt;
  std::vector<std::optional<double>> session_mean_srt;  // index p-1
  std::array<std::optional<double>, 3> level_mean_srt;
  std::vector<long> session_counts;
  std::array<long, 3> level_counts{0, 0, 0};
  long total_trials = 0;

  std::optional<double> level_mean(Level level) const {
    return level_mean_srt[static_cast<int>(level)];
  }
};

std::optional<double> overall_mean_srt(const TrialLog& log);
std::optional<double> session_mean_srt(const TrialLog& log, int session);
std::optional<double> level_mean_srt(const TrialLog& log, const Grouping& grouping, Level level);
TrialCounts trial_counts(const TrialLog& log, const Grouping& grouping);

/// All estimators in one pass. Records with session outside 1..sessions
/// are rejected with ValidationError.
MetricsReport compute_metrics(const TrialLog& log, const Grouping& grouping);

}  // namespace tiersim
