#include "tiersim/metrics.hpp"

#include <string>

namespace tiersim {

namespace {

struct Accumulator {
  double sum = 0.0;
  long count = 0;

  void add(double srt) {
    sum += srt;
    ++count;
  }
  std::optional<double> mean() const {
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  }
};

void check_grouping(const Grouping& g) {
  if (g.novice_boundary < 1 || g.novice_boundary > g.intermediate_boundary ||
      g.intermediate_boundary > g.sessions) {
    throw ValidationError("grouping", "need 1 <= x <= y <= P, got x=" +
                                          std::to_string(g.novice_boundary) +
                                          " y=" + std::to_string(g.intermediate_boundary) +
                                          " P=" + std::to_string(g.sessions));
  }
}

}  // namespace

Level Grouping::level_of(int session) const {
  if (session <= novice_boundary) return Level::kNovice;
  if (session <= intermediate_boundary) return Level::kIntermediate;
  return Level::kExpert;
}

long TrialCounts::at(int terminal, int session) const {
  auto it = per_terminal.find({terminal, session});
  return it == per_terminal.end() ? 0 : it->second;
}

std::optional<double> overall_mean_srt(const TrialLog& log) {
  Accumulator acc;
  for (const TrialRecord& r : log.records) acc.add(r.srt);
  return acc.mean();
}

std::optional<double> session_mean_srt(const TrialLog& log, int session) {
  Accumulator acc;
  for (const TrialRecord& r : log.records) {
    if (r.session == session) acc.add(r.srt);
  }
  return acc.mean();
}

std::optional<double> level_mean_srt(const TrialLog& log, const Grouping& grouping, Level level) {
  check_grouping(grouping);
  Accumulator acc;
  for (const TrialRecord& r : log.records) {
    if (grouping.level_of(r.session) == level) acc.add(r.srt);
  }
  return acc.mean();
}

TrialCounts trial_counts(const TrialLog& log, const Grouping& grouping) {
  check_grouping(grouping);
  TrialCounts counts;
  counts.per_session.assign(static_cast<std::size_t>(grouping.sessions), 0);
  for (const TrialRecord& r : log.records) {
    if (r.session < 1 || r.session > grouping.sessions) {
      throw ValidationError("session", "record session " + std::to_string(r.session) +
                                           " outside 1.." + std::to_string(grouping.sessions));
    }
    ++counts.per_terminal_generation[{r.terminal, r.generation, r.session}];
    ++counts.per_terminal[{r.terminal, r.session}];
    ++counts.per_session[r.session - 1];
    ++counts.per_level[static_cast<int>(grouping.level_of(r.session))];
    ++counts.total;
  }
  return counts;
}

MetricsReport compute_metrics(const TrialLog& log, const Grouping& grouping) {
  check_grouping(grouping);
  Accumulator overall;
  std::vector<Accumulator> by_session(static_cast<std::size_t>(grouping.sessions));
  std::array<Accumulator, 3> by_level;

  for (const TrialRecord& r : log.records) {
    if (r.session < 1 || r.session > grouping.sessions) {
      throw ValidationError("session", "record session " + std::to_string(r.session) +
                                           " outside 1.." + std::to_string(grouping.sessions));
    }
    overall.add(r.srt);
    by_session[r.session - 1].add(r.srt);
    by_level[static_cast<int>(grouping.level_of(r.session))].add(r.srt);
  }

  MetricsReport report;
  report.grouping = grouping;
  report.overall_mean_srt = overall.mean();
  report.total_trials = overall.count;
  for (const Accumulator& acc : by_session) {
    report.session_mean_srt.push_back(acc.mean());
    report.session_counts.push_back(acc.count);
  }
  for (int l = 0; l < 3; ++l) {
    report.level_mean_srt[l] = by_level[l].mean();
    report.level_counts[l] = by_level[l].count;
  }
  return report;
}

}  // namespace tiersim
