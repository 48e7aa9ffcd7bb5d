#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tiersim/metrics.hpp"
#include "tiersim/types.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

enum class GatedMetric { kOverall = 0, kNovice = 1, kIntermediate = 2, kExpert = 3 };

inline constexpr std::array<GatedMetric, 4> kAllGatedMetrics = {
    GatedMetric::kOverall, GatedMetric::kNovice, GatedMetric::kIntermediate, GatedMetric::kExpert};

std::string_view to_string(GatedMetric metric);
std::optional<GatedMetric> parse_gated_metric(std::string_view text);

std::optional<double> metric_value(const MetricsReport& report, GatedMetric metric);

struct SlaSpec {
  double threshold = 3.5;
  std::vector<GatedMetric> gated_metrics{GatedMetric::kOverall};

  void validate() const;
};

struct MetricVerdict {
  GatedMetric metric = GatedMetric::kOverall;
  std::optional<double> value;
  bool pass = false;
  std::string reason;  // "ok", "exceeds threshold" or "no data"
};

struct SlaVerdict {
  std::vector<MetricVerdict> metrics;
  bool pass = false;
};

/// A metric passes iff present and <= threshold; the verdict passes iff
/// every gated metric does.
SlaVerdict evaluate_sla(const std::array<std::optional<double>, 4>& values, const SlaSpec& sla);
SlaVerdict evaluate_sla(const MetricsReport& report, const SlaSpec& sla);

enum class LearningMode { kOn, kOff, kBoth };

std::optional<LearningMode> parse_learning_mode(std::string_view text);

struct SweepPlan {
  Scenario base;
  std::vector<VmConfiguration> configurations;
  std::vector<int> user_counts;
  std::vector<std::uint64_t> seeds;
  LearningMode learning = LearningMode::kOn;
  double horizon = 3600.0;

  /// Throws ValidationError. Learning-off runs need an explicit
  /// no_learning_think_time in the base scenario.
  void validate() const;
  std::vector<bool> learning_flags() const;
};

/// One (config, N, seed, learning) run.
struct SweepEntry {
  VmConfiguration config;
  int users = 0;
  std::uint64_t seed = 0;
  bool learning = true;
  std::optional<MetricsReport> metrics;
  std::optional<std::string> error;
  SlaVerdict verdict;
};

/// Seed-averaged view of one (config, N, learning) cell. Each metric is the
/// arithmetic mean of the per-seed estimates, absent if any seed lacks it.
struct ConfigSummary {
  VmConfiguration config;
  int users = 0;
  bool learning = true;
  std::array<std::optional<double>, 4> mean_metrics;
  int seeds = 0;
  int failed_runs = 0;
  SlaVerdict verdict;
};

struct Selection {
  int users = 0;
  bool learning = true;
  std::optional<VmConfiguration> config;
};

struct SweepReport {
  SlaSpec sla;
  std::vector<SweepEntry> entries;
  std::vector<ConfigSummary> summaries;
  std::vector<Selection> selections;

  const ConfigSummary* find(const VmConfiguration& config, int users, bool learning) const;
  const Selection* selection(int users, bool learning) const;
};

/// Scenario for one sweep cell: base with N and replicas replaced. An
/// all-novice base proportion is rescaled to N.
Scenario scenario_for(const Scenario& base, const VmConfiguration& config, int users,
                      bool learning);

/// Runs every tuple, concurrently when threads != 1 (0 = hardware
/// concurrency). A failing run becomes an entry with error set; the sweep
/// carries on. The report does not depend on scheduling.
SweepReport sweep(const SweepPlan& plan, const SlaSpec& sla, unsigned threads = 0);

/// Fewest total VMs among passing candidates, ties broken by (k1, k2, k3).
std::optional<VmConfiguration> select_min_config(std::span<const ConfigSummary> candidates);

/// Re-gates the report's summaries for one (N, learning) cell under sla.
std::optional<VmConfiguration> select_min_config(const SweepReport& report, const SlaSpec& sla,
                                                 int users, bool learning);

}  // namespace tiersim
