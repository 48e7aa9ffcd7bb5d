#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tiersim/metrics.hpp"
#include "tiersim/planner.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

inline constexpr int kScenarioSchemaVersion = 1;

/// Parsed scenario document. Terminal count, replica counts and seeds are
/// never defaulted: they stay unset until the file or an override supplies
/// them. Everything else falls back to the reference parameters.
struct ScenarioFile {
  Scenario scenario;
  bool has_terminals = false;
  bool has_proportion = false;
  bool has_replicas = false;
  std::vector<std::uint64_t> seeds;
  double horizon = 3600.0;
};

struct ScenarioOverrides {
  std::optional<int> terminals;
  std::optional<VmConfiguration> configuration;
  std::optional<bool> learning;
};

/// Throws ValidationError with a dotted field path.
ScenarioFile parse_scenario(std::string_view text);
ScenarioFile load_scenario(const std::string& path);

/// Applies overrides and validates. Throws ValidationError naming the
/// missing or offending field.
Scenario resolve_scenario(const ScenarioFile& file, const ScenarioOverrides& overrides = {});

/// Canonical document for a resolved scenario (parses back to an equal one).
std::string scenario_to_text(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                             double horizon);

/// Shortest round-trip decimal in fixed notation, padded to >= 6 decimals.
std::string format_time(double seconds);

inline constexpr std::string_view kTrialCsvHeader =
    "terminal,generation,session,trial,level,submit_s,complete_s,srt_s";

void write_trial_csv(std::ostream& out, const TrialLog& log);
std::string trial_csv(const TrialLog& log);

/// Throws ValidationError with field "row <n>" (1-based data rows; the
/// header is row 0) for malformed input.
TrialLog read_trial_csv(std::istream& in);
TrialLog read_trial_csv_file(const std::string& path);

std::string metrics_json(const MetricsReport& report);
std::string metrics_text(const MetricsReport& report);

std::string sweep_json(const SweepReport& report);
/// Aligned tables, one per metric: configurations down, user counts across.
std::string sweep_table(const SweepReport& report);

}  // namespace tiersim
