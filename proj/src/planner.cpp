#include "tiersim/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "tiersim/sim_core.hpp"

namespace tiersim {

std::string_view to_string(GatedMetric metric) {
  switch (metric) {
    case GatedMetric::kOverall:
      return "overall";
    case GatedMetric::kNovice:
      return "novice";
    case GatedMetric::kIntermediate:
      return "intermediate";
    case GatedMetric::kExpert:
      return "expert";
  }
  return "?";
}

std::optional<GatedMetric> parse_gated_metric(std::string_view text) {
  for (GatedMetric m : kAllGatedMetrics) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<double> metric_value(const MetricsReport& report, GatedMetric metric) {
  switch (metric) {
    case GatedMetric::kOverall:
      return report.overall_mean_srt;
    case GatedMetric::kNovice:
      return report.level_mean(Level::kNovice);
    case GatedMetric::kIntermediate:
      return report.level_mean(Level::kIntermediate);
    case GatedMetric::kExpert:
      return report.level_mean(Level::kExpert);
  }
  return std::nullopt;
}

void SlaSpec::validate() const {
  if (!std::isfinite(threshold) || threshold <= 0.0) {
    throw ValidationError("sla", "threshold must be finite and > 0");
  }
  if (gated_metrics.empty()) throw ValidationError("gate", "at least one metric must be gated");
}

SlaVerdict evaluate_sla(const std::array<std::optional<double>, 4>& values, const SlaSpec& sla) {
  SlaVerdict verdict;
  verdict.pass = true;
  for (GatedMetric m : sla.gated_metrics) {
    MetricVerdict mv;
    mv.metric = m;
    mv.value = values[static_cast<int>(m)];
    if (!mv.value) {
      mv.pass = false;
      mv.reason = "no data";
    } else if (*mv.value <= sla.threshold) {
      mv.pass = true;
      mv.reason = "ok";
    } else {
      mv.pass = false;
      mv.reason = "exceeds threshold";
    }
    verdict.pass = verdict.pass && mv.pass;
    verdict.metrics.push_back(std::move(mv));
  }
  return verdict;
}

SlaVerdict evaluate_sla(const MetricsReport& report, const SlaSpec& sla) {
  std::array<std::optional<double>, 4> values;
  for (GatedMetric m : kAllGatedMetrics) values[static_cast<int>(m)] = metric_value(report, m);
  return evaluate_sla(values, sla);
}

std::optional<LearningMode> parse_learning_mode(std::string_view text) {
  if (text == "on") return LearningMode::kOn;
  if (text == "off") return LearningMode::kOff;
  if (text == "both") return LearningMode::kBoth;
  return std::nullopt;
}

void SweepPlan::validate() const {
  if (configurations.empty()) throw ValidationError("configs", "list is empty");
  if (user_counts.empty()) throw ValidationError("users", "list is empty");
  if (seeds.empty()) throw ValidationError("seeds", "list is empty");
  for (const auto& c : configurations) {
    if (std::any_of(c.replicas.begin(), c.replicas.end(), [](int k) { return k < 1; })) {
      throw ValidationError("configs", "replica counts must be >= 1, got " + to_string(c));
    }
  }
  for (int n : user_counts) {
    if (n < 1) throw ValidationError("users", "user counts must be >= 1");
  }
  if (!std::isfinite(horizon) || horizon < 0.0) {
    throw ValidationError("horizon", "must be finite and >= 0");
  }
  if (learning != LearningMode::kOn && !base.no_learning_think_time) {
    throw ValidationError("no_learning_think_time",
                          "learning-off runs need an explicit no-learning think time");
  }
}

std::vector<bool> SweepPlan::learning_flags() const {
  switch (learning) {
    case LearningMode::kOn:
      return {true};
    case LearningMode::kOff:
      return {false};
    case LearningMode::kBoth:
      return {true, false};
  }
  return {true};
}

const ConfigSummary* SweepReport::find(const VmConfiguration& config, int users,
                                       bool learning) const {
  for (const auto& s : summaries) {
    if (s.config == config && s.users == users && s.learning == learning) return &s;
  }
  return nullptr;
}

const Selection* SweepReport::selection(int users, bool learning) const {
  for (const auto& s : selections) {
    if (s.users == users && s.learning == learning) return &s;
  }
  return nullptr;
}

Scenario scenario_for(const Scenario& base, const VmConfiguration& config, int users,
                      bool learning) {
  Scenario s = base;
  s.set_configuration(config);
  if (users != base.population.terminals) {
    const auto& prop = base.population.initial_proportion;
    if (prop[1] != 0 || prop[2] != 0) {
      throw ValidationError("population.proportion",
                            "a mixed initial proportion cannot be rescaled to N=" +
                                std::to_string(users));
    }
    s.population.initial_proportion = {users, 0, 0};
  }
  s.population.terminals = users;
  s.learning_enabled = learning;
  return s;
}

std::optional<VmConfiguration> select_min_config(std::span<const ConfigSummary> candidates) {
  std::optional<VmConfiguration> best;
  for (const auto& c : candidates) {
    if (!c.verdict.pass) continue;
    if (!best || c.config.total_vms() < best->total_vms() ||
        (c.config.total_vms() == best->total_vms() && c.config < *best)) {
      best = c.config;
    }
  }
  return best;
}

std::optional<VmConfiguration> select_min_config(const SweepReport& report, const SlaSpec& sla,
                                                 int users, bool learning) {
  std::vector<ConfigSummary> cell;
  for (const auto& s : report.summaries) {
    if (s.users != users || s.learning != learning) continue;
    ConfigSummary regated = s;
    regated.verdict = evaluate_sla(s.mean_metrics, sla);
    cell.push_back(std::move(regated));
  }
  return select_min_config(cell);
}

SweepReport sweep(const SweepPlan& plan, const SlaSpec& sla, unsigned threads) {
  plan.validate();
  sla.validate();

  SweepReport report;
  report.sla = sla;
  const std::vector<bool> flags = plan.learning_flags();
  for (int users : plan.user_counts) {
    for (bool learning : flags) {
      for (const auto& config : plan.configurations) {
        for (std::uint64_t seed : plan.seeds) {
          SweepEntry e;
          e.config = config;
          e.users = users;
          e.learning = learning;
          e.seed = seed;
          report.entries.push_back(std::move(e));
        }
      }
    }
  }

  // Each worker owns whole entries; runs share nothing.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < report.entries.size(); i = next++) {
      SweepEntry& e = report.entries[i];
      try {
        const Scenario s = scenario_for(plan.base, e.config, e.users, e.learning);
        const TrialLog log = run(s, e.seed, plan.horizon);
        e.metrics = compute_metrics(log, Grouping::of(s.curve));
        e.verdict = evaluate_sla(*e.metrics, sla);
      } catch (const std::exception& ex) {
        e.error = ex.what();
        e.verdict = evaluate_sla(std::array<std::optional<double>, 4>{}, sla);
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(report.entries.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  const std::size_t per_cell = plan.seeds.size();
  for (std::size_t start = 0; start < report.entries.size(); start += per_cell) {
    const SweepEntry& first = report.entries[start];
    ConfigSummary summary;
    summary.config = first.config;
    summary.users = first.users;
    summary.learning = first.learning;
    summary.seeds = static_cast<int>(per_cell);
    for (GatedMetric m : kAllGatedMetrics) {
      double sum = 0.0;
      bool complete = true;
      for (std::size_t k = start; k < start + per_cell; ++k) {
        const SweepEntry& e = report.entries[k];
        const auto v = e.metrics ? metric_value(*e.metrics, m) : std::nullopt;
        if (!v) {
          complete = false;
          break;
        }
        sum += *v;
      }
      if (complete) summary.mean_metrics[static_cast<int>(m)] = sum / static_cast<double>(per_cell);
    }
    for (std::size_t k = start; k < start + per_cell; ++k) {
      if (report.entries[k].error) ++summary.failed_runs;
    }
    summary.verdict = evaluate_sla(summary.mean_metrics, sla);
    report.summaries.push_back(std::move(summary));
  }

  for (int users : plan.user_counts) {
    for (bool learning : flags) {
      std::vector<ConfigSummary> cell;
      for (const auto& s : report.summaries) {
        if (s.users == users && s.learning == learning) cell.push_back(s);
      }
      report.selections.push_back(Selection{users, learning, select_min_config(cell)});
    }
  }
  return report;
}

}  // namespace tiersim
