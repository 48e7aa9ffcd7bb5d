#include <cstdlib>
#include <algorithm>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "tiersim/io.hpp"
#include "tiersim/metrics.hpp"
#include "tiersim/planner.hpp"
#include "tiersim/sim_core.hpp"
#include "tiersim/tiersim.h"

struct tiersim_scenario {
  tiersim::ScenarioFile file;
  tiersim::ScenarioOverrides overrides;
  std::optional<tiersim::RoutingPolicy> routing;

  tiersim::Scenario resolve() const {
    tiersim::Scenario s = tiersim::resolve_scenario(file, overrides);
    if (routing) s.routing = *routing;
    return s;
  }
};

struct tiersim_log {
  tiersim::TrialLog log;
};

struct tiersim_metrics {
  tiersim::MetricsReport report;
};

struct tiersim_sweep {
  tiersim_scenario base;
  tiersim::SweepPlan plan;
  tiersim::SlaSpec sla;
  unsigned threads = 0;
};

struct tiersim_sweep_report {
  tiersim::SweepReport report;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_field;

tiersim_status fail(tiersim_status status, std::string message, std::string field = {}) {
  last_error = std::move(message);
  last_field = std::move(field);
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename F>
tiersim_status guarded(F&& body) {
  try {
    last_error.clear();
    last_field.clear();
    body();
    return TIERSIM_OK;
  } catch (const tiersim::ValidationError& e) {
    return fail(TIERSIM_ERR_VALIDATION, e.what(), e.field());
  } catch (const tiersim::InternalError& e) {
    return fail(TIERSIM_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TIERSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::out_of_range& e) {
    return fail(TIERSIM_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(TIERSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TIERSIM_ERR_INTERNAL, "unknown exception");
  }
}

tiersim_status null_argument(const char* name) {
  return fail(TIERSIM_ERR_ARGUMENT, std::string("null argument: ") + name);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

tiersim_status write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return fail(TIERSIM_ERR_IO, "cannot open " + path + " for writing");
  out << body;
  out.flush();
  if (!out) return fail(TIERSIM_ERR_IO, "write failed: " + path);
  return TIERSIM_OK;
}

tiersim::VmConfiguration config_of(int k1, int k2, int k3) {
  return tiersim::VmConfiguration{{k1, k2, k3}};
}

}  // namespace

extern "C" {

const char* tiersim_version(void) { return "1.0.0"; }

const char* tiersim_last_error(void) { return last_error.c_str(); }

const char* tiersim_last_error_field(void) { return last_field.c_str(); }

void tiersim_string_free(char* text) { std::free(text); }

tiersim_status tiersim_scenario_parse(const char* text, size_t length, tiersim_scenario** out) {
  if (!text || !out) return null_argument("text/out");
  return guarded([&] {
    auto s = std::make_unique<tiersim_scenario>();
    s->file = tiersim::parse_scenario(std::string_view(text, length));
    *out = s.release();
  });
}

tiersim_status tiersim_scenario_load(const char* path, tiersim_scenario** out) {
  if (!path || !out) return null_argument("path/out");
  return guarded([&] {
    auto s = std::make_unique<tiersim_scenario>();
    s->file = tiersim::load_scenario(path);
    *out = s.release();
  });
}

tiersim_status tiersim_scenario_reference(int terminals, int k1, int k2, int k3,
                                          tiersim_scenario** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    auto s = std::make_unique<tiersim_scenario>();
    s->file.scenario = tiersim::reference_scenario(terminals, config_of(k1, k2, k3));
    s->file.has_terminals = true;
    s->file.has_proportion = true;
    s->file.has_replicas = true;
    tiersim::validate(s->file.scenario);
    *out = s.release();
  });
}

void tiersim_scenario_free(tiersim_scenario* scenario) { delete scenario; }

tiersim_status tiersim_scenario_set_terminals(tiersim_scenario* scenario, int terminals) {
  if (!scenario) return null_argument("scenario");
  if (terminals < 1) {
    return fail(TIERSIM_ERR_VALIDATION, "population.terminals: must be >= 1",
                "population.terminals");
  }
  scenario->overrides.terminals = terminals;
  return TIERSIM_OK;
}

tiersim_status tiersim_scenario_set_configuration(tiersim_scenario* scenario, int k1, int k2,
                                                  int k3) {
  if (!scenario) return null_argument("scenario");
  if (k1 < 1 || k2 < 1 || k3 < 1) {
    return fail(TIERSIM_ERR_VALIDATION, "tiers[].replicas: must be >= 1", "tiers[].replicas");
  }
  scenario->overrides.configuration = config_of(k1, k2, k3);
  return TIERSIM_OK;
}

tiersim_status tiersim_scenario_set_learning(tiersim_scenario* scenario, int enabled) {
  if (!scenario) return null_argument("scenario");
  scenario->overrides.learning = enabled != 0;
  return TIERSIM_OK;
}

tiersim_status tiersim_scenario_set_routing(tiersim_scenario* scenario, tiersim_routing routing) {
  if (!scenario) return null_argument("scenario");
  switch (routing) {
    case TIERSIM_ROUND_ROBIN:
      scenario->routing = tiersim::RoutingPolicy::kRoundRobin;
      return TIERSIM_OK;
    case TIERSIM_UNIFORM_RANDOM:
      scenario->routing = tiersim::RoutingPolicy::kUniformRandom;
      return TIERSIM_OK;
  }
  return fail(TIERSIM_ERR_ARGUMENT, "unknown routing policy");
}

tiersim_status tiersim_scenario_validate(const tiersim_scenario* scenario) {
  if (!scenario) return null_argument("scenario");
  return guarded([&] { (void)scenario->resolve(); });
}

tiersim_status tiersim_scenario_seeds(const tiersim_scenario* scenario, uint64_t* seeds,
                                      size_t capacity, size_t* count) {
  if (!scenario || !count) return null_argument("scenario/count");
  const auto& list = scenario->file.seeds;
  *count = list.size();
  for (size_t i = 0; i < list.size() && i < capacity && seeds; ++i) seeds[i] = list[i];
  return TIERSIM_OK;
}

tiersim_status tiersim_scenario_horizon(const tiersim_scenario* scenario, double* horizon) {
  if (!scenario || !horizon) return null_argument("scenario/horizon");
  *horizon = scenario->file.horizon;
  return TIERSIM_OK;
}

tiersim_status tiersim_scenario_grouping(const tiersim_scenario* scenario, int* novice_boundary,
                                         int* intermediate_boundary, int* sessions) {
  if (!scenario) return null_argument("scenario");
  const auto& curve = scenario->file.scenario.curve;
  if (novice_boundary) *novice_boundary = curve.novice_boundary;
  if (intermediate_boundary) *intermediate_boundary = curve.intermediate_boundary;
  if (sessions) *sessions = curve.sessions();
  return TIERSIM_OK;
}

tiersim_status tiersim_scenario_to_text(const tiersim_scenario* scenario, char** out) {
  if (!scenario || !out) return null_argument("scenario/out");
  return guarded([&] {
    *out = copy_string(tiersim::scenario_to_text(scenario->resolve(), scenario->file.seeds,
                                                 scenario->file.horizon));
  });
}

tiersim_status tiersim_run(const tiersim_scenario* scenario, uint64_t seed, double horizon,
                           tiersim_log** out) {
  if (!scenario || !out) return null_argument("scenario/out");
  return guarded([&] {
    auto log = std::make_unique<tiersim_log>();
    log->log = tiersim::run(scenario->resolve(), seed, horizon);
    *out = log.release();
  });
}

void tiersim_log_free(tiersim_log* log) { delete log; }

size_t tiersim_log_size(const tiersim_log* log) { return log ? log->log.records.size() : 0; }

tiersim_status tiersim_log_get(const tiersim_log* log, size_t index, tiersim_trial* out) {
  if (!log || !out) return null_argument("log/out");
  if (index >= log->log.records.size()) return fail(TIERSIM_ERR_ARGUMENT, "index out of range");
  const auto& r = log->log.records[index];
  out->terminal = r.terminal;
  out->generation = r.generation;
  out->session = r.session;
  out->trial = r.trial;
  out->level = static_cast<tiersim_level>(r.level);
  out->submit_s = r.submit_time;
  out->complete_s = r.complete_time;
  out->srt_s = r.srt;
  return TIERSIM_OK;
}

int tiersim_log_max_session(const tiersim_log* log) {
  int best = 0;
  if (log) {
    for (const auto& r : log->log.records) best = std::max(best, r.session);
  }
  return best;
}

tiersim_status tiersim_log_to_csv(const tiersim_log* log, char** out) {
  if (!log || !out) return null_argument("log/out");
  return guarded([&] { *out = copy_string(tiersim::trial_csv(log->log)); });
}

tiersim_status tiersim_log_write_csv(const tiersim_log* log, const char* path) {
  if (!log || !path) return null_argument("log/path");
  std::string body;
  const tiersim_status st = guarded([&] { body = tiersim::trial_csv(log->log); });
  if (st != TIERSIM_OK) return st;
  return write_file(path, body);
}

tiersim_status tiersim_log_read_csv(const char* path, tiersim_log** out) {
  if (!path || !out) return null_argument("path/out");
  return guarded([&] {
    auto log = std::make_unique<tiersim_log>();
    log->log = tiersim::read_trial_csv_file(path);
    *out = log.release();
  });
}

tiersim_status tiersim_metrics_compute(const tiersim_log* log, int novice_boundary,
                                       int intermediate_boundary, int sessions,
                                       tiersim_metrics** out) {
  if (!log || !out) return null_argument("log/out");
  return guarded([&] {
    auto m = std::make_unique<tiersim_metrics>();
    m->report = tiersim::compute_metrics(
        log->log, tiersim::Grouping{novice_boundary, intermediate_boundary, sessions});
    *out = m.release();
  });
}

void tiersim_metrics_free(tiersim_metrics* metrics) { delete metrics; }

long tiersim_metrics_total_trials(const tiersim_metrics* metrics) {
  return metrics ? metrics->report.total_trials : 0;
}

tiersim_status tiersim_metrics_overall(const tiersim_metrics* metrics, double* value,
                                       int* present) {
  if (!metrics || !value || !present) return null_argument("metrics/value/present");
  const auto& v = metrics->report.overall_mean_srt;
  *present = v.has_value();
  *value = v.value_or(0.0);
  return TIERSIM_OK;
}

tiersim_status tiersim_metrics_session(const tiersim_metrics* metrics, int session, double* value,
                                       int* present, long* trials) {
  if (!metrics || !value || !present) return null_argument("metrics/value/present");
  const auto& r = metrics->report;
  if (session < 1 || session > static_cast<int>(r.session_mean_srt.size())) {
    return fail(TIERSIM_ERR_ARGUMENT, "session out of range");
  }
  const auto& v = r.session_mean_srt[session - 1];
  *present = v.has_value();
  *value = v.value_or(0.0);
  if (trials) *trials = r.session_counts[session - 1];
  return TIERSIM_OK;
}

tiersim_status tiersim_metrics_level(const tiersim_metrics* metrics, tiersim_level level,
                                     double* value, int* present, long* trials) {
  if (!metrics || !value || !present) return null_argument("metrics/value/present");
  if (level < TIERSIM_NOVICE || level > TIERSIM_EXPERT) {
    return fail(TIERSIM_ERR_ARGUMENT, "unknown level");
  }
  const auto& v = metrics->report.level_mean_srt[level];
  *present = v.has_value();
  *value = v.value_or(0.0);
  if (trials) *trials = metrics->report.level_counts[level];
  return TIERSIM_OK;
}

tiersim_status tiersim_metrics_to_json(const tiersim_metrics* metrics, char** out) {
  if (!metrics || !out) return null_argument("metrics/out");
  return guarded([&] { *out = copy_string(tiersim::metrics_json(metrics->report)); });
}

tiersim_status tiersim_metrics_to_text(const tiersim_metrics* metrics, char** out) {
  if (!metrics || !out) return null_argument("metrics/out");
  return guarded([&] { *out = copy_string(tiersim::metrics_text(metrics->report)); });
}

tiersim_status tiersim_sweep_create(const tiersim_scenario* base, tiersim_sweep** out) {
  if (!base || !out) return null_argument("base/out");
  return guarded([&] {
    auto sw = std::make_unique<tiersim_sweep>();
    sw->base = *base;
    sw->plan.horizon = base->file.horizon;
    *out = sw.release();
  });
}

void tiersim_sweep_free(tiersim_sweep* sweep) { delete sweep; }

tiersim_status tiersim_sweep_add_configuration(tiersim_sweep* sweep, int k1, int k2, int k3) {
  if (!sweep) return null_argument("sweep");
  if (k1 < 1 || k2 < 1 || k3 < 1) {
    return fail(TIERSIM_ERR_VALIDATION, "configs: replica counts must be >= 1", "configs");
  }
  sweep->plan.configurations.push_back(config_of(k1, k2, k3));
  return TIERSIM_OK;
}

tiersim_status tiersim_sweep_add_users(tiersim_sweep* sweep, int terminals) {
  if (!sweep) return null_argument("sweep");
  if (terminals < 1) return fail(TIERSIM_ERR_VALIDATION, "users: must be >= 1", "users");
  sweep->plan.user_counts.push_back(terminals);
  return TIERSIM_OK;
}

tiersim_status tiersim_sweep_add_seed(tiersim_sweep* sweep, uint64_t seed) {
  if (!sweep) return null_argument("sweep");
  sweep->plan.seeds.push_back(seed);
  return TIERSIM_OK;
}

tiersim_status tiersim_sweep_set_learning(tiersim_sweep* sweep, tiersim_learning_mode mode) {
  if (!sweep) return null_argument("sweep");
  switch (mode) {
    case TIERSIM_LEARNING_ON:
      sweep->plan.learning = tiersim::LearningMode::kOn;
      return TIERSIM_OK;
    case TIERSIM_LEARNING_OFF:
      sweep->plan.learning = tiersim::LearningMode::kOff;
      return TIERSIM_OK;
    case TIERSIM_LEARNING_BOTH:
      sweep->plan.learning = tiersim::LearningMode::kBoth;
      return TIERSIM_OK;
  }
  return fail(TIERSIM_ERR_ARGUMENT, "unknown learning mode");
}

tiersim_status tiersim_sweep_set_horizon(tiersim_sweep* sweep, double horizon) {
  if (!sweep) return null_argument("sweep");
  sweep->plan.horizon = horizon;
  return TIERSIM_OK;
}

tiersim_status tiersim_sweep_set_sla(tiersim_sweep* sweep, double threshold, unsigned gate_mask) {
  if (!sweep) return null_argument("sweep");
  if (gate_mask & ~0xFu) return fail(TIERSIM_ERR_ARGUMENT, "unknown gate bits");
  sweep->sla.threshold = threshold;
  sweep->sla.gated_metrics.clear();
  for (tiersim::GatedMetric m : tiersim::kAllGatedMetrics) {
    if (gate_mask & (1u << static_cast<int>(m))) sweep->sla.gated_metrics.push_back(m);
  }
  return TIERSIM_OK;
}

tiersim_status tiersim_sweep_set_threads(tiersim_sweep* sweep, unsigned threads) {
  if (!sweep) return null_argument("sweep");
  sweep->threads = threads;
  return TIERSIM_OK;
}

tiersim_status tiersim_sweep_run(const tiersim_sweep* sweep, tiersim_sweep_report** out) {
  if (!sweep || !out) return null_argument("sweep/out");
  return guarded([&] {
    tiersim::SweepPlan plan = sweep->plan;
    if (plan.configurations.empty()) throw tiersim::ValidationError("configs", "list is empty");
    if (plan.user_counts.empty()) throw tiersim::ValidationError("users", "list is empty");
    // Every cell overrides N and the replicas, so the base only needs them
    // to resolve.
    tiersim_scenario base = sweep->base;
    if (!base.overrides.terminals) base.overrides.terminals = plan.user_counts.front();
    if (!base.overrides.configuration) base.overrides.configuration = plan.configurations.front();
    plan.base = base.resolve();
    auto report = std::make_unique<tiersim_sweep_report>();
    report->report = tiersim::sweep(plan, sweep->sla, sweep->threads);
    *out = report.release();
  });
}

void tiersim_sweep_report_free(tiersim_sweep_report* report) { delete report; }

size_t tiersim_sweep_report_run_count(const tiersim_sweep_report* report) {
  return report ? report->report.entries.size() : 0;
}

size_t tiersim_sweep_report_failed_runs(const tiersim_sweep_report* report) {
  size_t failed = 0;
  if (report) {
    for (const auto& e : report->report.entries) failed += e.error.has_value();
  }
  return failed;
}

size_t tiersim_sweep_report_selection_count(const tiersim_sweep_report* report) {
  return report ? report->report.selections.size() : 0;
}

tiersim_status tiersim_sweep_report_selection(const tiersim_sweep_report* report, size_t index,
                                              int* users, int* learning, int* selected,
                                              int replicas[3]) {
  if (!report) return null_argument("report");
  const auto& sels = report->report.selections;
  if (index >= sels.size()) return fail(TIERSIM_ERR_ARGUMENT, "index out of range");
  const auto& sel = sels[index];
  if (users) *users = sel.users;
  if (learning) *learning = sel.learning;
  if (selected) *selected = sel.config.has_value();
  if (replicas && sel.config) {
    for (int t = 0; t < 3; ++t) replicas[t] = sel.config->replicas[t];
  }
  return TIERSIM_OK;
}

tiersim_status tiersim_sweep_report_to_json(const tiersim_sweep_report* report, char** out) {
  if (!report || !out) return null_argument("report/out");
  return guarded([&] { *out = copy_string(tiersim::sweep_json(report->report)); });
}

tiersim_status tiersim_sweep_report_to_table(const tiersim_sweep_report* report, char** out) {
  if (!report || !out) return null_argument("report/out");
  return guarded([&] { *out = copy_string(tiersim::sweep_table(report->report)); });
}

}  // extern "C"
