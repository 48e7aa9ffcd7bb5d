/*
 * C interface to the tiersim library: transient simulation of a closed
 * three-tier queueing network whose users learn across practice sessions,
 * plus the estimators and the VM-configuration planner built on it.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a tiersim_status;
 * on failure tiersim_last_error() describes the problem and, for validation
 * failures, tiersim_last_error_field() names the offending input field.
 * Both are per-thread. Strings returned through char** are released with
 * tiersim_string_free.
 */
#ifndef TIERSIM_H
#define TIERSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TIERSIM_BUILDING_LIBRARY)
#    define TIERSIM_API __declspec(dllexport)
#  else
#    define TIERSIM_API __declspec(dllimport)
#  endif
#else
#  define TIERSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tiersim_status {
  TIERSIM_OK = 0,
  TIERSIM_ERR_INTERNAL = 1,   /* engine invariant broken or unexpected failure */
  TIERSIM_ERR_VALIDATION = 2, /* rejected input; see tiersim_last_error_field */
  TIERSIM_ERR_IO = 3,         /* output could not be written */
  TIERSIM_ERR_ARGUMENT = 4    /* null handle, bad enum value, index out of range */
} tiersim_status;

typedef enum tiersim_level {
  TIERSIM_NOVICE = 0,
  TIERSIM_INTERMEDIATE = 1,
  TIERSIM_EXPERT = 2
} tiersim_level;

typedef enum tiersim_routing {
  TIERSIM_ROUND_ROBIN = 0,
  TIERSIM_UNIFORM_RANDOM = 1
} tiersim_routing;

typedef enum tiersim_learning_mode {
  TIERSIM_LEARNING_ON = 0,
  TIERSIM_LEARNING_OFF = 1,
  TIERSIM_LEARNING_BOTH = 2
} tiersim_learning_mode;

/* Gate bits for tiersim_sweep_set_sla. */
#define TIERSIM_GATE_OVERALL 1u
#define TIERSIM_GATE_NOVICE 2u
#define TIERSIM_GATE_INTERMEDIATE 4u
#define TIERSIM_GATE_EXPERT 8u

typedef struct tiersim_scenario tiersim_scenario;
typedef struct tiersim_log tiersim_log;
typedef struct tiersim_metrics tiersim_metrics;
typedef struct tiersim_sweep tiersim_sweep;
typedef struct tiersim_sweep_report tiersim_sweep_report;

typedef struct tiersim_trial {
  int terminal;
  int generation;
  int session;
  int trial;
  tiersim_level level;
  double submit_s;
  double complete_s;
  double srt_s;
} tiersim_trial;

TIERSIM_API const char* tiersim_version(void);
TIERSIM_API const char* tiersim_last_error(void);
TIERSIM_API const char* tiersim_last_error_field(void);
TIERSIM_API void tiersim_string_free(char* text);

/* Scenarios. A parsed scenario may leave the terminal count or replica
 * counts unset; they must be supplied with the setters before running. */
TIERSIM_API tiersim_status tiersim_scenario_parse(const char* text, size_t length,
                                                  tiersim_scenario** out);
TIERSIM_API tiersim_status tiersim_scenario_load(const char* path, tiersim_scenario** out);
TIERSIM_API tiersim_status tiersim_scenario_reference(int terminals, int k1, int k2, int k3,
                                                      tiersim_scenario** out);
TIERSIM_API void tiersim_scenario_free(tiersim_scenario* scenario);
TIERSIM_API tiersim_status tiersim_scenario_set_terminals(tiersim_scenario* scenario,
                                                          int terminals);
TIERSIM_API tiersim_status tiersim_scenario_set_configuration(tiersim_scenario* scenario, int k1,
                                                              int k2, int k3);
TIERSIM_API tiersim_status tiersim_scenario_set_learning(tiersim_scenario* scenario, int enabled);
TIERSIM_API tiersim_status tiersim_scenario_set_routing(tiersim_scenario* scenario,
                                                        tiersim_routing routing);
/* Resolves the scenario and reports the first validation failure. */
TIERSIM_API tiersim_status tiersim_scenario_validate(const tiersim_scenario* scenario);
/* Seeds listed in the scenario file. *count receives the full number even
 * when it exceeds capacity. */
TIERSIM_API tiersim_status tiersim_scenario_seeds(const tiersim_scenario* scenario,
                                                  uint64_t* seeds, size_t capacity,
                                                  size_t* count);
TIERSIM_API tiersim_status tiersim_scenario_horizon(const tiersim_scenario* scenario,
                                                    double* horizon);
TIERSIM_API tiersim_status tiersim_scenario_grouping(const tiersim_scenario* scenario,
                                                     int* novice_boundary,
                                                     int* intermediate_boundary, int* sessions);
/* Canonical document of the resolved scenario. */
TIERSIM_API tiersim_status tiersim_scenario_to_text(const tiersim_scenario* scenario, char** out);

/* Simulation. horizon must be finite and >= 0. */
TIERSIM_API tiersim_status tiersim_run(const tiersim_scenario* scenario, uint64_t seed,
                                       double horizon, tiersim_log** out);

/* Trial logs. */
TIERSIM_API void tiersim_log_free(tiersim_log* log);
TIERSIM_API size_t tiersim_log_size(const tiersim_log* log);
TIERSIM_API tiersim_status tiersim_log_get(const tiersim_log* log, size_t index,
                                           tiersim_trial* out);
/* Largest session number in the log, 0 when empty. */
TIERSIM_API int tiersim_log_max_session(const tiersim_log* log);
TIERSIM_API tiersim_status tiersim_log_to_csv(const tiersim_log* log, char** out);
TIERSIM_API tiersim_status tiersim_log_write_csv(const tiersim_log* log, const char* path);
/* Malformed rows fail with field "row <n>". */
TIERSIM_API tiersim_status tiersim_log_read_csv(const char* path, tiersim_log** out);

/* Estimators. Absent means (no trials in the subset) report *present = 0. */
TIERSIM_API tiersim_status tiersim_metrics_compute(const tiersim_log* log, int novice_boundary,
                                                   int intermediate_boundary, int sessions,
                                                   tiersim_metrics** out);
TIERSIM_API void tiersim_metrics_free(tiersim_metrics* metrics);
TIERSIM_API long tiersim_metrics_total_trials(const tiersim_metrics* metrics);
TIERSIM_API tiersim_status tiersim_metrics_overall(const tiersim_metrics* metrics, double* value,
                                                   int* present);
TIERSIM_API tiersim_status tiersim_metrics_session(const tiersim_metrics* metrics, int session,
                                                   double* value, int* present, long* trials);
TIERSIM_API tiersim_status tiersim_metrics_level(const tiersim_metrics* metrics,
                                                 tiersim_level level, double* value,
                                                 int* present, long* trials);
TIERSIM_API tiersim_status tiersim_metrics_to_json(const tiersim_metrics* metrics, char** out);
TIERSIM_API tiersim_status tiersim_metrics_to_text(const tiersim_metrics* metrics, char** out);

/* Configuration sweeps. The base scenario is copied at creation. */
TIERSIM_API tiersim_status tiersim_sweep_create(const tiersim_scenario* base, tiersim_sweep** out);
TIERSIM_API void tiersim_sweep_free(tiersim_sweep* sweep);
TIERSIM_API tiersim_status tiersim_sweep_add_configuration(tiersim_sweep* sweep, int k1, int k2,
                                                           int k3);
TIERSIM_API tiersim_status tiersim_sweep_add_users(tiersim_sweep* sweep, int terminals);
TIERSIM_API tiersim_status tiersim_sweep_add_seed(tiersim_sweep* sweep, uint64_t seed);
TIERSIM_API tiersim_status tiersim_sweep_set_learning(tiersim_sweep* sweep,
                                                      tiersim_learning_mode mode);
TIERSIM_API tiersim_status tiersim_sweep_set_horizon(tiersim_sweep* sweep, double horizon);
TIERSIM_API tiersim_status tiersim_sweep_set_sla(tiersim_sweep* sweep, double threshold,
                                                 unsigned gate_mask);
/* 0 = one worker per hardware thread. */
TIERSIM_API tiersim_status tiersim_sweep_set_threads(tiersim_sweep* sweep, unsigned threads);
TIERSIM_API tiersim_status tiersim_sweep_run(const tiersim_sweep* sweep,
                                             tiersim_sweep_report** out);

TIERSIM_API void tiersim_sweep_report_free(tiersim_sweep_report* report);
TIERSIM_API size_t tiersim_sweep_report_run_count(const tiersim_sweep_report* report);
/* Number of runs that failed; their errors are listed in the JSON report. */
TIERSIM_API size_t tiersim_sweep_report_failed_runs(const tiersim_sweep_report* report);
TIERSIM_API size_t tiersim_sweep_report_selection_count(const tiersim_sweep_report* report);
/* replicas receives (k1, k2, k3) when *selected is 1. */
TIERSIM_API tiersim_status tiersim_sweep_report_selection(const tiersim_sweep_report* report,
                                                          size_t index, int* users,
                                                          int* learning, int* selected,
                                                          int replicas[3]);
TIERSIM_API tiersim_status tiersim_sweep_report_to_json(const tiersim_sweep_report* report,
                                                        char** out);
TIERSIM_API tiersim_status tiersim_sweep_report_to_table(const tiersim_sweep_report* report,
                                                         char** out);

#ifdef __cplusplus
}
#endif

#endif /* TIERSIM_H */
