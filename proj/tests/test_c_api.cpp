#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "tiersim/tiersim.h"

extern "C" int tiersim_c_header_check(void);

namespace {

std::string take(char* text) {
  std::string out = text ? text : "";
  tiersim_string_free(text);
  return out;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / (std::string("tiersim_capi_") + name);
}

}  // namespace

TEST_CASE("header works from C") { CHECK(tiersim_c_header_check() == 1); }

TEST_CASE("version string") { CHECK(std::strlen(tiersim_version()) > 0); }

TEST_CASE("reference run through the C interface") {
  tiersim_scenario* sc = nullptr;
  REQUIRE(tiersim_scenario_reference(2, 1, 1, 1, &sc) == TIERSIM_OK);
  tiersim_log* log = nullptr;
  REQUIRE(tiersim_run(sc, 1, 3600.0, &log) == TIERSIM_OK);
  REQUIRE(tiersim_log_size(log) > 2);
  tiersim_trial t{};
  REQUIRE(tiersim_log_get(log, 0, &t) == TIERSIM_OK);
  CHECK(t.terminal == 1);
  CHECK(t.level == TIERSIM_NOVICE);
  CHECK(t.srt_s == 1.5);
  CHECK(tiersim_log_get(log, tiersim_log_size(log), &t) == TIERSIM_ERR_ARGUMENT);
  CHECK(tiersim_log_max_session(log) >= 1);

  tiersim_metrics* m = nullptr;
  REQUIRE(tiersim_metrics_compute(log, 5, 10, 15, &m) == TIERSIM_OK);
  double v = 0.0;
  int present = 0;
  long trials = 0;
  REQUIRE(tiersim_metrics_overall(m, &v, &present) == TIERSIM_OK);
  CHECK(present == 1);
  CHECK(v >= 1.5);
  CHECK(tiersim_metrics_total_trials(m) == static_cast<long>(tiersim_log_size(log)));
  REQUIRE(tiersim_metrics_session(m, 1, &v, &present, &trials) == TIERSIM_OK);
  CHECK(present == 1);
  CHECK(trials > 0);
  CHECK(tiersim_metrics_session(m, 16, &v, &present, &trials) == TIERSIM_ERR_ARGUMENT);
  REQUIRE(tiersim_metrics_level(m, TIERSIM_EXPERT, &v, &present, &trials) == TIERSIM_OK);

  char* json = nullptr;
  REQUIRE(tiersim_metrics_to_json(m, &json) == TIERSIM_OK);
  CHECK(take(json).find("overall_mean_srt") != std::string::npos);

  tiersim_metrics_free(m);
  tiersim_log_free(log);
  tiersim_scenario_free(sc);
}

TEST_CASE("empty log metrics are absent") {
  tiersim_scenario* sc = nullptr;
  REQUIRE(tiersim_scenario_reference(120, 8, 8, 8, &sc) == TIERSIM_OK);
  tiersim_log* log = nullptr;
  REQUIRE(tiersim_run(sc, 1, 0.0, &log) == TIERSIM_OK);
  CHECK(tiersim_log_size(log) == 0);
  CHECK(tiersim_log_max_session(log) == 0);
  tiersim_metrics* m = nullptr;
  REQUIRE(tiersim_metrics_compute(log, 5, 10, 15, &m) == TIERSIM_OK);
  double v = -1.0;
  int present = 1;
  REQUIRE(tiersim_metrics_overall(m, &v, &present) == TIERSIM_OK);
  CHECK(present == 0);
  tiersim_metrics_free(m);
  tiersim_log_free(log);
  tiersim_scenario_free(sc);
}

TEST_CASE("errors carry codes and fields") {
  tiersim_scenario* sc = nullptr;
  CHECK(tiersim_scenario_reference(0, 1, 1, 1, &sc) == TIERSIM_ERR_VALIDATION);
  CHECK(std::string(tiersim_last_error_field()) == "population.terminals");
  CHECK(sc == nullptr);

  CHECK(tiersim_scenario_reference(1, 1, 1, 1, nullptr) == TIERSIM_ERR_ARGUMENT);
  CHECK(tiersim_run(nullptr, 1, 1.0, nullptr) == TIERSIM_ERR_ARGUMENT);
  CHECK(std::strlen(tiersim_last_error()) > 0);

  REQUIRE(tiersim_scenario_reference(2, 1, 1, 1, &sc) == TIERSIM_OK);
  tiersim_log* log = nullptr;
  CHECK(tiersim_run(sc, 1, -5.0, &log) == TIERSIM_ERR_VALIDATION);
  CHECK(std::string(tiersim_last_error_field()) == "horizon");
  CHECK(tiersim_scenario_set_learning(sc, 0) == TIERSIM_OK);
  CHECK(tiersim_scenario_validate(sc) == TIERSIM_ERR_VALIDATION);
  CHECK(std::string(tiersim_last_error_field()) == "no_learning_think_time");
  tiersim_scenario_free(sc);

  const char* text = R"({"schema_version": 1, "population": {"terminals": 5, "proportion": [4, 0, 0]},
      "tiers": [{"replicas": 1}, {"replicas": 1}, {"replicas": 1}]})";
  REQUIRE(tiersim_scenario_parse(text, std::strlen(text), &sc) == TIERSIM_OK);
  CHECK(tiersim_scenario_validate(sc) == TIERSIM_ERR_VALIDATION);
  CHECK(std::string(tiersim_last_error_field()) == "population.proportion");
  tiersim_scenario_free(sc);

  CHECK(tiersim_scenario_load("/nonexistent.scenario", &sc) == TIERSIM_ERR_VALIDATION);
  CHECK(std::string(tiersim_last_error_field()) == "scenario");
}

TEST_CASE("parsed scenario with values supplied by setters") {
  const char* text = R"({"schema_version": 1, "seeds": [7, 8], "horizon": 120})";
  tiersim_scenario* sc = nullptr;
  REQUIRE(tiersim_scenario_parse(text, std::strlen(text), &sc) == TIERSIM_OK);
  CHECK(tiersim_scenario_validate(sc) == TIERSIM_ERR_VALIDATION);
  uint64_t seeds[1] = {0};
  size_t count = 0;
  REQUIRE(tiersim_scenario_seeds(sc, seeds, 1, &count) == TIERSIM_OK);
  CHECK(count == 2);
  CHECK(seeds[0] == 7);
  double horizon = 0.0;
  REQUIRE(tiersim_scenario_horizon(sc, &horizon) == TIERSIM_OK);
  CHECK(horizon == 120.0);

  REQUIRE(tiersim_scenario_set_terminals(sc, 3) == TIERSIM_OK);
  REQUIRE(tiersim_scenario_set_configuration(sc, 1, 2, 1) == TIERSIM_OK);
  REQUIRE(tiersim_scenario_set_routing(sc, TIERSIM_UNIFORM_RANDOM) == TIERSIM_OK);
  CHECK(tiersim_scenario_validate(sc) == TIERSIM_OK);
  int x = 0, y = 0, p = 0;
  REQUIRE(tiersim_scenario_grouping(sc, &x, &y, &p) == TIERSIM_OK);
  CHECK(x == 5);
  CHECK(y == 10);
  CHECK(p == 15);
  char* doc = nullptr;
  REQUIRE(tiersim_scenario_to_text(sc, &doc) == TIERSIM_OK);
  CHECK(take(doc).find("uniform_random") != std::string::npos);
  tiersim_scenario_free(sc);
}

TEST_CASE("csv files round trip") {
  tiersim_scenario* sc = nullptr;
  REQUIRE(tiersim_scenario_reference(20, 2, 2, 2, &sc) == TIERSIM_OK);
  tiersim_log* log = nullptr;
  REQUIRE(tiersim_run(sc, 4, 600.0, &log) == TIERSIM_OK);
  const auto path = temp_file("roundtrip.csv");
  REQUIRE(tiersim_log_write_csv(log, path.c_str()) == TIERSIM_OK);
  tiersim_log* back = nullptr;
  REQUIRE(tiersim_log_read_csv(path.c_str(), &back) == TIERSIM_OK);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(tiersim_log_to_csv(log, &a) == TIERSIM_OK);
  REQUIRE(tiersim_log_to_csv(back, &b) == TIERSIM_OK);
  CHECK(take(a) == take(b));
  CHECK(tiersim_log_write_csv(log, "/nonexistent/dir/x.csv") == TIERSIM_ERR_IO);

  {
    std::ofstream bad(path);
    bad << "terminal,generation,session,trial,level,submit_s,complete_s,srt_s\n"
        << "1,0,1,1,novice,1.0,2.5,1.5\n"
        << "1,0,1,2,novice,oops,2.5,1.5\n";
  }
  tiersim_log* broken = nullptr;
  CHECK(tiersim_log_read_csv(path.c_str(), &broken) == TIERSIM_ERR_VALIDATION);
  CHECK(std::string(tiersim_last_error_field()) == "row 2");
  std::filesystem::remove(path);
  tiersim_log_free(back);
  tiersim_log_free(log);
  tiersim_scenario_free(sc);
}

TEST_CASE("sweep through the C interface") {
  tiersim_scenario* sc = nullptr;
  REQUIRE(tiersim_scenario_reference(60, 5, 5, 5, &sc) == TIERSIM_OK);
  tiersim_sweep* sw = nullptr;
  REQUIRE(tiersim_sweep_create(sc, &sw) == TIERSIM_OK);
  tiersim_scenario_free(sc);
  for (int k = 5; k <= 7; ++k) REQUIRE(tiersim_sweep_add_configuration(sw, k, k, k) == TIERSIM_OK);
  REQUIRE(tiersim_sweep_add_users(sw, 60) == TIERSIM_OK);
  REQUIRE(tiersim_sweep_add_seed(sw, 1) == TIERSIM_OK);
  REQUIRE(tiersim_sweep_set_sla(sw, 3.5, TIERSIM_GATE_OVERALL) == TIERSIM_OK);
  CHECK(tiersim_sweep_set_sla(sw, 3.5, 0x10u) == TIERSIM_ERR_ARGUMENT);
  CHECK(tiersim_sweep_set_learning(sw, static_cast<tiersim_learning_mode>(9)) ==
        TIERSIM_ERR_ARGUMENT);
  REQUIRE(tiersim_sweep_set_threads(sw, 2) == TIERSIM_OK);

  tiersim_sweep_report* rep = nullptr;
  REQUIRE(tiersim_sweep_run(sw, &rep) == TIERSIM_OK);
  CHECK(tiersim_sweep_report_run_count(rep) == 3);
  CHECK(tiersim_sweep_report_failed_runs(rep) == 0);
  REQUIRE(tiersim_sweep_report_selection_count(rep) == 1);
  int users = 0, learning = 0, selected = 0;
  int replicas[3] = {0, 0, 0};
  REQUIRE(tiersim_sweep_report_selection(rep, 0, &users, &learning, &selected, replicas) ==
          TIERSIM_OK);
  CHECK(users == 60);
  CHECK(learning == 1);
  CHECK(selected == 1);
  CHECK(replicas[0] == 5);
  CHECK(replicas[1] == 5);
  CHECK(replicas[2] == 5);
  char* table = nullptr;
  REQUIRE(tiersim_sweep_report_to_table(rep, &table) == TIERSIM_OK);
  CHECK(take(table).find("(5,5,5)") != std::string::npos);
  tiersim_sweep_report_free(rep);
  tiersim_sweep_free(sw);
}

TEST_CASE("free functions accept null") {
  tiersim_scenario_free(nullptr);
  tiersim_log_free(nullptr);
  tiersim_metrics_free(nullptr);
  tiersim_sweep_free(nullptr);
  tiersim_sweep_report_free(nullptr);
  tiersim_string_free(nullptr);
  CHECK(tiersim_log_size(nullptr) == 0);
}
