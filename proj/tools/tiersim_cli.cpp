// tiersim command-line front end. Talks to the library only through the C
// interface in tiersim.h.
//
//   tiersim simulate --scenario F [--seed S] [--horizon H] --out trials.csv
//   tiersim sweep    --scenario F --configs "5,5,5;6,6,6" --users 60,120 --out report.json
//   tiersim metrics  trials.csv [--grouping 5,10] [--sessions 15] [--out metrics.json]
//
// Exit codes: 0 success, 1 internal error, 2 input validation error.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "tiersim/tiersim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;

struct UsageError {
  std::string field;
  std::string message;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ScenarioPtr = std::unique_ptr<tiersim_scenario, Deleter<tiersim_scenario, tiersim_scenario_free>>;
using LogPtr = std::unique_ptr<tiersim_log, Deleter<tiersim_log, tiersim_log_free>>;
using MetricsPtr = std::unique_ptr<tiersim_metrics, Deleter<tiersim_metrics, tiersim_metrics_free>>;
using SweepPtr = std::unique_ptr<tiersim_sweep, Deleter<tiersim_sweep, tiersim_sweep_free>>;
using ReportPtr =
    std::unique_ptr<tiersim_sweep_report, Deleter<tiersim_sweep_report, tiersim_sweep_report_free>>;

// Status from the library, carried to main as an exit code.
struct LibraryError {
  tiersim_status status;
};

void check(tiersim_status status) {
  if (status != TIERSIM_OK) throw LibraryError{status};
}

std::string take_string(char* raw) {
  std::string out = raw ? raw : "";
  tiersim_string_free(raw);
  return out;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_integer(std::string_view text, const char* field) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError{field, "not an integer: \"" + std::string(text) + "\""};
  }
  return value;
}

std::array<int, 3> parse_triple(std::string_view text, const char* field) {
  const auto parts = split(trim(text), ',');
  if (parts.size() != 3) {
    throw UsageError{field, "expected k1,k2,k3, got \"" + std::string(text) + "\""};
  }
  std::array<int, 3> out{};
  for (int t = 0; t < 3; ++t) {
    out[t] = parse_integer<int>(parts[t], field);
    if (out[t] < 1) throw UsageError{field, "replica counts must be >= 1"};
  }
  return out;
}

std::vector<std::array<int, 3>> parse_configs(const std::string& text) {
  std::vector<std::array<int, 3>> out;
  for (auto item : split(text, ';')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_triple(item, "configs"));
  }
  if (out.empty()) throw UsageError{"configs", "no configuration given"};
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* field) {
  std::vector<T> out;
  for (auto item : split(text, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_integer<T>(item, field));
  }
  if (out.empty()) throw UsageError{field, "list is empty"};
  return out;
}

unsigned parse_gate(const std::string& text) {
  unsigned mask = 0;
  for (auto item : split(text, ',')) {
    item = trim(item);
    if (item == "overall") mask |= TIERSIM_GATE_OVERALL;
    else if (item == "novice") mask |= TIERSIM_GATE_NOVICE;
    else if (item == "intermediate") mask |= TIERSIM_GATE_INTERMEDIATE;
    else if (item == "expert") mask |= TIERSIM_GATE_EXPERT;
    else if (item == "all")
      mask |= TIERSIM_GATE_OVERALL | TIERSIM_GATE_NOVICE | TIERSIM_GATE_INTERMEDIATE |
              TIERSIM_GATE_EXPERT;
    else if (!item.empty())
      throw UsageError{"gate", "unknown metric \"" + std::string(item) + "\""};
  }
  if (mask == 0) throw UsageError{"gate", "no metric given"};
  return mask;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out.flush()) {
    std::cerr << "error: cannot write " << path << "\n";
    throw LibraryError{TIERSIM_ERR_IO};
  }
}

ScenarioPtr load_scenario(const std::string& path) {
  tiersim_scenario* raw = nullptr;
  check(tiersim_scenario_load(path.c_str(), &raw));
  return ScenarioPtr(raw);
}

struct SimulateArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::optional<int> users;
  std::string config;
  std::string learning;
  std::string routing;
  std::string out;
  std::string summary;
};

int cmd_simulate(const SimulateArgs& a) {
  ScenarioPtr scenario = load_scenario(a.scenario);
  if (a.users) check(tiersim_scenario_set_terminals(scenario.get(), *a.users));
  if (!a.config.empty()) {
    const auto k = parse_triple(a.config, "configs");
    check(tiersim_scenario_set_configuration(scenario.get(), k[0], k[1], k[2]));
  }
  if (a.learning == "on" || a.learning == "off") {
    check(tiersim_scenario_set_learning(scenario.get(), a.learning == "on"));
  } else if (!a.learning.empty()) {
    throw UsageError{"learning", "expected on or off"};
  }
  if (a.routing == "round_robin") {
    check(tiersim_scenario_set_routing(scenario.get(), TIERSIM_ROUND_ROBIN));
  } else if (a.routing == "uniform_random") {
    check(tiersim_scenario_set_routing(scenario.get(), TIERSIM_UNIFORM_RANDOM));
  } else if (!a.routing.empty()) {
    throw UsageError{"routing", "expected round_robin or uniform_random"};
  }

  std::uint64_t seed = 0;
  if (a.seed) {
    seed = *a.seed;
  } else {
    std::size_t count = 0;
    check(tiersim_scenario_seeds(scenario.get(), &seed, 1, &count));
    if (count == 0) throw UsageError{"seed", "no --seed given and the scenario lists no seeds"};
  }
  double horizon = 0.0;
  check(tiersim_scenario_horizon(scenario.get(), &horizon));
  if (a.horizon) horizon = *a.horizon;

  int x = 0, y = 0, sessions = 0;
  check(tiersim_scenario_grouping(scenario.get(), &x, &y, &sessions));

  tiersim_log* raw_log = nullptr;
  check(tiersim_run(scenario.get(), seed, horizon, &raw_log));
  LogPtr log(raw_log);
  check(tiersim_log_write_csv(log.get(), a.out.c_str()));

  tiersim_metrics* raw_metrics = nullptr;
  check(tiersim_metrics_compute(log.get(), x, y, sessions, &raw_metrics));
  MetricsPtr metrics(raw_metrics);
  char* text = nullptr;
  check(tiersim_metrics_to_text(metrics.get(), &text));
  std::cout << "seed " << seed << ", horizon " << horizon << " s\n" << take_string(text);
  if (!a.summary.empty()) {
    char* json = nullptr;
    check(tiersim_metrics_to_json(metrics.get(), &json));
    write_text(a.summary, take_string(json));
  }
  return kExitOk;
}

struct SweepArgs {
  std::string scenario;
  std::string configs;
  std::string users;
  std::string seeds;
  double sla = 3.5;
  std::string gate = "overall";
  std::string learning = "on";
  std::optional<double> horizon;
  unsigned threads = 0;
  std::string out;
};

int cmd_sweep(const SweepArgs& a) {
  const auto configs = parse_configs(a.configs);
  const auto users = parse_list<int>(a.users, "users");
  const unsigned gate = parse_gate(a.gate);
  tiersim_learning_mode mode;
  if (a.learning == "on") mode = TIERSIM_LEARNING_ON;
  else if (a.learning == "off") mode = TIERSIM_LEARNING_OFF;
  else if (a.learning == "both") mode = TIERSIM_LEARNING_BOTH;
  else throw UsageError{"learning", "expected on, off or both"};

  ScenarioPtr scenario = load_scenario(a.scenario);
  std::vector<std::uint64_t> seeds;
  if (!a.seeds.empty()) {
    seeds = parse_list<std::uint64_t>(a.seeds, "seeds");
  } else {
    std::size_t count = 0;
    check(tiersim_scenario_seeds(scenario.get(), nullptr, 0, &count));
    seeds.resize(count);
    check(tiersim_scenario_seeds(scenario.get(), seeds.data(), seeds.size(), &count));
    if (seeds.empty()) throw UsageError{"seeds", "no --seeds given and the scenario lists none"};
  }

  tiersim_sweep* raw = nullptr;
  check(tiersim_sweep_create(scenario.get(), &raw));
  SweepPtr sweep(raw);
  for (const auto& k : configs) check(tiersim_sweep_add_configuration(sweep.get(), k[0], k[1], k[2]));
  for (int n : users) check(tiersim_sweep_add_users(sweep.get(), n));
  for (auto s : seeds) check(tiersim_sweep_add_seed(sweep.get(), s));
  check(tiersim_sweep_set_learning(sweep.get(), mode));
  check(tiersim_sweep_set_sla(sweep.get(), a.sla, gate));
  check(tiersim_sweep_set_threads(sweep.get(), a.threads));
  if (a.horizon) check(tiersim_sweep_set_horizon(sweep.get(), *a.horizon));

  tiersim_sweep_report* raw_report = nullptr;
  check(tiersim_sweep_run(sweep.get(), &raw_report));
  ReportPtr report(raw_report);

  char* json = nullptr;
  check(tiersim_sweep_report_to_json(report.get(), &json));
  write_text(a.out, take_string(json));
  char* table = nullptr;
  check(tiersim_sweep_report_to_table(report.get(), &table));
  std::cout << take_string(table);
  if (const std::size_t failed = tiersim_sweep_report_failed_runs(report.get())) {
    std::cerr << "warning: " << failed << " run(s) failed; see the report's error fields\n";
  }
  return kExitOk;
}

struct MetricsArgs {
  std::string csv;
  std::string scenario;
  std::string grouping;
  std::optional<int> sessions;
  std::string out;
};

int cmd_metrics(const MetricsArgs& a) {
  int x = 5, y = 10;
  std::optional<int> sessions = a.sessions;
  if (!a.scenario.empty()) {
    ScenarioPtr scenario = load_scenario(a.scenario);
    int p = 0;
    check(tiersim_scenario_grouping(scenario.get(), &x, &y, &p));
    if (!sessions) sessions = p;
  }
  if (!a.grouping.empty()) {
    const auto parts = split(a.grouping, ',');
    if (parts.size() != 2) throw UsageError{"grouping", "expected x,y"};
    x = parse_integer<int>(parts[0], "grouping");
    y = parse_integer<int>(parts[1], "grouping");
  }

  tiersim_log* raw_log = nullptr;
  check(tiersim_log_read_csv(a.csv.c_str(), &raw_log));
  LogPtr log(raw_log);
  if (!sessions) sessions = std::max(tiersim_log_max_session(log.get()), y + 1);

  tiersim_metrics* raw_metrics = nullptr;
  check(tiersim_metrics_compute(log.get(), x, y, *sessions, &raw_metrics));
  MetricsPtr metrics(raw_metrics);
  char* text = nullptr;
  check(tiersim_metrics_to_text(metrics.get(), &text));
  std::cout << take_string(text);
  if (!a.out.empty()) {
    char* json = nullptr;
    check(tiersim_metrics_to_json(metrics.get(), &json));
    write_text(a.out, take_string(json));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transient simulation and VM planning for a learning-user three-tier system"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tiersim_version());

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run one simulation and write the trial CSV");
  simulate->add_option("--scenario", sim.scenario, "scenario file")->required();
  simulate->add_option("--seed", sim.seed, "random seed (default: first seed in the file)");
  simulate->add_option("--horizon", sim.horizon, "simulated seconds (default: file, else 3600)");
  simulate->add_option("--users", sim.users, "override the terminal count N");
  simulate->add_option("--configs", sim.config, "override replicas as k1,k2,k3");
  simulate->add_option("--learning", sim.learning, "on|off");
  simulate->add_option("--routing", sim.routing, "round_robin|uniform_random");
  simulate->add_option("--out", sim.out, "trial CSV output path")->required();
  simulate->add_option("--summary", sim.summary, "also write the estimators as JSON");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "evaluate configurations against an SLA");
  sweep->add_option("--scenario", sw.scenario, "base scenario file")->required();
  sweep->add_option("--configs", sw.configs, "k1,k2,k3 triples separated by ';'")->required();
  sweep->add_option("--users", sw.users, "comma-separated terminal counts")->required();
  sweep->add_option("--seeds", sw.seeds, "comma-separated seeds (default: file seeds)");
  sweep->add_option("--sla", sw.sla, "response-time threshold in seconds")->capture_default_str();
  sweep->add_option("--gate", sw.gate, "overall,novice,intermediate,expert or all")
      ->capture_default_str();
  sweep->add_option("--learning", sw.learning, "on|off|both")->capture_default_str();
  sweep->add_option("--horizon", sw.horizon, "simulated seconds (default: file, else 3600)");
  sweep->add_option("--threads", sw.threads, "worker threads, 0 = all cores")->capture_default_str();
  sweep->add_option("--out", sw.out, "JSON report output path")->required();

  MetricsArgs me;
  auto* metrics = app.add_subcommand("metrics", "recompute the estimators from a trial CSV");
  metrics->add_option("csv", me.csv, "trial CSV")->required();
  metrics->add_option("--scenario", me.scenario, "take grouping and session count from this file");
  metrics->add_option("--grouping", me.grouping, "novice and intermediate boundaries x,y (default 5,10)");
  metrics->add_option("--sessions", me.sessions, "session count P (default: scenario, else observed)");
  metrics->add_option("--out", me.out, "also write the estimators as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (sweep->parsed()) return cmd_sweep(sw);
    if (metrics->parsed()) return cmd_metrics(me);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.field << ": " << e.message << "\n";
    return kExitValidation;
  } catch (const LibraryError& e) {
    if (e.status != TIERSIM_ERR_IO || *tiersim_last_error()) {
      std::cerr << "error: " << tiersim_last_error() << "\n";
    }
    return e.status == TIERSIM_ERR_VALIDATION ? kExitValidation : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
