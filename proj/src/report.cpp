#include <algorithm>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "tiersim/io.hpp"

namespace tiersim {

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json config_json(const VmConfiguration& c) {
  return ordered_json::array({c.replicas[0], c.replicas[1], c.replicas[2]});
}

ordered_json metrics_object(const MetricsReport& m) {
  ordered_json out;
  const Grouping& g = m.grouping;
  out["grouping"] = {{"novice_boundary", g.novice_boundary},
                     {"intermediate_boundary", g.intermediate_boundary},
                     {"sessions", g.sessions}};
  out["total_trials"] = m.total_trials;
  out["overall_mean_srt"] = optional_number(m.overall_mean_srt);
  const int first[3] = {1, g.novice_boundary + 1, g.intermediate_boundary + 1};
  const int last[3] = {g.novice_boundary, g.intermediate_boundary, g.sessions};
  ordered_json levels;
  for (int l = 0; l < 3; ++l) {
    levels[std::string(to_string(kAllLevels[l]))] = {
        {"first_session", first[l]},
        {"last_session", last[l]},
        {"mean_srt", optional_number(m.level_mean_srt[l])},
        {"trials", m.level_counts[l]}};
  }
  out["levels"] = levels;
  ordered_json sessions = ordered_json::array();
  for (std::size_t p = 0; p < m.session_mean_srt.size(); ++p) {
    sessions.push_back({{"session", p + 1},
                        {"mean_srt", optional_number(m.session_mean_srt[p])},
                        {"trials", m.session_counts[p]}});
  }
  out["sessions"] = sessions;
  return out;
}

ordered_json verdict_json(const SlaVerdict& v) {
  ordered_json metrics = ordered_json::array();
  for (const auto& mv : v.metrics) {
    metrics.push_back({{"metric", std::string(to_string(mv.metric))},
                       {"value", optional_number(mv.value)},
                       {"pass", mv.pass},
                       {"reason", mv.reason}});
  }
  return {{"pass", v.pass}, {"metrics", metrics}};
}

std::string cell(const std::optional<double>& v, int width) {
  std::ostringstream out;
  out << std::setw(width);
  if (v) {
    std::ostringstream num;
    num << std::fixed << std::setprecision(3) << *v;
    out << num.str();
  } else {
    out << "-";
  }
  return out.str();
}

std::string gate_list(const SlaSpec& sla) {
  std::string out;
  for (GatedMetric m : sla.gated_metrics) {
    if (!out.empty()) out += ',';
    out += to_string(m);
  }
  return out;
}

}  // namespace

std::string metrics_json(const MetricsReport& report) {
  return metrics_object(report).dump(2) + "\n";
}

std::string metrics_text(const MetricsReport& m) {
  std::ostringstream out;
  const Grouping& g = m.grouping;
  out << "completed trials: " << m.total_trials << "\n";
  out << "overall mean SRT: " << cell(m.overall_mean_srt, 0) << " s\n";
  const int first[3] = {1, g.novice_boundary + 1, g.intermediate_boundary + 1};
  const int last[3] = {g.novice_boundary, g.intermediate_boundary, g.sessions};
  out << "\n" << std::left << std::setw(14) << "level" << std::setw(10) << "sessions"
      << std::right << std::setw(10) << "trials" << std::setw(12) << "mean_srt" << "\n";
  for (int l = 0; l < 3; ++l) {
    out << std::left << std::setw(14) << to_string(kAllLevels[l]) << std::setw(10)
        << (std::to_string(first[l]) + "-" + std::to_string(last[l])) << std::right
        << std::setw(10) << m.level_counts[l] << cell(m.level_mean_srt[l], 12) << "\n";
  }
  out << "\n" << std::setw(7) << "session" << std::setw(10) << "trials" << std::setw(12)
      << "mean_srt" << "\n";
  for (std::size_t p = 0; p < m.session_mean_srt.size(); ++p) {
    out << std::setw(7) << p + 1 << std::setw(10) << m.session_counts[p]
        << cell(m.session_mean_srt[p], 12) << "\n";
  }
  return out.str();
}

std::string sweep_json(const SweepReport& report) {
  ordered_json doc;
  ordered_json gate = ordered_json::array();
  for (GatedMetric m : report.sla.gated_metrics) gate.push_back(std::string(to_string(m)));
  doc["sla"] = {{"threshold", report.sla.threshold}, {"gate", gate}};

  ordered_json runs = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json r;
    r["config"] = config_json(e.config);
    r["users"] = e.users;
    r["seed"] = e.seed;
    r["learning"] = e.learning;
    r["metrics"] = e.metrics ? metrics_object(*e.metrics) : ordered_json(nullptr);
    r["error"] = e.error ? ordered_json(*e.error) : ordered_json(nullptr);
    r["verdict"] = verdict_json(e.verdict);
    runs.push_back(std::move(r));
  }
  doc["runs"] = runs;

  ordered_json summaries = ordered_json::array();
  for (const auto& s : report.summaries) {
    ordered_json means;
    for (GatedMetric m : kAllGatedMetrics) {
      means[std::string(to_string(m))] = optional_number(s.mean_metrics[static_cast<int>(m)]);
    }
    summaries.push_back({{"config", config_json(s.config)},
                         {"users", s.users},
                         {"learning", s.learning},
                         {"seeds", s.seeds},
                         {"failed_runs", s.failed_runs},
                         {"mean_over_seeds", means},
                         {"verdict", verdict_json(s.verdict)}});
  }
  doc["summaries"] = summaries;

  ordered_json selections = ordered_json::array();
  for (const auto& sel : report.selections) {
    selections.push_back({{"users", sel.users},
                          {"learning", sel.learning},
                          {"policy", gate},
                          {"config", sel.config ? config_json(*sel.config) : ordered_json(nullptr)},
                          {"total_vms", sel.config ? ordered_json(sel.config->total_vms())
                                                   : ordered_json(nullptr)}});
  }
  doc["selections"] = selections;
  return doc.dump(2) + "\n";
}

std::string sweep_table(const SweepReport& report) {
  std::vector<int> users;
  std::vector<bool> flags;
  std::vector<VmConfiguration> configs;
  for (const auto& s : report.summaries) {
    if (std::find(users.begin(), users.end(), s.users) == users.end()) users.push_back(s.users);
    if (std::find(flags.begin(), flags.end(), s.learning) == flags.end()) flags.push_back(s.learning);
    if (std::find(configs.begin(), configs.end(), s.config) == configs.end()) configs.push_back(s.config);
  }

  std::ostringstream out;
  out << "SLA: mean SRT <= " << report.sla.threshold << " s on {" << gate_list(report.sla)
      << "}; values are means over seeds, '*' marks a gated metric over the threshold\n";
  for (bool learning : flags) {
    for (GatedMetric m : kAllGatedMetrics) {
      const bool gated = std::find(report.sla.gated_metrics.begin(), report.sla.gated_metrics.end(),
                                   m) != report.sla.gated_metrics.end();
      out << "\nmean SRT per " << to_string(m) << " trial (s), learning "
          << (learning ? "on" : "off") << "\n";
      out << std::left << std::setw(12) << "config" << std::right;
      for (int n : users) out << std::setw(10) << ("N=" + std::to_string(n));
      out << "\n";
      for (const auto& c : configs) {
        out << std::left << std::setw(12) << to_string(c) << std::right;
        for (int n : users) {
          const ConfigSummary* s = report.find(c, n, learning);
          const auto v = s ? s->mean_metrics[static_cast<int>(m)] : std::nullopt;
          const bool over = gated && (!v || *v > report.sla.threshold);
          out << cell(v, 9) << (over ? '*' : ' ');
        }
        out << "\n";
      }
    }
  }
  out << "\nselection (fewest VMs passing every gated metric)\n";
  for (const auto& sel : report.selections) {
    out << "  N=" << sel.users << ", learning " << (sel.learning ? "on" : "off") << ": "
        << (sel.config ? to_string(*sel.config) : std::string("none")) << "\n";
  }
  return out.str();
}

}  // namespace tiersim
