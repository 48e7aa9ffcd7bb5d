#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tiersim/io.hpp"

namespace tiersim {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ValidationError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

const json& object_at(const json& obj, const char* key, const std::string& field) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw ValidationError(field, "expected an object");
  return v;
}

long long as_integer(const json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15) {
      return static_cast<long long>(d);
    }
  }
  throw ValidationError(field, "expected an integer");
}

int as_int(const json& v, const std::string& field) {
  const long long x = as_integer(v, field);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ValidationError(field, "integer out of range");
  }
  return static_cast<int>(x);
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field, "expected a number");
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ValidationError(field, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ValidationError(field, "expected a string");
  return v.get<std::string>();
}

Distribution as_distribution(const json& v, const std::string& field) {
  const auto d = parse_distribution(as_string(v, field));
  if (!d) throw ValidationError(field, "expected \"deterministic\" or \"exponential\"");
  return *d;
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError("document", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("document", "expected a JSON object");
  check_keys(doc, "",
             {"schema_version", "population", "learning_curve", "trials_per_session",
              "inter_practice_time", "inter_practice_distribution", "tiers", "learning",
              "no_learning_think_time", "routing", "think_distribution", "horizon", "seeds"});

  if (!doc.contains("schema_version")) throw ValidationError("schema_version", "missing");
  if (as_int(doc["schema_version"], "schema_version") != kScenarioSchemaVersion) {
    throw ValidationError("schema_version",
                          "unsupported; expected " + std::to_string(kScenarioSchemaVersion));
  }

  ScenarioFile file;
  Scenario& s = file.scenario;
  s.curve = reference_learning_curve();

  if (doc.contains("population")) {
    const json& pop = object_at(doc, "population", "population");
    check_keys(pop, "population", {"terminals", "proportion"});
    if (pop.contains("terminals")) {
      s.population.terminals = as_int(pop["terminals"], "population.terminals");
      file.has_terminals = true;
    }
    if (pop.contains("proportion")) {
      const json& p = pop["proportion"];
      if (!p.is_array() || p.size() != 3) {
        throw ValidationError("population.proportion", "expected [novices, intermediates, experts]");
      }
      for (int k = 0; k < 3; ++k) {
        s.population.initial_proportion[k] = as_int(p[k], "population.proportion");
      }
      file.has_proportion = true;
    }
  }

  if (doc.contains("learning_curve")) {
    const json& c = object_at(doc, "learning_curve", "learning_curve");
    check_keys(c, "learning_curve", {"think_times", "novice_boundary", "intermediate_boundary"});
    if (c.contains("think_times")) {
      const json& u = c["think_times"];
      if (!u.is_array()) throw ValidationError("learning_curve.think_times", "expected an array");
      s.curve.session_think_times.clear();
      for (const json& v : u) {
        s.curve.session_think_times.push_back(as_number(v, "learning_curve.think_times"));
      }
    }
    if (c.contains("novice_boundary")) {
      s.curve.novice_boundary = as_int(c["novice_boundary"], "learning_curve.novice_boundary");
    }
    if (c.contains("intermediate_boundary")) {
      s.curve.intermediate_boundary =
          as_int(c["intermediate_boundary"], "learning_curve.intermediate_boundary");
    }
  }

  if (doc.contains("trials_per_session")) {
    s.trials_per_session = as_int(doc["trials_per_session"], "trials_per_session");
  }
  if (doc.contains("inter_practice_time")) {
    s.inter_practice_time = as_number(doc["inter_practice_time"], "inter_practice_time");
  }
  if (doc.contains("inter_practice_distribution")) {
    s.break_distribution =
        as_distribution(doc["inter_practice_distribution"], "inter_practice_distribution");
  }
  if (doc.contains("think_distribution")) {
    s.think_distribution = as_distribution(doc["think_distribution"], "think_distribution");
  }

  if (doc.contains("tiers")) {
    const json& tiers = doc["tiers"];
    if (!tiers.is_array() || tiers.size() != kTierCount) {
      throw ValidationError("tiers", "expected an array of exactly 3 tiers");
    }
    int with_replicas = 0;
    for (int t = 0; t < kTierCount; ++t) {
      const std::string path = "tiers[" + std::to_string(t) + "]";
      const json& tier = tiers[t];
      if (!tier.is_object()) throw ValidationError(path, "expected an object");
      check_keys(tier, path, {"replicas", "mean_service_time", "distribution"});
      if (tier.contains("replicas")) {
        s.tiers[t].replica_count = as_int(tier["replicas"], path + ".replicas");
        ++with_replicas;
      }
      if (tier.contains("mean_service_time")) {
        s.tiers[t].mean_service_time =
            as_number(tier["mean_service_time"], path + ".mean_service_time");
      }
      if (tier.contains("distribution")) {
        s.tiers[t].service_distribution =
            as_distribution(tier["distribution"], path + ".distribution");
      }
    }
    if (with_replicas != 0 && with_replicas != kTierCount) {
      throw ValidationError("tiers", "replicas must be given for all three tiers or none");
    }
    file.has_replicas = with_replicas == kTierCount;
  }

  if (doc.contains("learning")) s.learning_enabled = as_bool(doc["learning"], "learning");
  if (doc.contains("no_learning_think_time")) {
    s.no_learning_think_time = as_number(doc["no_learning_think_time"], "no_learning_think_time");
  }
  if (doc.contains("routing")) {
    const auto r = parse_routing(as_string(doc["routing"], "routing"));
    if (!r) throw ValidationError("routing", "expected \"round_robin\" or \"uniform_random\"");
    s.routing = *r;
  }
  if (doc.contains("horizon")) {
    file.horizon = as_number(doc["horizon"], "horizon");
    if (!std::isfinite(file.horizon) || file.horizon < 0.0) {
      throw ValidationError("horizon", "must be finite and >= 0");
    }
  }
  if (doc.contains("seeds")) {
    const json& seeds = doc["seeds"];
    if (!seeds.is_array()) throw ValidationError("seeds", "expected an array of integers");
    for (const json& v : seeds) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ValidationError("seeds", "seeds must be non-negative integers");
      }
      file.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  return file;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("scenario", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario resolve_scenario(const ScenarioFile& file, const ScenarioOverrides& overrides) {
  Scenario s = file.scenario;
  if (overrides.configuration) {
    s.set_configuration(*overrides.configuration);
  } else if (!file.has_replicas) {
    throw ValidationError("tiers[].replicas", "no VM configuration given in file or on command line");
  }
  auto& prop = s.population.initial_proportion;
  const bool all_novice = prop[1] == 0 && prop[2] == 0;
  if (overrides.terminals) {
    s.population.terminals = *overrides.terminals;
  } else if (!file.has_terminals) {
    throw ValidationError("population.terminals",
                          "no terminal count given in file or on command line");
  }
  // An all-novice proportion follows a terminal override; anything else is
  // kept as written and must sum to N.
  if (!file.has_proportion || (all_novice && overrides.terminals)) {
    prop = {s.population.terminals, 0, 0};
  }
  if (overrides.learning) s.learning_enabled = *overrides.learning;
  validate(s);
  return s;
}

std::string scenario_to_text(const Scenario& s, const std::vector<std::uint64_t>& seeds,
                             double horizon) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["population"] = {{"terminals", s.population.terminals},
                       {"proportion", s.population.initial_proportion}};
  doc["learning_curve"] = {{"think_times", s.curve.session_think_times},
                           {"novice_boundary", s.curve.novice_boundary},
                           {"intermediate_boundary", s.curve.intermediate_boundary}};
  doc["trials_per_session"] = s.trials_per_session;
  doc["inter_practice_time"] = s.inter_practice_time;
  doc["inter_practice_distribution"] = std::string(to_string(s.break_distribution));
  doc["think_distribution"] = std::string(to_string(s.think_distribution));
  json tiers = json::array();
  for (const auto& t : s.tiers) {
    tiers.push_back({{"replicas", t.replica_count},
                     {"mean_service_time", t.mean_service_time},
                     {"distribution", std::string(to_string(t.service_distribution))}});
  }
  doc["tiers"] = tiers;
  doc["learning"] = s.learning_enabled;
  if (s.no_learning_think_time) doc["no_learning_think_time"] = *s.no_learning_think_time;
  doc["routing"] = std::string(to_string(s.routing));
  doc["horizon"] = horizon;
  doc["seeds"] = seeds;
  return doc.dump(2) + "\n";
}

}  // namespace tiersim
