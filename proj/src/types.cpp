#include "tiersim/types.hpp"

namespace tiersim {

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::kDeterministic:
      return "deterministic";
    case Distribution::kExponential:
      return "exponential";
  }
  return "?";
}

std::string_view to_string(RoutingPolicy r) {
  switch (r) {
    case RoutingPolicy::kRoundRobin:
      return "round_robin";
    case RoutingPolicy::kUniformRandom:
      return "uniform_random";
  }
  return "?";
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kNovice:
      return "novice";
    case Level::kIntermediate:
      return "intermediate";
    case Level::kExpert:
      return "expert";
  }
  return "?";
}

std::optional<Distribution> parse_distribution(std::string_view text) {
  if (text == "deterministic") return Distribution::kDeterministic;
  if (text == "exponential") return Distribution::kExponential;
  return std::nullopt;
}

std::optional<RoutingPolicy> parse_routing(std::string_view text) {
  if (text == "round_robin") return RoutingPolicy::kRoundRobin;
  if (text == "uniform_random") return RoutingPolicy::kUniformRandom;
  return std::nullopt;
}

std::optional<Level> parse_level(std::string_view text) {
  for (Level level : kAllLevels) {
    if (text == to_string(level)) return level;
  }
  return std::nullopt;
}

std::string to_string(const VmConfiguration& config) {
  return "(" + std::to_string(config.replicas[0]) + "," + std::to_string(config.replicas[1]) +
         "," + std::to_string(config.replicas[2]) + ")";
}

}  // namespace tiersim
