#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tiersim {

inline constexpr int kTierCount = 3;

/// Input rejected by validation. field() names the offending scenario field
/// (dotted path, e.g. "population.proportion") so callers can report it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Broken engine invariant. Always a bug, never an input problem.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Distribution { kDeterministic, kExponential };

enum class RoutingPolicy { kRoundRobin, kUniformRandom };

enum class Level { kNovice = 0, kIntermediate = 1, kExpert = 2 };

inline constexpr std::array<Level, 3> kAllLevels = {Level::kNovice, Level::kIntermediate,
                                                    Level::kExpert};

std::string_view to_string(Distribution d);
std::string_view to_string(RoutingPolicy r);
std::string_view to_string(Level level);

std::optional<Distribution> parse_distribution(std::string_view text);
std::optional<RoutingPolicy> parse_routing(std::string_view text);
std::optional<Level> parse_level(std::string_view text);

/// Replica counts (k1, k2, k3), one server instance per VM.
struct VmConfiguration {
  std::array<int, kTierCount> replicas{1, 1, 1};

  int total_vms() const { return replicas[0] + replicas[1] + replicas[2]; }

  friend bool operator==(const VmConfiguration&, const VmConfiguration&) = default;
  friend auto operator<=>(const VmConfiguration&, const VmConfiguration&) = default;
};

std::string to_string(const VmConfiguration& config);

struct TierSpec {
  int replica_count = 1;
  double mean_service_time = 0.5;
  Distribution service_distribution = Distribution::kDeterministic;
};

}  // namespace tiersim
