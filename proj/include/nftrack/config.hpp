// JSON run configuration. Unknown keys are rejected and every physical
// quantity carries its unit in the key name.
#pragma once

#include "nftrack/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nftrack {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct PhaseProfileSpec {
  Vec3 start = Vec3(1.0, 0.0, 1.0);
  Vec3 end = Vec3(1.0, 8.0, 1.0);
  int points = 161;
};

struct FimSweepSpec {
  std::vector<ArraySpec> arrays;
  double d_over_d_min = 0.1;
  double d_over_d_max = 1000.0;
  int points = 200;
};

struct Config {
  Scenario scenario;
  double cdf_max_m = 5.0;
  int cdf_points = 501;
  std::optional<PhaseProfileSpec> phase_profile;
  std::optional<FimSweepSpec> fim_sweep;
};

/// Throws ConfigError naming the offending key.
Config parse_config(const std::string& json_text);
Config load_config(const std::filesystem::path& path);

}  // namespace nftrack
