#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stmrta/scenario.hpp"
#include "stmrta/strategies.hpp"

namespace stmrta {

struct ExperimentConfig {
  std::size_t robot_count = 25;
  std::vector<std::size_t> task_counts;
  std::vector<Strategy> strategies;
  std::vector<Transport> transports{Transport::chaos};
  ArrivalPattern pattern;
  std::uint64_t seed_base = 1;
  int iterations = 15;
  /// Worker threads for sweeps; 0 picks the hardware concurrency.
  unsigned threads = 0;
  Arena arena;
  Deployment deployment;
  /// Everything per-mission except strategy, transport, seed and trace.
  MissionConfig mission;
  /// The parsed text, verbatim.
  std::string source;

  /// 25 robots, tasks 10..140 step 10, {aata, ibta, dbta2}, chaos,
  /// continuous arrivals, 15 iterations.
  ExperimentConfig();
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what);
  /// 1-based; 0 when the error concerns the config as a whole.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// `key = value` lines; `#` starts a comment. Unknown or repeated keys,
/// malformed values and invalid combinations throw ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "10..140 step 10", "40, 80, 140" or "25".
std::vector<std::size_t> parse_count_list(std::string_view text);

/// Throws ConfigError (line 0) on combinations no mission could run.
void validate(const ExperimentConfig& cfg);

}  // namespace stmrta
