#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "stmrta/config.hpp"
#include "stmrta/scenario.hpp"

namespace stmrta {

/// Depends only on the task set, so every strategy and transport in a sweep
/// sees the same scenarios.
std::uint64_t scenario_seed(std::uint64_t seed_base, std::size_t task_count,
                            int iteration);
std::uint64_t protocol_seed(std::uint64_t scenario_seed, const Strategy& strategy,
                            Transport transport);

struct RunRow {
  std::uint64_t seed = 0;
  Strategy strategy;
  Transport transport = Transport::chaos;
  std::size_t task_count = 0;
  int iteration = 0;
  MetricsRecord metrics;
};

/// One mission per (strategy, transport, task count, iteration), run on a
/// worker pool; rows come back in that nesting order regardless of
/// scheduling. With `trace_dir`, each chaos mission writes its round log
/// there.
std::vector<RunRow> run_sweep(const ExperimentConfig& cfg,
                              const std::optional<std::filesystem::path>& trace_dir = {});

/// runs.csv, aggregate.csv, makespan.dat, convergence.dat, radio_on.dat and
/// run_header.txt. Throws std::runtime_error when a file cannot be written.
void write_outputs(const ExperimentConfig& cfg, const std::vector<RunRow>& rows,
                   const std::filesystem::path& out_dir);

}  // namespace stmrta
