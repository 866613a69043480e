#pragma once

// Fixtures shared by the unit suites and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "stmrta/chaos.hpp"
#include "stmrta/scenario.hpp"
#include "stmrta/strategies.hpp"

namespace stmrta::testing {

// Cases per property suite.
inline constexpr int kPropertyCases = 1000;

// Three robots on a chain: R0-R1 and R1-R2 linked, R0-R2 out of range.
// R2 is 180 m from R1 and R0 is 300 m away, so R1 captures R2 when both
// transmit (300 / 180 >= 1.5).
inline Scenario golden_scenario() {
  Scenario sc;
  sc.robots = {{0, 0}, {300, 0}, {480, 0}};
  sc.radio_range = 350.0;
  const Point where[] = {{160, 100}, {-100, 200}, {350, -200}, {600, 80}, {560, -150}};
  for (std::uint8_t t = 0; t < 5; ++t) sc.tasks.emplace_back(TaskId{std::uint8_t(t + 1)}, where[t], 0.0);
  return sc;
}

inline std::vector<Robot> robots_with_books(const Scenario& sc) {
  std::vector<Robot> robots(sc.robots.size());
  for (std::size_t i = 0; i < robots.size(); ++i) {
    robots[i].id = RobotId{static_cast<std::uint16_t>(i)};
    robots[i].position = sc.robots[i];
    robots[i].radio_range = sc.radio_range;
    for (const auto& t : sc.tasks)
      robots[i].bid_book.push_back({compute_bid(robots[i].position, t.location()), t.id()});
    sort_bid_book(robots[i]);
  }
  return robots;
}

inline RoundConfig golden_round_config() {
  RoundConfig rc;
  rc.completion_tx = 0;
  return rc;
}

struct GoldenRun {
  RoundStats stats;
  RoundTrace trace;
  ChaosPacket packet;
  AllocationRoundOutcome outcome;
};

inline GoldenRun run_golden() {
  const Scenario sc = golden_scenario();
  auto robots = robots_with_books(sc);
  std::vector<DbtaParticipant> nodes;
  for (auto& r : robots) nodes.emplace_back(r, robots.size(), 1, PacketLayout::wide(), 1, 2);
  GoldenRun run;
  run.trace.sequence = 1;
  run.stats = run_chaos_round(std::span(nodes), Topology(sc.robots, sc.radio_range),
                              RobotId{0}, golden_round_config(), 0, &run.trace);
  run.packet = nodes[0].packet();
  const std::vector<TaskId> open{{1}, {2}, {3}, {4}, {5}};
  run.outcome = dbta_allocate(run.packet, open);
  return run;
}

// Robots scattered so that the unit-disk graph is connected: each new robot
// lands within `range` of a random earlier one.
inline std::vector<Point> connected_positions(std::size_t n, double range,
                                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> radius(0.2 * range, 0.95 * range);
  std::vector<Point> out{{500, 500}};
  while (out.size() < n) {
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    const Point base = out[pick(rng)];
    const double a = angle(rng), r = radius(rng);
    out.push_back({base.x + r * std::cos(a), base.y + r * std::sin(a)});
  }
  return out;
}

inline Scenario random_static_scenario(std::size_t robots, std::size_t tasks,
                                       std::mt19937_64& rng) {
  Scenario sc;
  sc.radio_range = 350.0;
  sc.robots = connected_positions(robots, sc.radio_range, rng);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (std::size_t t = 0; t < tasks; ++t) {
    const double x = u(rng);
    sc.tasks.emplace_back(TaskId{static_cast<std::uint8_t>(t + 1)}, Point{x, u(rng)}, 0.0);
  }
  return sc;
}

inline std::vector<TaskId> all_task_ids(const Scenario& sc) {
  std::vector<TaskId> ids;
  for (const auto& t : sc.tasks) ids.push_back(t.id());
  return ids;
}

// Max-consensus replay: for every task ever bid on, the strongest placed bid
// under (bid, lower robot id).
inline std::map<TaskId, BidEvent> replay_max(const std::vector<BidEvent>& log) {
  std::map<TaskId, BidEvent> best;
  for (const auto& e : log) {
    auto it = best.find(e.task);
    if (it == best.end() || e.bid > it->second.bid ||
        (e.bid == it->second.bid && e.robot < it->second.robot))
      best[e.task] = e;
  }
  return best;
}

// Balanced greedy restated over a plain matrix (bids[r][t]): robots that
// already hold a task this layer are unavailable until everyone has one.
inline std::vector<std::pair<std::size_t, std::size_t>> greedy_oracle(
    const std::vector<std::vector<int>>& bids) {
  const std::size_t R = bids.size(), T = R ? bids[0].size() : 0;
  std::vector<bool> available(R, true), done(T, false);
  std::vector<std::pair<std::size_t, std::size_t>> out;  // (task, robot)
  for (std::size_t k = 0; k < T; ++k) {
    if (std::none_of(available.begin(), available.end(), [](bool b) { return b; }))
      available.assign(R, true);
    int best = -1;
    std::size_t bt = 0, br = 0;
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t r = 0; r < R; ++r)
        if (!done[t] && available[r] && bids[r][t] > best) best = bids[r][t], bt = t, br = r;
    done[bt] = true;
    available[br] = false;
    out.push_back({bt, br});
  }
  return out;
}

// Exhaustive argmax with the lower id winning ties.
inline std::size_t argmax_robot(const std::vector<int>& bids) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < bids.size(); ++r)
    if (bids[r] > bids[best]) best = r;
  return best;
}

}  // namespace stmrta::testing
