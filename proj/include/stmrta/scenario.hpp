#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stmrta/chaos.hpp"
#include "stmrta/codec.hpp"
#include "stmrta/model.hpp"
#include "stmrta/netflood.hpp"
#include "stmrta/strategies.hpp"

namespace stmrta {

enum class ArrivalKind : std::uint8_t { all_at_start, continuous, spiking };

/// "static", "continuous" or "spiking".
std::string to_string(ArrivalKind kind);
ArrivalKind parse_arrival_kind(std::string_view text);

struct ArrivalPattern {
  ArrivalKind kind = ArrivalKind::continuous;
  double interval_ms = 2000.0;
  /// Tasks per interval for the continuous pattern.
  int per_interval = 4;
};

/// Discovery time of each of `count` tasks, in TaskId order. Batches land at
/// interval, 2*interval, ...; the spiking pattern repeats blocks of
/// [1-2, 1-2, 1-2, 8, 8] tasks, drawing the small batches from `rng`.
std::vector<double> arrival_times(std::size_t count, const ArrivalPattern& pattern,
                                  std::mt19937_64& rng);

struct Arena {
  double width = 1000.0;
  double height = 1000.0;
};

/// Robots start on a square grid anchored at the origin, each jittered.
struct Deployment {
  double spacing = 200.0;
  double jitter = 25.0;
  double radio_range = 350.0;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::vector<Point> robots;
  double radio_range = 350.0;
  /// TaskIds are 1..n.
  std::vector<Task> tasks;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic in `seed`. Regenerates a disconnected deployment from a
/// derived sub-seed, up to 100 attempts.
Scenario generate_scenario(std::uint64_t seed, std::size_t robot_count,
                           std::size_t task_count, const ArrivalPattern& pattern,
                           const Arena& arena = {}, const Deployment& deployment = {});

enum class Transport : std::uint8_t { chaos, netflood };

std::string to_string(Transport t);
Transport parse_transport(std::string_view text);

/// Where a robot measures its bid from.
enum class BidOrigin : std::uint8_t { live, queue_end };

std::string to_string(BidOrigin o);
BidOrigin parse_bid_origin(std::string_view text);

struct MissionConfig {
  Strategy strategy;
  Transport transport = Transport::chaos;
  /// Metres per second; 1000 makes one metre cost one millisecond.
  double robot_speed = 1000.0;
  BidOrigin bid_origin = BidOrigin::live;
  PacketLayout layout = PacketLayout::standard();
  /// Spread DBTA_i entries over ceil(i / layout.entries) frames.
  bool multi_packet = false;
  RoundConfig round;
  NetfloodConfig netflood;
  BidValue bid_scale = kDefaultBidScale;
  /// Chaos rounds one AATA allocation may spend filling its bid matrix.
  int aata_max_rounds = 100000;
  double clock_ceiling_ms = 1e10;
  std::uint64_t seed = 0;
  /// Per-slot round logs, chaos transport only.
  std::ostream* trace = nullptr;
};

/// Frames per DBTA transmission under `cfg`; throws std::invalid_argument
/// when the strategy needs more entries than one frame holds and
/// multi-packet mode is off.
std::size_t frames_for(const MissionConfig& cfg);

struct MetricsRecord {
  double makespan_ms = 0.0;
  double total_convergence_ms = 0.0;
  std::vector<double> radio_on_ms;
  std::uint32_t rounds_used = 0;
  std::uint32_t failed_rounds = 0;
  std::size_t dropped_entries = 0;
  std::vector<Assignment> assignments;

  double mean_radio_on_ms() const;
};

class MissionTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Millisecond event loop. Discovered tasks open at their arrival time;
/// while tasks are open, allocation rounds run back to back and consume
/// clock; robots travel their FIFO queues meanwhile. Rounds that fail to
/// converge allocate nothing. Ends when every task is complete.
MetricsRecord run_mission(const Scenario& scenario, const MissionConfig& cfg);

}  // namespace stmrta
