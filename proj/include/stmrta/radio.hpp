#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "stmrta/model.hpp"

namespace stmrta {

using Frame = std::vector<std::uint8_t>;

/// Unit-disk connectivity over robots 0..n-1 with a uniform radio range.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Point> positions, double radio_range);

  std::size_t size() const { return positions_.size(); }
  double radio_range() const { return range_; }
  Point position(RobotId r) const { return positions_.at(r.value); }
  const std::vector<Point>& positions() const { return positions_; }

  bool linked(RobotId a, RobotId b) const;
  std::vector<RobotId> neighbours(RobotId r) const;
  bool connected() const;
  /// Hop distances from `from`; -1 for unreachable robots.
  std::vector<int> hops_from(RobotId from) const;
  /// Longest shortest path in hops; -1 if disconnected.
  int diameter() const;

 private:
  std::vector<Point> positions_;
  double range_ = 0.0;
};

struct Transmission {
  RobotId from;
  Frame frame;
};

struct Reception {
  enum class Kind : std::uint8_t { silence, received, collision };
  Kind kind = Kind::silence;
  RobotId from;
  Frame frame;
};

/// Per-robot outcome of one slot, indexed by RobotId. Transmitters and robots
/// that were not listening always see silence.
struct SlotOutcome {
  std::vector<Reception> per_receiver;
};

struct RadioParams {
  double capture_ratio = 1.5;
  /// Independent per-reception loss; requires `rng` when non-zero.
  double loss_probability = 0.0;
  std::mt19937_64* rng = nullptr;
};

/// Resolves concurrent transmissions at every listener:
///  - nobody in range: silence;
///  - every in-range frame byte-identical: received (constructive interference);
///  - otherwise the nearest transmitter is received when the second-nearest is
///    at least capture_ratio times farther (capture effect), else collision.
/// Throws std::invalid_argument if a robot both transmits and listens.
SlotOutcome resolve_slot(const Topology& topology,
                         std::span<const Transmission> transmissions,
                         std::span<const RobotId> listeners,
                         const RadioParams& params = {});

enum class SlotActivity : std::uint8_t { sleep, listen, transmit };

/// Adds slot_ms to every robot that transmitted or listened.
void account_radio_time(std::span<double> radio_on_ms,
                        std::span<const SlotActivity> activity, double slot_ms);
void account_radio_time(std::span<Robot> robots,
                        std::span<const SlotActivity> activity, double slot_ms);

}  // namespace stmrta
