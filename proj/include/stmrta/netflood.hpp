#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "stmrta/radio.hpp"

namespace stmrta {

/// Per-hop rebroadcast frame. The forwarder id is part of the frame, so
/// frames relayed by different robots never match byte for byte.
struct FloodFrame {
  RobotId sender;
  std::uint32_t packet_id = 0;
  std::uint8_t ttl = 0;
  RobotId forwarder;
  Frame payload;

  friend bool operator==(const FloodFrame&, const FloodFrame&) = default;
};

inline constexpr std::size_t kFloodHeaderBytes = 9;

Frame encode_flood(const FloodFrame& frame);
/// Throws MalformedFrame on a short frame.
FloodFrame decode_flood(std::span<const std::uint8_t> bytes);

struct NetfloodConfig {
  int ttl = 8;
  double per_hop_delay_ms = 25.0;
  int backoff_window_slots = 8;
  RadioParams radio;

  /// ttl x per_hop_delay_ms x 2.
  double window_ms() const { return 2.0 * ttl * per_hop_delay_ms; }
  int window_slots() const { return 2 * ttl * backoff_window_slots; }
  double backoff_slot_ms() const { return per_hop_delay_ms / backoff_window_slots; }
};

/// A robot taking part in a flood exchange. `originate` returns the payload
/// it floods during its own window; `deliver` hands it every novel payload.
template <class P>
concept FloodParticipant = requires(P& p, std::span<const std::uint8_t> bytes) {
  { p.originate() } -> std::convertible_to<Frame>;
  p.deliver(bytes);
};

struct ForwardEvent {
  RobotId robot;
  RobotId sender;
  std::uint32_t packet_id = 0;
};

struct NetfloodStats {
  double duration_ms = 0.0;
  std::vector<double> radio_on_ms;
  /// informed[w][r]: robot r received the payload originated in window w.
  std::vector<std::vector<bool>> informed;
  std::size_t uninformed = 0;
  std::size_t transmissions = 0;
  std::vector<ForwardEvent> forwards;
};

/// Robots originate one after another in `order`, one window each. Within a
/// window, a robot that hears a (sender, packet id) pair it did not forward
/// last rebroadcasts it once, after a uniform backoff, with ttl decremented;
/// frames whose ttl reaches zero are not forwarded. Radios stay on for the
/// whole exchange.
template <FloodParticipant P>
NetfloodStats run_netflood_exchange(std::span<P> nodes, const Topology& topology,
                                    std::span<const RobotId> order,
                                    const NetfloodConfig& cfg,
                                    std::uint32_t first_packet_id,
                                    std::uint64_t seed) {
  const std::size_t n = nodes.size();
  if (topology.size() != n)
    throw std::invalid_argument("topology and participant count differ");
  if (cfg.ttl < 1 || cfg.ttl > 255) throw std::invalid_argument("ttl must be in [1, 255]");
  if (cfg.backoff_window_slots < 1)
    throw std::invalid_argument("backoff window must be >= 1 slot");

  std::mt19937_64 rng(seed);
  RadioParams radio = cfg.radio;
  if (radio.loss_probability > 0.0 && radio.rng == nullptr) radio.rng = &rng;
  std::uniform_int_distribution<int> backoff(0, cfg.backoff_window_slots - 1);

  struct Pending {
    int at = -1;
    FloodFrame frame;
  };
  std::vector<std::optional<std::pair<RobotId, std::uint32_t>>> last_forwarded(n);

  NetfloodStats stats;
  stats.radio_on_ms.assign(n, 0.0);
  const int window = cfg.window_slots();
  const double slot_ms = cfg.backoff_slot_ms();

  std::vector<Transmission> txs;
  std::vector<RobotId> listeners;

  for (std::size_t w = 0; w < order.size(); ++w) {
    const RobotId origin = order[w];
    const std::uint32_t pid = first_packet_id + static_cast<std::uint32_t>(w);
    std::vector<bool> informed(n, false);
    std::vector<Pending> pending(n);

    informed[origin.value] = true;
    pending[origin.value].at = 0;
    pending[origin.value].frame =
        FloodFrame{origin, pid, static_cast<std::uint8_t>(cfg.ttl), origin,
                   nodes[origin.value].originate()};

    for (int s = 0; s < window; ++s) {
      txs.clear();
      listeners.clear();
      for (std::size_t i = 0; i < n; ++i) {
        const RobotId id{static_cast<std::uint16_t>(i)};
        if (pending[i].at == s) {
          pending[i].frame.forwarder = id;
          txs.push_back(Transmission{id, encode_flood(pending[i].frame)});
          last_forwarded[i] = std::pair{pending[i].frame.sender, pid};
          if (id != origin)
            stats.forwards.push_back(ForwardEvent{id, pending[i].frame.sender, pid});
          pending[i].at = -1;
        } else {
          listeners.push_back(id);
        }
      }
      if (txs.empty()) continue;
      stats.transmissions += txs.size();

      const SlotOutcome outcome = resolve_slot(topology, txs, listeners, radio);
      for (RobotId l : listeners) {
        const Reception& rx = outcome.per_receiver[l.value];
        if (rx.kind != Reception::Kind::received) continue;
        const FloodFrame f = decode_flood(rx.frame);
        if (!informed[l.value]) {
          informed[l.value] = true;
          nodes[l.value].deliver(f.payload);
        }
        const auto key = std::pair{f.sender, f.packet_id};
        if (last_forwarded[l.value] == key || pending[l.value].at >= 0) continue;
        if (f.ttl <= 1) continue;
        pending[l.value].at = s + 1 + backoff(rng);
        pending[l.value].frame = f;
        pending[l.value].frame.ttl = static_cast<std::uint8_t>(f.ttl - 1);
      }
    }

    for (std::size_t i = 0; i < n; ++i)
      if (!informed[i]) ++stats.uninformed;
    stats.informed.push_back(std::move(informed));
    for (auto& on : stats.radio_on_ms) on += window * slot_ms;
  }
  stats.duration_ms = static_cast<double>(order.size()) * window * slot_ms;
  return stats;
}

}  // namespace stmrta
