#pragma once

#include <algorithm>
#include <climits>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "stmrta/codec.hpp"
#include "stmrta/radio.hpp"

namespace stmrta {

struct ReceiveResult {
  bool changed = false;
  /// Sequence number did not match the local round; reception ignored.
  bool stale = false;
};

/// Per-robot protocol state for one synchronous-transmission round.
/// The engine owns the timing; participants own packet contents.
template <class P>
concept RoundParticipant =
    requires(P& p, const P& cp, std::span<const std::uint8_t> bytes, bool b) {
      p.begin(b);
      { cp.frame() } -> std::convertible_to<Frame>;
      { p.receive(bytes) } -> std::same_as<ReceiveResult>;
      { cp.flags() } -> std::convertible_to<const FlagSet&>;
    };

struct RoundConfig {
  double slot_ms = 8.0;
  int max_slots = 250;
  /// Identical final frames every robot sends once agreement is reached.
  int completion_tx = 3;
  /// Earliest slot for non-initiator transmissions; slot 2 is spent by the
  /// initiator's neighbours building their bid books.
  int first_relay_slot = 3;
  /// Quiet slots before a robot with incomplete flags retransmits.
  int retry_timeout_slots = 4;
  int retry_jitter_slots = 4;
  /// Robots with complete flags wait this many times longer.
  int keepalive_factor = 3;
  /// Frames per transmission (multi-packet mode); a slot lasts frames x slot_ms.
  std::size_t frames = 1;
  RadioParams radio;
};

enum class Mark : char {
  transmit = 'T',
  fresh = 'N',
  old = 'O',
  silence = '-',
  collision = 'X',
};

enum class TxReason : std::uint8_t { none, bootstrap, new_info, retry, completion };

struct SlotRecord {
  int slot = 0;
  std::vector<Mark> marks;
  std::vector<TxReason> reasons;
  std::vector<Transmission> frames;
  /// Flag counts after the slot, per robot.
  std::vector<std::size_t> flag_counts;
};

struct RoundTrace {
  std::uint32_t sequence = 0;
  RobotId initiator;
  std::vector<SlotRecord> slots;
  int completion_slots = 0;
  bool keep_frames = true;

  /// Line-oriented dump: one `slot` line per slot listing every robot's mark,
  /// followed by hex dumps of the frames sent in that slot.
  void write(std::ostream& out) const;
};

struct RoundStats {
  /// Data slots plus completion slots.
  int slots_used = 0;
  /// Slot in which the last data transmission happened before agreement.
  int data_slots = 0;
  double duration_ms = 0.0;
  bool converged = false;
  std::vector<double> radio_on_ms;
  std::size_t transmissions = 0;
};

struct FlagMerge {
  ChaosPacket packet;
  bool changed = false;
  bool stale = false;
};

/// Bitwise OR of flags. A sequence mismatch leaves `local` untouched.
FlagMerge merge_flags(const ChaosPacket& local, const ChaosPacket& received);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Runs one round to agreement (or max_slots):
///  slot 1: the initiator transmits;
///  later:  a robot transmits iff its previous reception carried new
///          information (from first_relay_slot on), or its retry timer fires;
///  every other awake robot listens. Receptions go to the participant's
///  merge. Once all robots hold identical packets with full flags and none
///  has anything pending, every robot sends completion_tx final frames and
///  sleeps.
template <RoundParticipant P>
RoundStats run_chaos_round(std::span<P> nodes, const Topology& topology,
                           RobotId initiator, const RoundConfig& cfg,
                           std::uint64_t seed, RoundTrace* trace = nullptr) {
  const std::size_t n = nodes.size();
  if (n == 0) throw std::invalid_argument("round needs at least one robot");
  if (topology.size() != n)
    throw std::invalid_argument("topology and participant count differ");
  if (initiator.value >= n) throw std::invalid_argument("initiator out of range");
  if (cfg.max_slots < 1) throw std::invalid_argument("max_slots must be >= 1");

  struct Control {
    bool pending = false;
    bool joined = false;
    int next_retry = INT_MAX;
  };
  std::vector<Control> ctl(n);
  std::mt19937_64 rng(seed);
  RadioParams radio = cfg.radio;
  if (radio.loss_probability > 0.0 && radio.rng == nullptr) radio.rng = &rng;

  const double slot_len = cfg.slot_ms * static_cast<double>(cfg.frames);
  RoundStats stats;
  stats.radio_on_ms.assign(n, 0.0);
  if (trace) {
    trace->initiator = initiator;
    trace->slots.clear();
    trace->completion_slots = 0;
  }

  for (std::size_t i = 0; i < n; ++i) nodes[i].begin(i == initiator.value);
  ctl[initiator.value].joined = true;

  auto arm_retry = [&](std::size_t i, int slot) {
    int timeout = cfg.retry_timeout_slots;
    if (nodes[i].flags().all_of_first(n)) timeout *= cfg.keepalive_factor;
    int jitter = 0;
    if (cfg.retry_jitter_slots > 0)
      jitter = std::uniform_int_distribution<int>(0, cfg.retry_jitter_slots - 1)(rng);
    ctl[i].next_retry = slot + std::max(1, timeout) + jitter;
  };

  auto agreed = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      if (ctl[i].pending || !nodes[i].flags().all_of_first(n)) return false;
    }
    const Frame first = nodes[0].frame();
    for (std::size_t i = 1; i < n; ++i) {
      if (nodes[i].frame() != first) return false;
    }
    return true;
  };

  std::vector<Transmission> txs;
  std::vector<RobotId> listeners;
  std::vector<TxReason> reasons(n);
  std::vector<SlotActivity> activity(n);

  for (int slot = 1; slot <= cfg.max_slots; ++slot) {
    txs.clear();
    listeners.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const RobotId id{static_cast<std::uint16_t>(i)};
      TxReason why = TxReason::none;
      if (slot == 1) {
        if (id == initiator) why = TxReason::bootstrap;
      } else if (ctl[i].pending && slot >= cfg.first_relay_slot) {
        why = TxReason::new_info;
      } else if (ctl[i].joined && !ctl[i].pending && slot >= ctl[i].next_retry) {
        why = TxReason::retry;
      }
      reasons[i] = why;
      if (why != TxReason::none) {
        txs.push_back(Transmission{id, nodes[i].frame()});
        activity[i] = SlotActivity::transmit;
      } else {
        listeners.push_back(id);
        activity[i] = SlotActivity::listen;
      }
    }
    stats.transmissions += txs.size();

    const SlotOutcome outcome = resolve_slot(topology, txs, listeners, radio);
    account_radio_time(stats.radio_on_ms, activity, slot_len);

    SlotRecord rec;
    if (trace) {
      rec.slot = slot;
      rec.marks.assign(n, Mark::silence);
      rec.reasons = reasons;
      if (trace->keep_frames) rec.frames = txs;
    }

    for (const auto& tx : txs) {
      ctl[tx.from.value].pending = false;
      arm_retry(tx.from.value, slot);
      if (trace) rec.marks[tx.from.value] = Mark::transmit;
    }
    for (RobotId l : listeners) {
      const Reception& rx = outcome.per_receiver[l.value];
      Mark mark = Mark::silence;
      if (rx.kind == Reception::Kind::collision) {
        mark = Mark::collision;
      } else if (rx.kind == Reception::Kind::received) {
        const ReceiveResult r = nodes[l.value].receive(rx.frame);
        if (r.changed) {
          ctl[l.value].pending = true;
          ctl[l.value].joined = true;
          arm_retry(l.value, slot);
          mark = Mark::fresh;
        } else {
          mark = Mark::old;
        }
      }
      if (trace) rec.marks[l.value] = mark;
    }

    if (trace) {
      rec.flag_counts.resize(n);
      for (std::size_t i = 0; i < n; ++i) rec.flag_counts[i] = nodes[i].flags().count();
      trace->slots.push_back(std::move(rec));
    }

    if (agreed()) {
      stats.converged = true;
      stats.data_slots = slot;
      break;
    }
  }

  if (!stats.converged) {
    stats.data_slots = cfg.max_slots;
    stats.slots_used = cfg.max_slots;
  } else {
    const int completion =
        std::min(cfg.completion_tx, cfg.max_slots - stats.data_slots);
    stats.slots_used = stats.data_slots + completion;
    for (auto& on : stats.radio_on_ms) on += completion * slot_len;
    stats.transmissions += static_cast<std::size_t>(completion) * n;
    if (trace) trace->completion_slots = completion;
  }
  stats.duration_ms = stats.slots_used * slot_len;
  return stats;
}

/// Participant that aggregates nothing but flags.
class FlagParticipant {
 public:
  FlagParticipant(RobotId self, std::uint32_t sequence, std::size_t flag_bytes);

  void begin(bool initiator);
  Frame frame() const;
  ReceiveResult receive(std::span<const std::uint8_t> bytes);
  const FlagSet& flags() const { return packet_.flags; }
  const ChaosPacket& packet() const { return packet_; }

 private:
  RobotId self_;
  PacketLayout layout_;
  ChaosPacket packet_;
};

}  // namespace stmrta
