#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stmrta/chaos.hpp"
#include "stmrta/codec.hpp"
#include "stmrta/model.hpp"

namespace stmrta {

enum class StrategyKind : std::uint8_t { aata, ibta, dbta };

struct Strategy {
  StrategyKind kind = StrategyKind::dbta;
  /// Bids each robot shares per round (DBTA_i); 1 for IBTA.
  int bids = 2;

  std::string name() const;
  /// "aata", "ibta" or "dbta<i>". Throws std::invalid_argument otherwise.
  static Strategy parse(std::string_view text);

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct Assignment {
  TaskId task;
  RobotId robot;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct AllocationRoundOutcome {
  std::vector<Assignment> assignments;
  std::vector<TaskId> unallocated;
  std::uint32_t round_index = 0;
};

// --- DBTA --------------------------------------------------------------------

struct BidEvent {
  RobotId robot;
  TaskId task;
  BidValue bid = 0;
};

/// Entries of the same task keep the stronger bid (the lower priority on a
/// full tie); when more distinct tasks than `capacity` remain, the newest
/// (largest TaskId) are dropped. Entries end up sorted by TaskId. Returns the number of entries dropped.
std::size_t merge_entries(ChaosPacket& local, const ChaosPacket& received,
                          std::size_t capacity);

struct PlacementResult {
  bool changed = false;
  std::size_t dropped = 0;
};

/// Walks the robot's sorted bid book until it holds `k` entries:
///  - task in the packet, held by someone else: overbid (keeping the entry's
///    priority) if strictly stronger, otherwise remember it in lost_tasks and
///    never bid on it again this epoch;
///  - task absent: append with the robot's lowest unused priority, or drop it
///    when the packet is full.
/// An initiator calls this on an empty packet.
PlacementResult dbta_place_bids(Robot& robot, ChaosPacket& packet, int k,
                                std::size_t capacity,
                                std::vector<BidEvent>* log = nullptr);

/// Priority passes 1..max: within a pass each winner receives at most one
/// task, taken in TaskId order. Open tasks without an assignment carry over.
AllocationRoundOutcome dbta_allocate(const ChaosPacket& converged,
                                     std::span<const TaskId> open_tasks);

class DbtaParticipant {
 public:
  DbtaParticipant(Robot& robot, std::size_t robot_count, std::uint32_t sequence,
                  const PacketLayout& layout, std::size_t frames, int bids,
                  std::vector<BidEvent>* log = nullptr);

  void begin(bool initiator);
  Frame frame() const;
  ReceiveResult receive(std::span<const std::uint8_t> bytes);
  const FlagSet& flags() const { return packet_.flags; }

  Frame originate();
  void deliver(std::span<const std::uint8_t> bytes) { receive(bytes); }

  const ChaosPacket& packet() const { return packet_; }
  std::size_t dropped() const { return dropped_; }

 private:
  void place();

  Robot* robot_;
  std::size_t robot_count_;
  PacketLayout layout_;
  std::size_t frames_;
  int bids_;
  std::vector<BidEvent>* log_;
  ChaosPacket packet_;
  bool placed_ = false;
  std::size_t dropped_ = 0;
};

// --- IBTA --------------------------------------------------------------------

/// Lowest open TaskId, or nullopt.
std::optional<TaskId> ibta_target(std::span<const TaskId> open_tasks);

AllocationRoundOutcome ibta_allocate(const ChaosPacket& converged,
                                     std::span<const TaskId> open_tasks);

/// Max-consensus over a single task's bid.
class IbtaParticipant {
 public:
  IbtaParticipant(RobotId self, TaskId target, BidValue own_bid,
                  std::uint32_t sequence, const PacketLayout& layout);

  void begin(bool initiator);
  Frame frame() const;
  ReceiveResult receive(std::span<const std::uint8_t> bytes);
  const FlagSet& flags() const { return packet_.flags; }

  Frame originate();
  void deliver(std::span<const std::uint8_t> bytes) { receive(bytes); }

  const ChaosPacket& packet() const { return packet_; }

 private:
  void offer();

  RobotId self_;
  TaskId target_;
  BidValue own_bid_;
  PacketLayout layout_;
  ChaosPacket packet_;
};

// --- AATA --------------------------------------------------------------------

/// Bid of every robot for every task, or nothing where unknown.
class BidMatrix {
 public:
  BidMatrix() = default;
  BidMatrix(std::vector<RobotId> robots, std::vector<TaskId> tasks);

  void set(RobotId robot, TaskId task, BidValue bid);
  std::optional<BidValue> get(RobotId robot, TaskId task) const;
  bool complete() const { return known_ == cells_.size(); }
  std::size_t known() const { return known_; }
  const std::vector<RobotId>& robots() const { return robots_; }
  const std::vector<TaskId>& tasks() const { return tasks_; }

 private:
  std::size_t index(RobotId robot, TaskId task) const;

  std::vector<RobotId> robots_;
  std::vector<TaskId> tasks_;
  std::vector<std::optional<BidValue>> cells_;
  std::size_t known_ = 0;
};

/// Repeatedly takes the globally strongest remaining (robot, task) bid; a
/// robot that already got a task waits until every robot has one in the
/// current layer. Ties: ascending TaskId, then ascending RobotId.
std::vector<Assignment> balanced_greedy(const BidMatrix& matrix);

/// Tuple ordering used to choose which tuples fit in a frame.
bool tuple_before(const BidTuple& a, const BidTuple& b);

/// Set union of bid tuples, capped at the frame's tuple capacity.
class AataParticipant {
 public:
  AataParticipant(RobotId self, std::vector<BidTuple> own_pending,
                  std::uint32_t sequence, std::size_t flag_bytes);

  void begin(bool initiator);
  Frame frame() const;
  ReceiveResult receive(std::span<const std::uint8_t> bytes);
  const FlagSet& flags() const { return packet_.flags; }

  Frame originate();
  void deliver(std::span<const std::uint8_t> bytes) { receive(bytes); }

  const TuplePacket& packet() const { return packet_; }

 private:
  void contribute();
  void merge_tuples(const std::vector<BidTuple>& incoming);

  RobotId self_;
  std::vector<BidTuple> own_pending_;
  std::size_t flag_bytes_;
  std::size_t capacity_;
  TuplePacket packet_;
  bool contributed_ = false;
};

}  // namespace stmrta
