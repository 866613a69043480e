#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace stmrta {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

/// Task identifier; one byte on the wire.
struct TaskId {
  std::uint8_t value = 0;

  friend auto operator<=>(const TaskId&, const TaskId&) = default;
};

/// Robot identifier. Flag bitmaps index robots by this value.
struct RobotId {
  std::uint16_t value = 0;

  friend auto operator<=>(const RobotId&, const RobotId&) = default;
};

/// Higher means a better robot-task pairing. Zero is reserved for "no bid".
using BidValue = std::uint16_t;

inline constexpr BidValue kDefaultBidScale = 2000;

std::string to_string(TaskId id);
std::string to_string(RobotId id);

enum class TaskState : std::uint8_t { undiscovered, open, allocated, completed };

const char* to_string(TaskState s);

class Task {
 public:
  Task(TaskId id, Point location, double discovery_ms);

  TaskId id() const { return id_; }
  Point location() const { return location_; }
  double discovery_ms() const { return discovery_ms_; }
  TaskState state() const { return state_; }
  std::optional<RobotId> assignee() const { return assignee_; }
  std::optional<double> completion_ms() const { return completion_ms_; }

  // Transitions are monotone: undiscovered -> open -> allocated -> completed.
  // Any other transition throws std::logic_error.
  void discover();
  void allocate(RobotId robot);
  void complete(double at_ms);

 private:
  TaskId id_;
  Point location_;
  double discovery_ms_;
  TaskState state_ = TaskState::undiscovered;
  std::optional<RobotId> assignee_;
  std::optional<double> completion_ms_;
};

/// One row of a robot's bid book.
struct BidBookItem {
  BidValue bid = 0;
  TaskId task;

  friend bool operator==(const BidBookItem&, const BidBookItem&) = default;
};

/// (taskId, bidValue, priority, winner) as carried in consensus packets.
struct BidEntry {
  TaskId task;
  BidValue bid = 0;
  std::uint8_t priority = 0;
  RobotId winner;

  friend bool operator==(const BidEntry&, const BidEntry&) = default;
};

struct Robot {
  RobotId id;
  Point position;
  double radio_range = 0.0;
  std::vector<BidBookItem> bid_book;
  std::set<TaskId> lost_tasks;
  std::deque<TaskId> assigned_queue;
  double radio_on_ms = 0.0;
};

class BidUnderflow : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// round(scale - |from - to|). Throws BidUnderflow when the result would not
/// be a strictly positive bid.
BidValue compute_bid(Point from, Point to, BidValue scale = kDefaultBidScale);

/// Bid of `robot` (at its current position) for an open task.
BidValue compute_bid(const Robot& robot, const Task& task,
                     BidValue scale = kDefaultBidScale);

/// Descending by bid, ties by ascending TaskId.
void sort_bid_book(std::vector<BidBookItem>& book);
void sort_bid_book(Robot& robot);

/// Strict total order on competing bids: higher bid wins, equal bids go to
/// the lower RobotId.
constexpr bool outbids(BidValue bid, RobotId bidder, BidValue other_bid,
                       RobotId other_bidder) {
  if (bid != other_bid) return bid > other_bid;
  return bidder < other_bidder;
}

}  // namespace stmrta
