#include "stmrta/model.hpp"

#include <algorithm>
#include <cmath>

namespace stmrta {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string to_string(TaskId id) { return "T" + std::to_string(id.value); }

std::string to_string(RobotId id) { return "R" + std::to_string(id.value); }

const char* to_string(TaskState s) {
  switch (s) {
    case TaskState::undiscovered: return "undiscovered";
    case TaskState::open: return "open";
    case TaskState::allocated: return "allocated";
    case TaskState::completed: return "completed";
  }
  return "?";
}

Task::Task(TaskId id, Point location, double discovery_ms)
    : id_(id), location_(location), discovery_ms_(discovery_ms) {}

void Task::discover() {
  if (state_ != TaskState::undiscovered)
    throw std::logic_error(to_string(id_) + ": discover from state " +
                           to_string(state_));
  state_ = TaskState::open;
}

void Task::allocate(RobotId robot) {
  if (state_ != TaskState::open)
    throw std::logic_error(to_string(id_) + ": allocate from state " +
                           to_string(state_));
  state_ = TaskState::allocated;
  assignee_ = robot;
}

void Task::complete(double at_ms) {
  if (state_ != TaskState::allocated)
    throw std::logic_error(to_string(id_) + ": complete from state " +
                           to_string(state_));
  state_ = TaskState::completed;
  completion_ms_ = at_ms;
}

BidValue compute_bid(Point from, Point to, BidValue scale) {
  const double d = distance(from, to);
  const double v = std::round(static_cast<double>(scale) - d);
  if (d >= scale || v < 1.0)
    throw BidUnderflow("bid underflow: distance " + std::to_string(d) +
                       " exceeds bid scale " + std::to_string(scale));
  return static_cast<BidValue>(v);
}

BidValue compute_bid(const Robot& robot, const Task& task, BidValue scale) {
  return compute_bid(robot.position, task.location(), scale);
}

void sort_bid_book(std::vector<BidBookItem>& book) {
  std::ranges::sort(book, [](const BidBookItem& a, const BidBookItem& b) {
    if (a.bid != b.bid) return a.bid > b.bid;
    return a.task < b.task;
  });
}

void sort_bid_book(Robot& robot) { sort_bid_book(robot.bid_book); }

}  // namespace stmrta
