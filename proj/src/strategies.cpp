#include "stmrta/strategies.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace stmrta {

std::string Strategy::name() const {
  switch (kind) {
    case StrategyKind::aata: return "aata";
    case StrategyKind::ibta: return "ibta";
    case StrategyKind::dbta: return "dbta" + std::to_string(bids);
  }
  return "?";
}

Strategy Strategy::parse(std::string_view text) {
  if (text == "aata") return {StrategyKind::aata, 0};
  if (text == "ibta") return {StrategyKind::ibta, 1};
  if (text.starts_with("dbta") && text.size() > 4) {
    int k = 0;
    const char* first = text.data() + 4;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, k);
    if (ec == std::errc{} && ptr == last && k >= 1 && k <= 255)
      return {StrategyKind::dbta, k};
  }
  throw std::invalid_argument("unknown strategy '" + std::string(text) + "'");
}

namespace {

bool by_task(const BidEntry& a, const BidEntry& b) { return a.task < b.task; }

BidEntry* find_entry(ChaosPacket& p, TaskId task) {
  for (auto& e : p.entries)
    if (e.task == task) return &e;
  return nullptr;
}

}  // namespace

std::size_t merge_entries(ChaosPacket& local, const ChaosPacket& received,
                          std::size_t capacity) {
  for (const auto& r : received.entries) {
    if (BidEntry* e = find_entry(local, r.task)) {
      if (outbids(r.bid, r.winner, e->bid, e->winner)) *e = r;
      // Same bid and winner reached along different histories: settle the
      // priority so merge order cannot matter.
      else if (r.bid == e->bid && r.winner == e->winner) e->priority = std::min(e->priority, r.priority);
    } else {
      local.entries.push_back(r);
    }
  }
  std::sort(local.entries.begin(), local.entries.end(), by_task);
  std::size_t dropped = 0;
  if (local.entries.size() > capacity) {
    dropped = local.entries.size() - capacity;
    local.entries.resize(capacity);
  }
  return dropped;
}

PlacementResult dbta_place_bids(Robot& robot, ChaosPacket& packet, int k,
                                std::size_t capacity, std::vector<BidEvent>* log) {
  const std::vector<BidEntry> before = packet.entries;
  PlacementResult out;
  std::vector<std::uint8_t> used;
  for (const auto& e : packet.entries)
    if (e.winner == robot.id) used.push_back(e.priority);

  int placed = 0;
  for (const auto& item : robot.bid_book) {
    if (placed >= k) break;
    if (robot.lost_tasks.contains(item.task)) continue;
    if (BidEntry* e = find_entry(packet, item.task)) {
      if (e->winner == robot.id) {
        ++placed;
      } else if (outbids(item.bid, robot.id, e->bid, e->winner)) {
        e->bid = item.bid;
        e->winner = robot.id;
        used.push_back(e->priority);
        ++placed;
        if (log) log->push_back({robot.id, item.task, item.bid});
      } else {
        robot.lost_tasks.insert(item.task);
      }
      continue;
    }
    if (packet.entries.size() >= capacity) {
      ++out.dropped;
      continue;
    }
    std::uint8_t p = 1;
    while (std::find(used.begin(), used.end(), p) != used.end()) ++p;
    used.push_back(p);
    packet.entries.push_back(BidEntry{item.task, item.bid, p, robot.id});
    ++placed;
    if (log) log->push_back({robot.id, item.task, item.bid});
  }
  std::sort(packet.entries.begin(), packet.entries.end(), by_task);
  out.changed = packet.entries != before;
  return out;
}

AllocationRoundOutcome dbta_allocate(const ChaosPacket& converged,
                                     std::span<const TaskId> open_tasks) {
  AllocationRoundOutcome out;
  std::vector<BidEntry> entries;
  for (const auto& e : converged.entries)
    if (std::find(open_tasks.begin(), open_tasks.end(), e.task) != open_tasks.end())
      entries.push_back(e);
  std::sort(entries.begin(), entries.end(), by_task);

  std::uint8_t max_priority = 0;
  for (const auto& e : entries) max_priority = std::max(max_priority, e.priority);

  std::set<TaskId> assigned;
  for (int p = 1; p <= max_priority; ++p) {
    std::set<RobotId> busy;
    for (const auto& e : entries) {
      if (e.priority != p || assigned.contains(e.task) || busy.contains(e.winner))
        continue;
      busy.insert(e.winner);
      assigned.insert(e.task);
      out.assignments.push_back({e.task, e.winner});
    }
  }
  for (TaskId t : open_tasks)
    if (!assigned.contains(t)) out.unallocated.push_back(t);
  return out;
}

DbtaParticipant::DbtaParticipant(Robot& robot, std::size_t robot_count,
                                 std::uint32_t sequence, const PacketLayout& layout,
                                 std::size_t frames, int bids,
                                 std::vector<BidEvent>* log)
    : robot_(&robot),
      robot_count_(robot_count),
      layout_(layout),
      frames_(frames),
      bids_(bids),
      log_(log) {
  validate_layout(layout);
  if (frames == 0) throw std::invalid_argument("frames must be >= 1");
  if (robot_count > max_robots_for_layout(layout))
    throw std::invalid_argument("too many robots for the flag field");
  packet_.sequence = sequence;
  packet_.flags = FlagSet(layout.flag_bytes);
}

void DbtaParticipant::place() {
  const auto r = dbta_place_bids(*robot_, packet_, bids_,
                                 layout_.entries * frames_, log_);
  dropped_ += r.dropped;
  placed_ = true;
}

void DbtaParticipant::begin(bool initiator) {
  packet_.flags.set(robot_->id);
  if (initiator) place();
}

Frame DbtaParticipant::frame() const { return encode(packet_, layout_, frames_); }

ReceiveResult DbtaParticipant::receive(std::span<const std::uint8_t> bytes) {
  const ChaosPacket received = decode(bytes, layout_, frames_);
  if (received.sequence != packet_.sequence) return {false, true};
  const ChaosPacket before = packet_;
  packet_.flags.merge(received.flags);
  merge_entries(packet_, received, layout_.entries * frames_);
  place();
  return {packet_ != before, false};
}

Frame DbtaParticipant::originate() {
  if (!placed_) place();
  return frame();
}

std::optional<TaskId> ibta_target(std::span<const TaskId> open_tasks) {
  if (open_tasks.empty()) return std::nullopt;
  return *std::min_element(open_tasks.begin(), open_tasks.end());
}

AllocationRoundOutcome ibta_allocate(const ChaosPacket& converged,
                                     std::span<const TaskId> open_tasks) {
  AllocationRoundOutcome out;
  std::optional<TaskId> done;
  for (const auto& e : converged.entries) {
    if (std::find(open_tasks.begin(), open_tasks.end(), e.task) == open_tasks.end())
      continue;
    out.assignments.push_back({e.task, e.winner});
    done = e.task;
    break;
  }
  for (TaskId t : open_tasks)
    if (t != done) out.unallocated.push_back(t);
  return out;
}

IbtaParticipant::IbtaParticipant(RobotId self, TaskId target, BidValue own_bid,
                                 std::uint32_t sequence, const PacketLayout& layout)
    : self_(self), target_(target), own_bid_(own_bid), layout_(layout) {
  validate_layout(layout);
  packet_.sequence = sequence;
  packet_.flags = FlagSet(layout.flag_bytes);
}

void IbtaParticipant::offer() {
  if (own_bid_ == 0) return;
  if (packet_.entries.empty()) {
    packet_.entries.push_back({target_, own_bid_, 1, self_});
    return;
  }
  BidEntry& e = packet_.entries.front();
  if (outbids(own_bid_, self_, e.bid, e.winner)) {
    e.bid = own_bid_;
    e.winner = self_;
  }
}

void IbtaParticipant::begin(bool initiator) {
  packet_.flags.set(self_);
  if (initiator) offer();
}

Frame IbtaParticipant::frame() const { return encode(packet_, layout_); }

ReceiveResult IbtaParticipant::receive(std::span<const std::uint8_t> bytes) {
  const ChaosPacket received = decode(bytes, layout_);
  if (received.sequence != packet_.sequence) return {false, true};
  const ChaosPacket before = packet_;
  packet_.flags.merge(received.flags);
  for (const auto& r : received.entries) {
    if (r.task != target_) continue;
    if (packet_.entries.empty()) {
      packet_.entries.push_back(r);
    } else if (outbids(r.bid, r.winner, packet_.entries.front().bid,
                       packet_.entries.front().winner)) {
      packet_.entries.front() = r;
    }
  }
  offer();
  return {packet_ != before, false};
}

Frame IbtaParticipant::originate() {
  offer();
  return frame();
}

BidMatrix::BidMatrix(std::vector<RobotId> robots, std::vector<TaskId> tasks)
    : robots_(std::move(robots)),
      tasks_(std::move(tasks)),
      cells_(robots_.size() * tasks_.size()) {}

std::size_t BidMatrix::index(RobotId robot, TaskId task) const {
  const auto r = std::find(robots_.begin(), robots_.end(), robot);
  const auto t = std::find(tasks_.begin(), tasks_.end(), task);
  if (r == robots_.end() || t == tasks_.end())
    throw std::out_of_range("robot or task not in bid matrix");
  return static_cast<std::size_t>(r - robots_.begin()) * tasks_.size() +
         static_cast<std::size_t>(t - tasks_.begin());
}

void BidMatrix::set(RobotId robot, TaskId task, BidValue bid) {
  auto& cell = cells_[index(robot, task)];
  if (!cell) ++known_;
  cell = bid;
}

std::optional<BidValue> BidMatrix::get(RobotId robot, TaskId task) const {
  return cells_[index(robot, task)];
}

std::vector<Assignment> balanced_greedy(const BidMatrix& matrix) {
  const auto& robots = matrix.robots();
  std::vector<TaskId> tasks = matrix.tasks();
  std::sort(tasks.begin(), tasks.end());
  std::vector<std::size_t> load(robots.size(), 0);
  std::vector<bool> taken(tasks.size(), false);
  std::vector<Assignment> out;

  for (std::size_t remaining = tasks.size(); remaining > 0; --remaining) {
    const std::size_t layer = *std::min_element(load.begin(), load.end());
    std::optional<std::size_t> best_r, best_t;
    BidValue best_bid = 0;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (taken[t]) continue;
      for (std::size_t r = 0; r < robots.size(); ++r) {
        if (load[r] != layer) continue;
        const auto bid = matrix.get(robots[r], tasks[t]);
        if (!bid) continue;
        const bool better =
            !best_t || *bid > best_bid ||
            (*bid == best_bid && (tasks[t] < tasks[*best_t] ||
                                  (t == *best_t && robots[r] < robots[*best_r])));
        if (better) {
          best_bid = *bid;
          best_r = r;
          best_t = t;
        }
      }
    }
    if (!best_t) break;
    taken[*best_t] = true;
    ++load[*best_r];
    out.push_back({tasks[*best_t], robots[*best_r]});
  }
  return out;
}

bool tuple_before(const BidTuple& a, const BidTuple& b) {
  if (a.task != b.task) return a.task < b.task;
  return a.robot < b.robot;
}

AataParticipant::AataParticipant(RobotId self, std::vector<BidTuple> own_pending,
                                 std::uint32_t sequence, std::size_t flag_bytes)
    : self_(self),
      own_pending_(std::move(own_pending)),
      flag_bytes_(flag_bytes),
      capacity_(tuple_capacity(flag_bytes)) {
  std::sort(own_pending_.begin(), own_pending_.end(), tuple_before);
  packet_.sequence = sequence;
  packet_.flags = FlagSet(flag_bytes);
}

void AataParticipant::merge_tuples(const std::vector<BidTuple>& incoming) {
  for (const auto& t : incoming) {
    const bool seen = std::any_of(
        packet_.tuples.begin(), packet_.tuples.end(),
        [&](const BidTuple& x) { return x.robot == t.robot && x.task == t.task; });
    if (!seen) packet_.tuples.push_back(t);
  }
  std::sort(packet_.tuples.begin(), packet_.tuples.end(), tuple_before);
  if (packet_.tuples.size() > capacity_) packet_.tuples.resize(capacity_);
}

void AataParticipant::contribute() {
  merge_tuples(own_pending_);
  contributed_ = true;
}

void AataParticipant::begin(bool initiator) {
  packet_.flags.set(self_);
  if (initiator) contribute();
}

Frame AataParticipant::frame() const { return encode_tuples(packet_, flag_bytes_); }

ReceiveResult AataParticipant::receive(std::span<const std::uint8_t> bytes) {
  const TuplePacket received = decode_tuples(bytes, flag_bytes_);
  if (received.sequence != packet_.sequence) return {false, true};
  const TuplePacket before = packet_;
  packet_.flags.merge(received.flags);
  merge_tuples(received.tuples);
  contribute();
  return {packet_ != before, false};
}

Frame AataParticipant::originate() {
  if (!contributed_) contribute();
  return frame();
}

}  // namespace stmrta
