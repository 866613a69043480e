#include "stmrta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "stmrta/seed.hpp"

namespace stmrta {

std::string to_string(ArrivalKind kind) {
  switch (kind) {
    case ArrivalKind::all_at_start: return "static";
    case ArrivalKind::continuous: return "continuous";
    case ArrivalKind::spiking: return "spiking";
  }
  return "?";
}

ArrivalKind parse_arrival_kind(std::string_view text) {
  if (text == "static") return ArrivalKind::all_at_start;
  if (text == "continuous") return ArrivalKind::continuous;
  if (text == "spiking") return ArrivalKind::spiking;
  throw std::invalid_argument("unknown arrival pattern '" + std::string(text) + "'");
}

std::string to_string(Transport t) {
  return t == Transport::chaos ? "chaos" : "netflood";
}

Transport parse_transport(std::string_view text) {
  if (text == "chaos") return Transport::chaos;
  if (text == "netflood") return Transport::netflood;
  throw std::invalid_argument("unknown transport '" + std::string(text) + "'");
}

std::string to_string(BidOrigin o) { return o == BidOrigin::live ? "live" : "queue_end"; }

BidOrigin parse_bid_origin(std::string_view text) {
  if (text == "live") return BidOrigin::live;
  if (text == "queue_end") return BidOrigin::queue_end;
  throw std::invalid_argument("unknown bid origin '" + std::string(text) + "'");
}

std::vector<double> arrival_times(std::size_t count, const ArrivalPattern& pattern,
                                  std::mt19937_64& rng) {
  std::vector<double> out;
  out.reserve(count);
  if (pattern.kind == ArrivalKind::all_at_start) {
    out.assign(count, 0.0);
    return out;
  }
  if (pattern.interval_ms <= 0.0) throw std::invalid_argument("interval must be > 0");
  if (pattern.kind == ArrivalKind::continuous && pattern.per_interval < 1)
    throw std::invalid_argument("per_interval must be >= 1");

  std::uniform_int_distribution<int> small(1, 2);
  for (std::size_t interval = 1; out.size() < count; ++interval) {
    int batch = pattern.per_interval;
    if (pattern.kind == ArrivalKind::spiking) {
      const std::size_t phase = (interval - 1) % 5;
      batch = phase < 3 ? small(rng) : 8;
    }
    for (int i = 0; i < batch && out.size() < count; ++i)
      out.push_back(static_cast<double>(interval) * pattern.interval_ms);
  }
  return out;
}

Scenario generate_scenario(std::uint64_t seed, std::size_t robot_count,
                           std::size_t task_count, const ArrivalPattern& pattern,
                           const Arena& arena, const Deployment& deployment) {
  if (robot_count == 0) throw std::invalid_argument("need at least one robot");
  if (task_count > std::numeric_limits<std::uint8_t>::max())
    throw std::invalid_argument("at most 255 tasks fit the one-byte task id");

  const auto cols = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(robot_count))));
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::uniform_real_distribution<double> jitter(-deployment.jitter, deployment.jitter);

    Scenario sc;
    sc.seed = seed;
    sc.radio_range = deployment.radio_range;
    for (std::size_t i = 0; i < robot_count; ++i) {
      const double gx = static_cast<double>(i % cols) * deployment.spacing;
      const double gy = static_cast<double>(i / cols) * deployment.spacing;
      sc.robots.push_back(Point{gx + jitter(rng), gy + jitter(rng)});
    }
    if (!Topology(sc.robots, sc.radio_range).connected()) continue;

    std::uniform_real_distribution<double> ux(0.0, arena.width);
    std::uniform_real_distribution<double> uy(0.0, arena.height);
    std::vector<Point> locations;
    for (std::size_t t = 0; t < task_count; ++t) {
      const double x = ux(rng);
      locations.push_back(Point{x, uy(rng)});
    }
    const auto times = arrival_times(task_count, pattern, rng);
    for (std::size_t t = 0; t < task_count; ++t)
      sc.tasks.emplace_back(TaskId{static_cast<std::uint8_t>(t + 1)}, locations[t],
                            times[t]);
    return sc;
  }
  throw ScenarioError("no connected deployment after 100 attempts");
}

std::size_t frames_for(const MissionConfig& cfg) {
  if (cfg.strategy.kind != StrategyKind::dbta) return 1;
  const auto k = static_cast<std::size_t>(cfg.strategy.bids);
  if (k <= cfg.layout.entries) return 1;
  if (!cfg.multi_packet)
    throw std::invalid_argument(cfg.strategy.name() + " needs " + std::to_string(k) +
                                " entries but the layout holds " +
                                std::to_string(cfg.layout.entries) +
                                "; enable multi_packet");
  return (k + cfg.layout.entries - 1) / cfg.layout.entries;
}

double MetricsRecord::mean_radio_on_ms() const {
  if (radio_on_ms.empty()) return 0.0;
  return std::accumulate(radio_on_ms.begin(), radio_on_ms.end(), 0.0) /
         static_cast<double>(radio_on_ms.size());
}

namespace {

class Mission {
 public:
  Mission(const Scenario& sc, const MissionConfig& cfg)
      : cfg_(cfg),
        topo_(sc.robots, sc.radio_range),
        tasks_(sc.tasks),
        frames_(frames_for(cfg)),
        speed_(cfg.robot_speed / 1000.0) {
    if (!(speed_ > 0.0)) throw std::invalid_argument("robot speed must be > 0");
    for (std::size_t i = 0; i < tasks_.size(); ++i)
      if (tasks_[i].id().value != i + 1)
        throw std::invalid_argument("scenario task ids must be 1..n in order");
    for (std::size_t i = 0; i < sc.robots.size(); ++i) {
      Robot r;
      r.id = RobotId{static_cast<std::uint16_t>(i)};
      r.position = sc.robots[i];
      r.radio_range = sc.radio_range;
      robots_.push_back(std::move(r));
    }
  }

  MetricsRecord run() {
    while (true) {
      if (clock_ > cfg_.clock_ceiling_ms) timeout();
      discover();
      const auto open = open_tasks();
      if (!open.empty()) {
        allocate(open);
        continue;
      }
      const double next = next_event();
      if (next == kNever) break;
      advance(next - clock_);
    }
    for (const auto& t : tasks_) {
      if (t.state() != TaskState::completed) timeout();
      m_.makespan_ms = std::max(m_.makespan_ms, *t.completion_ms());
    }
    for (const auto& r : robots_) m_.radio_on_ms.push_back(r.radio_on_ms);
    return m_;
  }

 private:
  static constexpr double kNever = std::numeric_limits<double>::infinity();
  // Absorbs rounding in clock + d / speed - clock.
  static constexpr double kEpsilonMs = 1e-6;

  [[noreturn]] void timeout() const {
    std::size_t done = 0;
    for (const auto& t : tasks_) done += t.state() == TaskState::completed;
    std::ostringstream msg;
    msg << "mission exceeded its clock ceiling: clock=" << clock_ << " ms, "
        << done << '/' << tasks_.size() << " tasks complete, rounds=" << m_.rounds_used
        << ", failed rounds=" << m_.failed_rounds;
    throw MissionTimeout(msg.str());
  }

  void discover() {
    for (auto& t : tasks_)
      if (t.state() == TaskState::undiscovered && t.discovery_ms() <= clock_) t.discover();
  }

  std::vector<TaskId> open_tasks() const {
    std::vector<TaskId> out;
    for (const auto& t : tasks_)
      if (t.state() == TaskState::open) out.push_back(t.id());
    return out;
  }

  Task& task(TaskId id) { return tasks_[id.value - 1]; }

  double next_event() const {
    double next = kNever;
    for (const auto& t : tasks_)
      if (t.state() == TaskState::undiscovered) next = std::min(next, t.discovery_ms());
    for (const auto& r : robots_) {
      if (r.assigned_queue.empty()) continue;
      const double d = distance(r.position, tasks_[r.assigned_queue.front().value - 1].location());
      next = std::min(next, clock_ + d / speed_);
    }
    return next;
  }

  void advance(double dt) {
    for (auto& r : robots_) {
      double used = 0.0;
      while (!r.assigned_queue.empty()) {
        Task& t = task(r.assigned_queue.front());
        const double d = distance(r.position, t.location());
        const double left = dt - used;
        if (d / speed_ <= left + kEpsilonMs) {
          used += d / speed_;
          r.position = t.location();
          t.complete(clock_ + used);
          r.assigned_queue.pop_front();
          continue;
        }
        const double f = left * speed_ / d;
        r.position.x += (t.location().x - r.position.x) * f;
        r.position.y += (t.location().y - r.position.y) * f;
        break;
      }
    }
    clock_ += dt;
  }

  Point bid_origin(const Robot& r) const {
    if (cfg_.bid_origin == BidOrigin::queue_end && !r.assigned_queue.empty())
      return tasks_[r.assigned_queue.back().value - 1].location();
    return r.position;
  }

  BidValue bid(const Robot& r, TaskId t) const {
    return compute_bid(bid_origin(r), tasks_[t.value - 1].location(), cfg_.bid_scale);
  }

  /// One consensus exchange over the configured transport. Returns the
  /// participant whose packet everyone agreed on, or nullptr.
  template <class P>
  const P* exchange(std::vector<P>& nodes) {
    const std::size_t n = robots_.size();
    const RobotId initiator{static_cast<std::uint16_t>(m_.rounds_used % n)};
    ++m_.rounds_used;
    const std::uint64_t seed = mix_seed(cfg_.seed, m_.rounds_used);

    bool ok = false;
    double duration = 0.0;
    std::vector<double> radio;
    const P* agreed = nullptr;
    if (cfg_.transport == Transport::chaos) {
      RoundConfig rc = cfg_.round;
      rc.frames = frames_;
      RoundTrace trace;
      trace.sequence = sequence_;
      const RoundStats s = run_chaos_round(std::span<P>(nodes), topo_, initiator, rc, seed,
                                           cfg_.trace ? &trace : nullptr);
      if (cfg_.trace) trace.write(*cfg_.trace);
      ok = s.converged;
      duration = s.duration_ms;
      radio = s.radio_on_ms;
      agreed = &nodes[0];
    } else {
      std::vector<RobotId> order;
      for (std::size_t i = 0; i < n; ++i)
        order.push_back(RobotId{static_cast<std::uint16_t>((initiator.value + i) % n)});
      const NetfloodStats s = run_netflood_exchange(std::span<P>(nodes), topo_, order,
                                                    cfg_.netflood, packet_id_, seed);
      packet_id_ += static_cast<std::uint32_t>(n);
      const auto& last = s.informed.back();
      ok = std::all_of(last.begin(), last.end(), [](bool b) { return b; });
      duration = s.duration_ms;
      radio = s.radio_on_ms;
      agreed = &nodes[order.back().value];
    }
    for (std::size_t i = 0; i < n; ++i) robots_[i].radio_on_ms += radio[i];
    m_.total_convergence_ms += duration;
    advance(duration);
    if (!ok) {
      ++m_.failed_rounds;
      return nullptr;
    }
    return agreed;
  }

  void allocate(const std::vector<TaskId>& open) {
    AllocationRoundOutcome out;
    switch (cfg_.strategy.kind) {
      case StrategyKind::dbta: out = dbta_round(open); break;
      case StrategyKind::ibta: out = ibta_round(open); break;
      case StrategyKind::aata: out = aata_round(open); break;
    }
    for (const auto& a : out.assignments) {
      task(a.task).allocate(a.robot);
      robots_[a.robot.value].assigned_queue.push_back(a.task);
      m_.assignments.push_back(a);
    }
    // New epoch: forget lost tasks once a round clears the board or stalls.
    if (out.assignments.empty() || out.unallocated.empty())
      for (auto& r : robots_) r.lost_tasks.clear();
  }

  AllocationRoundOutcome dbta_round(const std::vector<TaskId>& open) {
    for (auto& r : robots_) {
      r.bid_book.clear();
      for (TaskId t : open) r.bid_book.push_back({bid(r, t), t});
      sort_bid_book(r);
    }
    ++sequence_;
    std::vector<DbtaParticipant> nodes;
    nodes.reserve(robots_.size());
    for (auto& r : robots_)
      nodes.emplace_back(r, robots_.size(), sequence_, cfg_.layout, frames_,
                         cfg_.strategy.bids);
    const DbtaParticipant* agreed = exchange(nodes);
    for (const auto& p : nodes) m_.dropped_entries += p.dropped();
    if (!agreed) return {{}, open, m_.rounds_used};
    auto out = dbta_allocate(agreed->packet(), open);
    out.round_index = m_.rounds_used;
    return out;
  }

  AllocationRoundOutcome ibta_round(const std::vector<TaskId>& open) {
    const TaskId target = *ibta_target(open);
    ++sequence_;
    std::vector<IbtaParticipant> nodes;
    nodes.reserve(robots_.size());
    for (const auto& r : robots_)
      nodes.emplace_back(r.id, target, bid(r, target), sequence_, cfg_.layout);
    const IbtaParticipant* agreed = exchange(nodes);
    if (!agreed) return {{}, open, m_.rounds_used};
    auto out = ibta_allocate(agreed->packet(), open);
    out.round_index = m_.rounds_used;
    return out;
  }

  AllocationRoundOutcome aata_round(const std::vector<TaskId>& open) {
    std::vector<RobotId> ids;
    for (const auto& r : robots_) ids.push_back(r.id);
    BidMatrix matrix(ids, open);
    std::vector<std::vector<BidTuple>> own(robots_.size());
    for (const auto& r : robots_)
      for (TaskId t : open) own[r.id.value].push_back({r.id, t, bid(r, t)});

    for (int sub = 0; !matrix.complete() && sub < cfg_.aata_max_rounds; ++sub) {
      ++sequence_;
      std::vector<AataParticipant> nodes;
      nodes.reserve(robots_.size());
      for (const auto& r : robots_) {
        std::vector<BidTuple> pending;
        for (const auto& t : own[r.id.value])
          if (!matrix.get(t.robot, t.task)) pending.push_back(t);
        nodes.emplace_back(r.id, std::move(pending), sequence_, cfg_.layout.flag_bytes);
      }
      if (const AataParticipant* agreed = exchange(nodes))
        for (const auto& t : agreed->packet().tuples) matrix.set(t.robot, t.task, t.bid);
    }
    AllocationRoundOutcome out;
    out.round_index = m_.rounds_used;
    if (matrix.complete()) out.assignments = balanced_greedy(matrix);
    for (TaskId t : open) {
      const bool done = std::any_of(out.assignments.begin(), out.assignments.end(),
                                    [&](const Assignment& a) { return a.task == t; });
      if (!done) out.unallocated.push_back(t);
    }
    return out;
  }

  const MissionConfig& cfg_;
  Topology topo_;
  std::vector<Task> tasks_;
  std::vector<Robot> robots_;
  std::size_t frames_;
  double speed_;
  double clock_ = 0.0;
  std::uint32_t sequence_ = 0;
  std::uint32_t packet_id_ = 1;
  MetricsRecord m_;
};

}  // namespace

MetricsRecord run_mission(const Scenario& scenario, const MissionConfig& cfg) {
  if (scenario.robots.empty()) throw std::invalid_argument("scenario has no robots");
  return Mission(scenario, cfg).run();
}

}  // namespace stmrta
